# Standard library imports
from dataclasses import dataclass, field
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.refelem.ReferenceBasis import EDGE_VERTICES

# DEFINITIONS
CIRCLE_TOLERANCE: float = 1e-13


class MeshError(ValueError):
    pass


# CLASSES
@dataclass(frozen=True, eq=False)
class Mesh:
    """Affine triangulation plus displaced midpoint nodes on curved boundary edges.

    Curved midpoints are keyed by the (lo, hi) vertex pair of their edge. Everything
    else (edges, incidence, orientation signs, boundary flags) is derived on construction.
    """
    vertices: np.ndarray
    triangles: np.ndarray
    curved: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    domain_radius: Optional[float] = None

    edges: np.ndarray = field(init=False, repr=False)
    edge_triangles: np.ndarray = field(init=False, repr=False)
    triangle_edges: np.ndarray = field(init=False, repr=False)
    triangle_edge_signs: np.ndarray = field(init=False, repr=False)
    boundary_edges: np.ndarray = field(init=False, repr=False)
    boundary_vertices: np.ndarray = field(init=False, repr=False)
    midpoint_nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vertices: np.ndarray = np.ascontiguousarray(self.vertices, dtype=float)
        triangles: np.ndarray = np.ascontiguousarray(self.triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise MeshError(f"vertices must have shape (n, 2), got {vertices.shape}")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
            raise MeshError(f"triangles must have shape (n > 0, 3), got {triangles.shape}")
        bad: np.ndarray = np.flatnonzero(np.any((triangles < 0) | (triangles >= len(vertices)), axis=1))
        if len(bad):
            raise MeshError(f"triangles {bad.tolist()} reference unknown vertices")
        if np.any(triangles[:, 0] == triangles[:, 1]) or np.any(triangles[:, 1] == triangles[:, 2]) or np.any(triangles[:, 0] == triangles[:, 2]):
            raise MeshError("triangle with repeated vertex")

        starts: np.ndarray = triangles[:, [a for a, _ in EDGE_VERTICES]]
        ends: np.ndarray = triangles[:, [b for _, b in EDGE_VERTICES]]
        pairs: np.ndarray = np.stack((np.minimum(starts, ends), np.maximum(starts, ends)), axis=-1).reshape(-1, 2)
        edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        owners: np.ndarray = np.repeat(np.arange(len(triangles)), 3)

        counts: np.ndarray = np.bincount(inverse, minlength=len(edges))
        if np.any(counts > 2):
            raise MeshError(f"edges {np.flatnonzero(counts > 2).tolist()} are shared by more than two triangles")
        order: np.ndarray = np.lexsort((owners, inverse))
        edge_triangles: np.ndarray = np.full((len(edges), 2), -1, dtype=np.int64)
        first: np.ndarray = np.ones(len(order), dtype=bool)
        first[1:] = inverse[order][1:] != inverse[order][:-1]
        edge_triangles[inverse[order][first], 0] = owners[order][first]
        edge_triangles[inverse[order][~first], 1] = owners[order][~first]

        signs: np.ndarray = np.where(starts < ends, 1.0, -1.0)
        boundary_edges: np.ndarray = edge_triangles[:, 1] < 0
        boundary_vertices: np.ndarray = np.zeros(len(vertices), dtype=bool)
        boundary_vertices[edges[boundary_edges].reshape(-1)] = True

        edge_index: dict[tuple[int, int], int] = {(int(a), int(b)): e for e, (a, b) in enumerate(edges)}
        midpoints: np.ndarray = 0.5 * (vertices[edges[:, 0]] + vertices[edges[:, 1]])
        curved: dict[tuple[int, int], np.ndarray] = {}
        for key, point in self.curved.items():
            lo, hi = min(key), max(key)
            if (lo, hi) not in edge_index:
                raise MeshError(f"curved midpoint given for unknown edge ({lo}, {hi})")
            e: int = edge_index[(lo, hi)]
            if not boundary_edges[e]:
                raise MeshError(f"curved midpoint given for interior edge ({lo}, {hi})")
            curved[(lo, hi)] = np.asarray(point, dtype=float).reshape(2)
            midpoints[e] = curved[(lo, hi)]

        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'triangles', triangles)
        object.__setattr__(self, 'curved', curved)
        object.__setattr__(self, 'edges', edges.astype(np.int64))
        object.__setattr__(self, 'edge_triangles', edge_triangles)
        object.__setattr__(self, 'triangle_edges', inverse.reshape(-1, 3).astype(np.int64))
        object.__setattr__(self, 'triangle_edge_signs', signs)
        object.__setattr__(self, 'boundary_edges', boundary_edges)
        object.__setattr__(self, 'boundary_vertices', boundary_vertices)
        object.__setattr__(self, 'midpoint_nodes', midpoints)
        for array in (vertices, triangles, edges, edge_triangles, signs, boundary_edges, boundary_vertices, midpoints):
            array.setflags(write=False)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def curved_midpoints(self) -> dict[int, np.ndarray]:
        """Displaced midpoint node per curved edge id."""
        lookup: dict[tuple[int, int], int] = {(int(a), int(b)): e for e, (a, b) in enumerate(self.edges)}
        return {lookup[key]: point for key, point in self.curved.items()}

    @property
    def curved_triangles(self) -> np.ndarray:
        curved_edges: np.ndarray = np.zeros(self.num_edges, dtype=bool)
        curved_edges[list(self.curved_midpoints.keys())] = True
        return np.flatnonzero(np.any(curved_edges[self.triangle_edges], axis=1))

    @property
    def element_nodes(self) -> np.ndarray:
        """The six physical nodes of every element: vertices, then the midpoint of each local edge, (nT, 6, 2)."""
        return np.concatenate((self.vertices[self.triangles], self.midpoint_nodes[self.triangle_edges]), axis=1)

    @property
    def affine_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    @property
    def diameters(self) -> np.ndarray:
        corners: np.ndarray = self.vertices[self.triangles]
        lengths: np.ndarray = np.linalg.norm(corners[:, [1, 2, 0]] - corners, axis=-1)
        return lengths.max(axis=1)

    @property
    def h(self) -> float:
        return float(self.diameters.max())

    def same_structure(self, other: 'Mesh') -> bool:
        if self.vertices.shape != other.vertices.shape or self.triangles.shape != other.triangles.shape:
            return False
        return (np.array_equal(self.vertices, other.vertices) and np.array_equal(self.triangles, other.triangles)
                and np.array_equal(self.midpoint_nodes, other.midpoint_nodes))


def validate(mesh: Mesh, strict: bool = False) -> None:
    """Check orientation and curved-node placement.

    strict additionally requires at most two boundary vertices per triangle, which holds
    for the disk family but not for tiny hand-made meshes.

    Raises:
        MeshError: naming the offending elements or edges.
    """
    areas: np.ndarray = mesh.affine_areas
    flipped: np.ndarray = np.flatnonzero(areas <= 0.0)
    if len(flipped):
        raise MeshError(f"triangles {flipped[:10].tolist()} are not counterclockwise")
    if mesh.domain_radius is not None:
        radius: float = mesh.domain_radius
        for e, point in mesh.curved_midpoints.items():
            if abs(np.hypot(point[0], point[1]) - radius) > CIRCLE_TOLERANCE * max(radius, 1.0):
                raise MeshError(f"curved midpoint of edge {e} is off the circle of radius {radius}")
        missing: np.ndarray = np.setdiff1d(np.flatnonzero(mesh.boundary_edges), list(mesh.curved_midpoints.keys()))
        if len(missing):
            raise MeshError(f"boundary edges {missing[:10].tolist()} have no curved midpoint")
    if strict:
        crowded: np.ndarray = np.flatnonzero(mesh.boundary_vertices[mesh.triangles].sum(axis=1) > 2)
        if len(crowded):
            raise MeshError(f"triangles {crowded[:10].tolist()} have three boundary vertices")


def generate_disk_mesh(n: int, radius: float = 1.0) -> Mesh:
    """Concentric-ring triangulation of the disk: ring k carries 6k vertices at radius k/n.

    Boundary-edge midpoints are projected radially onto the circle.
    """
    if int(n) != n or n < 2:
        raise ValueError(f"disk mesh needs n >= 2, got {n}")
    n = int(n)
    points: list[np.ndarray] = [np.zeros((1, 2))]
    for k in range(1, n + 1):
        theta: np.ndarray = 2.0 * np.pi * np.arange(6 * k) / (6 * k)
        points.append(radius * k / n * np.stack((np.cos(theta), np.sin(theta)), axis=-1))
    vertices: np.ndarray = np.concatenate(points)

    def ring(k: int, j: int) -> int:
        if k == 0:
            return 0
        return 1 + 3 * k * (k - 1) + j % (6 * k)

    triangles: list[tuple[int, int, int]] = []
    for k in range(1, n + 1):
        for s in range(6):
            outer = [ring(k, s * k + i) for i in range(k + 1)]
            inner = [ring(k - 1, s * (k - 1) + i) for i in range(k)]
            for i in range(k):
                triangles.append((outer[i], outer[i + 1], inner[i]))
            for i in range(k - 1):
                triangles.append((inner[i], outer[i + 1], inner[i + 1]))

    first_boundary: int = ring(n, 0)
    curved: dict[tuple[int, int], np.ndarray] = {}
    for j in range(6 * n):
        a, b = first_boundary + j, ring(n, j + 1)
        middle: np.ndarray = 0.5 * (vertices[a] + vertices[b])
        curved[(min(a, b), max(a, b))] = radius * middle / np.hypot(middle[0], middle[1])

    # rings sit exactly on the circle at the boundary
    boundary: np.ndarray = vertices[first_boundary:]
    vertices[first_boundary:] = radius * boundary / np.hypot(boundary[:, 0], boundary[:, 1])[:, None]

    mesh: Mesh = Mesh(vertices, np.array(triangles), curved, float(radius))
    validate(mesh, strict=True)
    return mesh
