# Standard library imports
from dataclasses import dataclass
from enum import Enum
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.geometry.Mesh import Mesh


class SpaceKind(Enum):
    W =     'Wh'
    PHI =   'Phih'
    V =     'Vh'
    Q =     'Qh'
    R =     'Rh'
    Y =     'Yh'
    SIGMA = 'Sigmah'


class Mapping(Enum):
    CONTRAVARIANT = 0
    COVARIANT =     1
    SCALAR =        2


MAPPINGS: dict[SpaceKind, Mapping] = {
    SpaceKind.W:        Mapping.CONTRAVARIANT,
    SpaceKind.PHI:      Mapping.CONTRAVARIANT,
    SpaceKind.V:        Mapping.CONTRAVARIANT,
    SpaceKind.R:        Mapping.CONTRAVARIANT,
    SpaceKind.Y:        Mapping.COVARIANT,
    SpaceKind.Q:        Mapping.SCALAR,
    SpaceKind.SIGMA:    Mapping.SCALAR,
}


@dataclass(frozen=True, eq=False)
class Space:
    """Global finite element space: per element the global id and sign of each local basis function.

    For Vh the local functions are the twelve Wh functions followed by the two bubbles;
    components holds the spaces it is stacked from.
    """
    kind: SpaceKind
    mesh: Mesh
    n_dofs: int
    local_to_global: np.ndarray
    signs: np.ndarray
    boundary_dofs: np.ndarray
    constraint: Optional[np.ndarray] = None
    components: tuple['Space', ...] = ()

    @property
    def mapping(self) -> Mapping:
        return MAPPINGS[self.kind]

    @property
    def num_local(self) -> int:
        return self.local_to_global.shape[1]

    @property
    def includes_bubbles(self) -> bool:
        return self.kind == SpaceKind.PHI or any(c.kind == SpaceKind.PHI for c in self.components)

    @property
    def free_dofs(self) -> np.ndarray:
        free: np.ndarray = np.ones(self.n_dofs, dtype=bool)
        free[self.boundary_dofs] = False
        return np.flatnonzero(free)

    def owned_local_dofs(self) -> np.ndarray:
        """(nT, nloc) mask of the local DOFs each element writes; a shared edge DOF belongs to its lower-id element."""
        owned: np.ndarray = np.ones(self.local_to_global.shape, dtype=bool)
        if self.kind in (SpaceKind.R, SpaceKind.Y):
            owner: np.ndarray = self.mesh.edge_triangles[self.mesh.triangle_edges, 0]
            mine: np.ndarray = owner == np.arange(self.mesh.num_triangles)[:, None]
            owned[:, :6] = np.repeat(mine, 2, axis=1)
        return owned


def _node_ids(mesh: Mesh) -> np.ndarray:
    """Global P2 node ids per element: vertex ids, then num_vertices + edge id for the midpoints."""
    return np.concatenate((mesh.triangles, mesh.num_vertices + mesh.triangle_edges), axis=1)


def _boundary_nodes(mesh: Mesh) -> np.ndarray:
    return np.concatenate((np.flatnonzero(mesh.boundary_vertices), mesh.num_vertices + np.flatnonzero(mesh.boundary_edges)))


def build_Sigma(mesh: Mesh) -> Space:
    """Continuous isoparametric P2: one DOF per vertex and per edge midpoint, no boundary condition."""
    nodes: np.ndarray = _node_ids(mesh)
    return Space(SpaceKind.SIGMA, mesh, mesh.num_vertices + mesh.num_edges, nodes, np.ones(nodes.shape),
                 np.zeros(0, dtype=np.int64))


def build_W(mesh: Mesh) -> Space:
    """Physical nodal values, two components per vertex and edge midpoint; local index 2 j + d."""
    nodes: np.ndarray = _node_ids(mesh)
    l2g: np.ndarray = (2 * nodes[:, :, None] + np.arange(2)[None, None, :]).reshape(len(nodes), 12)
    boundary: np.ndarray = (2 * _boundary_nodes(mesh)[:, None] + np.arange(2)[None, :]).reshape(-1)
    return Space(SpaceKind.W, mesh, 2 * (mesh.num_vertices + mesh.num_edges), l2g, np.ones(l2g.shape), np.sort(boundary))


def build_Phi(mesh: Mesh) -> Space:
    n: int = mesh.num_triangles
    l2g: np.ndarray = 2 * np.arange(n)[:, None] + np.arange(2)[None, :]
    return Space(SpaceKind.PHI, mesh, 2 * n, l2g, np.ones(l2g.shape), np.zeros(0, dtype=np.int64))


def build_V(mesh: Mesh, include_bubbles: bool = True) -> Space:
    """Vh = Wh + Phih with the bubble DOFs numbered after all Wh DOFs; without bubbles only Wh."""
    W: Space = build_W(mesh)
    if not include_bubbles:
        return Space(SpaceKind.V, mesh, W.n_dofs, W.local_to_global, W.signs, W.boundary_dofs, components=(W,))
    Phi: Space = build_Phi(mesh)
    l2g: np.ndarray = np.concatenate((W.local_to_global, W.n_dofs + Phi.local_to_global), axis=1)
    signs: np.ndarray = np.concatenate((W.signs, Phi.signs), axis=1)
    return Space(SpaceKind.V, mesh, W.n_dofs + Phi.n_dofs, l2g, signs, W.boundary_dofs, components=(W, Phi))


def build_Q(mesh: Mesh) -> Space:
    """Discontinuous P1 on the reference element; constraint entries |T~| / 3 per local DOF."""
    n: int = mesh.num_triangles
    l2g: np.ndarray = 3 * np.arange(n)[:, None] + np.arange(3)[None, :]
    constraint: np.ndarray = np.repeat(mesh.affine_areas / 3.0, 3)
    return Space(SpaceKind.Q, mesh, 3 * n, l2g, np.ones(l2g.shape), np.zeros(0, dtype=np.int64), constraint)


def _edge_dofs(mesh: Mesh) -> tuple[np.ndarray, np.ndarray]:
    n: int = mesh.num_triangles
    edge_dofs: np.ndarray = (2 * mesh.triangle_edges[:, :, None] + np.arange(2)[None, None, :]).reshape(n, 6)
    interior: np.ndarray = 2 * mesh.num_edges + 2 * np.arange(n)[:, None] + np.arange(2)[None, :]
    l2g: np.ndarray = np.concatenate((edge_dofs, interior), axis=1)
    # the constant moment flips with the edge direction, the linear one does not
    signs: np.ndarray = np.ones((n, 8))
    signs[:, 0:6:2] = mesh.triangle_edge_signs
    return l2g, signs


def build_R(mesh: Mesh) -> Space:
    """Contravariant RT1: two normal moments per edge (zero on the boundary) and two interior moments per element."""
    l2g, signs = _edge_dofs(mesh)
    boundary: np.ndarray = (2 * np.flatnonzero(mesh.boundary_edges)[:, None] + np.arange(2)[None, :]).reshape(-1)
    return Space(SpaceKind.R, mesh, 2 * mesh.num_edges + 2 * mesh.num_triangles, l2g, signs, boundary)


def build_Y(mesh: Mesh) -> Space:
    """Covariant Nedelec (first kind, degree 2): two tangential moments per edge and two interior moments per element."""
    l2g, signs = _edge_dofs(mesh)
    return Space(SpaceKind.Y, mesh, 2 * mesh.num_edges + 2 * mesh.num_triangles, l2g, signs, np.zeros(0, dtype=np.int64))
