# Standard library imports
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.geometry.Mesh import CIRCLE_TOLERANCE, Mesh, MeshError, validate
from modules.refelem.ReferenceBasis import EDGE_VERTICES

# DEFINITIONS
MESH_EXTENSION: str = '.fsmesh'
SECTIONS: tuple[str, ...] = ('VERTICES', 'TRIANGLES', 'CURVED', 'BOUNDARY')


def _float(value: float) -> str:
    return f"{float(value):.17g}"


def save_mesh(mesh: Mesh, path: str) -> None:
    lines: list[str] = [f"VERTICES {mesh.num_vertices}"]
    lines += [f"{i} {_float(x)} {_float(y)}" for i, (x, y) in enumerate(mesh.vertices)]
    lines.append(f"TRIANGLES {mesh.num_triangles}")
    lines += [f"{t} {a} {b} {c}" for t, (a, b, c) in enumerate(mesh.triangles)]

    curved: dict[int, np.ndarray] = mesh.curved_midpoints
    lines.append(f"CURVED {len(curved)}")
    for e in sorted(curved):
        t: int = int(mesh.edge_triangles[e, 0])
        local: int = int(np.flatnonzero(mesh.triangle_edges[t] == e)[0])
        lines.append(f"{t} {local} {_float(curved[e][0])} {_float(curved[e][1])}")

    boundary: np.ndarray = np.flatnonzero(mesh.boundary_edges)
    lines.append(f"BOUNDARY {len(boundary)}")
    lines += [f"{mesh.edges[e, 0]} {mesh.edges[e, 1]}" for e in boundary]

    with open(path, 'w', encoding='utf-8') as file:
        file.write('\n'.join(lines) + '\n')


class _Reader():
    def __init__(self, text: str) -> None:
        self._lines: list[tuple[int, list[str]]] = [(number, line.split()) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
        self._position: int = 0

    def done(self) -> bool:
        return self._position >= len(self._lines)

    def peek_section(self) -> Optional[str]:
        if self.done():
            return None
        return self._lines[self._position][1][0]

    def header(self, name: str) -> int:
        number, tokens = self._next(name)
        if tokens[0] != name or len(tokens) != 2:
            raise MeshError(f"line {number}: expected '{name} <count>'")
        count: int = self._int(tokens[1], number)
        if count < 0:
            raise MeshError(f"line {number}: negative count")
        return count

    def row(self, section: str, size: int) -> tuple[int, list[str]]:
        number, tokens = self._next(section)
        if len(tokens) != size:
            raise MeshError(f"line {number}: {section} entry needs {size} fields, got {len(tokens)}")
        return number, tokens

    def _next(self, section: str) -> tuple[int, list[str]]:
        if self.done():
            last: int = self._lines[-1][0] if self._lines else 0
            raise MeshError(f"line {last + 1}: unexpected end of file in {section}")
        entry = self._lines[self._position]
        self._position += 1
        return entry

    @staticmethod
    def _int(token: str, number: int) -> int:
        try:
            return int(token)
        except ValueError:
            raise MeshError(f"line {number}: '{token}' is not an integer") from None

    @staticmethod
    def _float(token: str, number: int) -> float:
        try:
            return float(token)
        except ValueError:
            raise MeshError(f"line {number}: '{token}' is not a number") from None


def load_mesh(path: str) -> Mesh:
    """Read a .fsmesh file; CURVED and BOUNDARY sections are optional.

    Raises:
        MeshError: with the offending line number on malformed input.
    """
    with open(path, 'r', encoding='utf-8') as file:
        reader: _Reader = _Reader(file.read())

    num_vertices: int = reader.header('VERTICES')
    vertices: np.ndarray = np.zeros((num_vertices, 2))
    for i in range(num_vertices):
        number, tokens = reader.row('VERTICES', 3)
        if reader._int(tokens[0], number) != i:
            raise MeshError(f"line {number}: expected vertex id {i}")
        vertices[i] = (reader._float(tokens[1], number), reader._float(tokens[2], number))

    num_triangles: int = reader.header('TRIANGLES')
    triangles: np.ndarray = np.zeros((num_triangles, 3), dtype=np.int64)
    for t in range(num_triangles):
        number, tokens = reader.row('TRIANGLES', 4)
        if reader._int(tokens[0], number) != t:
            raise MeshError(f"line {number}: expected triangle id {t}")
        for j in range(3):
            v: int = reader._int(tokens[j + 1], number)
            if v < 0 or v >= num_vertices:
                raise MeshError(f"line {number}: triangle {t} references unknown vertex {v}")
            triangles[t, j] = v

    curved: dict[tuple[int, int], np.ndarray] = {}
    if reader.peek_section() == 'CURVED':
        for _ in range(reader.header('CURVED')):
            number, tokens = reader.row('CURVED', 4)
            t = reader._int(tokens[0], number)
            local: int = reader._int(tokens[1], number)
            if t < 0 or t >= num_triangles:
                raise MeshError(f"line {number}: unknown triangle {t}")
            if local not in (0, 1, 2):
                raise MeshError(f"line {number}: local edge must be 0, 1 or 2")
            a, b = (int(triangles[t, k]) for k in EDGE_VERTICES[local])
            curved[(min(a, b), max(a, b))] = np.array([reader._float(tokens[2], number), reader._float(tokens[3], number)])

    boundary: Optional[set[tuple[int, int]]] = None
    boundary_line: int = 0
    if reader.peek_section() == 'BOUNDARY':
        boundary = set()
        for _ in range(reader.header('BOUNDARY')):
            number, tokens = reader.row('BOUNDARY', 2)
            a, b = reader._int(tokens[0], number), reader._int(tokens[1], number)
            boundary.add((min(a, b), max(a, b)))
            boundary_line = number

    if not reader.done():
        number, tokens = reader._next('end of file')
        raise MeshError(f"line {number}: unexpected content '{' '.join(tokens)}'")

    try:
        mesh: Mesh = Mesh(vertices, triangles, curved, _circle_radius(vertices, triangles, curved))
        validate(mesh)
    except MeshError as e:
        raise MeshError(f"{path}: {e}") from e
    if boundary is not None:
        derived: set[tuple[int, int]] = {(int(a), int(b)) for a, b in mesh.edges[mesh.boundary_edges]}
        if derived != boundary:
            raise MeshError(f"line {boundary_line}: BOUNDARY section does not match the triangulation")
    return mesh


def _circle_radius(vertices: np.ndarray, triangles: np.ndarray, curved: dict[tuple[int, int], np.ndarray]) -> Optional[float]:
    """Radius of the origin-centred circle carrying all curved nodes and their edge ends, if there is one."""
    if not curved:
        return None
    ends: np.ndarray = np.array(list(curved.keys())).reshape(-1)
    points: np.ndarray = np.concatenate((vertices[ends], np.array(list(curved.values()))))
    radii: np.ndarray = np.hypot(points[:, 0], points[:, 1])
    radius: float = float(np.median(radii))
    if np.all(np.abs(radii - radius) <= CIRCLE_TOLERANCE * max(radius, 1.0)):
        return radius
    return None
