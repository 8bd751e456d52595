# Standard library imports
from typing import Callable

# Third-party imports
import numpy as np

# Local application imports
from modules.geometry.ElementGeometry import ElementGeometry, mesh_geometry
from modules.geometry.Mesh import Mesh
from modules.operators.AnalyticField import AnalyticField
from modules.refelem.Quadrature import QuadDomain, QuadRule, quad_rule
from modules.refelem.ReferenceBasis import BasisFamily, DofFunctional, edge_points, ref_basis
from modules.spaces.Space import Space, SpaceKind, build_W
from modules.utils.SparseTriplets import element_blocks

# DEFINITIONS
Y_EDGE_DEGREE: int = 16
Y_CELL_DEGREE: int = 12
DEFAULT_BLOCK_SIZE: int = 1024


def _check_kind(space: Space, kind: SpaceKind) -> None:
    if space.kind != kind:
        raise ValueError(f"expected a {kind.value} space, got {space.kind.value}")


def _pullback_dofs(functional: DofFunctional, geom: ElementGeometry, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Reference Nedelec DOFs of the covariant pullback DF^T (f o F), (nb, 8)."""
    DF: np.ndarray = geom.jacobian(functional.points)
    values: np.ndarray = f(geom.map(functional.points))
    return functional.apply(np.einsum('bpck,bpc->bpk', DF, values))


def interpolate_Y(f: AnalyticField, Y: Space, edge_degree: int = Y_EDGE_DEGREE, cell_degree: int = Y_CELL_DEGREE,
                  block_size: int = DEFAULT_BLOCK_SIZE) -> np.ndarray:
    """Canonical Nedelec interpolation Pi_h^Y f; tangential edge moments come from the lower-id element."""
    _check_kind(Y, SpaceKind.Y)
    if not f.vector:
        raise ValueError("Pi_h^Y needs a vector field")
    mesh: Mesh = Y.mesh
    functional: DofFunctional = ref_basis(BasisFamily.NED1_DEG2).functional(edge_degree, cell_degree)
    owned: np.ndarray = Y.owned_local_dofs()
    coefficients: np.ndarray = np.zeros(Y.n_dofs)
    for block in element_blocks(mesh.num_triangles, block_size):
        local: np.ndarray = _pullback_dofs(functional, mesh_geometry(mesh, block), f)
        mask: np.ndarray = owned[block]
        coefficients[Y.local_to_global[block][mask]] = (Y.signs[block] * local)[mask]
    return coefficients


def _node_positions(mesh: Mesh) -> np.ndarray:
    return np.concatenate((mesh.vertices, mesh.midpoint_nodes))


def interpolate_Sigma(p: AnalyticField, Sigma: Space) -> np.ndarray:
    """Isoparametric nodal interpolation: DOF i is p at physical node i."""
    _check_kind(Sigma, SpaceKind.SIGMA)
    if p.vector:
        raise ValueError("Pi_h^Sigma needs a scalar field")
    return np.array(p(_node_positions(Sigma.mesh)), dtype=float)


def commuting_interpolate_Sigma(p: AnalyticField, Sigma: Space, edge_degree: int = Y_EDGE_DEGREE) -> np.ndarray:
    """Vertex values plus edge means of p along each physical edge curve.

    The midpoint coefficient m makes the edge restriction match the parameter mean of p:
    (p0 + 4 m + p1) / 6 = mean, i.e. m = (6 mean - p0 - p1) / 4. With these DOFs
    Pi_h^Y grad p = grad Pi_h^Sigma p holds on curved elements as well.
    """
    _check_kind(Sigma, SpaceKind.SIGMA)
    if p.vector:
        raise ValueError("Pi_h^Sigma needs a scalar field")
    mesh: Mesh = Sigma.mesh
    rule: QuadRule = quad_rule(QuadDomain.EDGE, edge_degree)
    owners: np.ndarray = mesh.edge_triangles[:, 0]
    local: np.ndarray = np.argmax(mesh.triangle_edges[owners] == np.arange(mesh.num_edges)[:, None], axis=1)
    curves: np.ndarray = mesh_geometry(mesh, owners).map(edge_points(rule.points))
    samples: np.ndarray = p(curves[np.arange(mesh.num_edges), local])
    mean: np.ndarray = rule.integrate(samples)

    vertex_values: np.ndarray = np.array(p(mesh.vertices), dtype=float)
    ends: np.ndarray = vertex_values[mesh.edges]
    midpoints: np.ndarray = (6.0 * mean - ends[:, 0] - ends[:, 1]) / 4.0
    return np.concatenate((vertex_values, midpoints))


def nodal_interpolate_W(v: AnalyticField, mesh: Mesh, homogeneous: bool = False) -> np.ndarray:
    """Wh coefficients holding the physical nodal values of v; boundary DOFs zeroed when homogeneous."""
    if not v.vector:
        raise ValueError("Wh interpolation needs a vector field")
    coefficients: np.ndarray = np.array(v(_node_positions(mesh)), dtype=float).reshape(-1)
    if homogeneous:
        coefficients[build_W(mesh).boundary_dofs] = 0.0
    return coefficients
