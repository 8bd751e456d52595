# Standard library imports
from dataclasses import asdict, dataclass
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.assembly.StokesSolver import StokesSolution
from modules.geometry.ElementGeometry import ElementGeometry, mesh_geometry, piola_at
from modules.geometry.Mesh import Mesh
from modules.harness.Problems import Problem
from modules.operators.AnalyticField import AnalyticField
from modules.refelem.Quadrature import QuadDomain, QuadRule, quad_rule
from modules.spaces.LocalEval import LocalEval, evaluate_function
from modules.spaces.Space import Space
from modules.utils.SparseTriplets import element_blocks

# DEFINITIONS
ERROR_DEGREE: int = 10
DEFAULT_BLOCK_SIZE: int = 1024


# CLASSES
@dataclass(frozen=True)
class ErrorReport:
    scheme: str
    problem: str
    nu: float
    n: int
    h: float
    dofs: int
    err_u_l2: float
    err_u_h1: float
    err_p_l2: float
    div_l2: float
    rate_u_l2: Optional[float] = None
    rate_u_h1: Optional[float] = None
    rate_p_l2: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def pressure_shift(p: AnalyticField, Q: Space) -> float:
    """The constant c with L (p samples - c 1) = 0, samples taken at the element vertices in Qh order."""
    mesh: Mesh = Q.mesh
    samples: np.ndarray = np.asarray(p(mesh.vertices[mesh.triangles]), dtype=float).reshape(-1)
    L: np.ndarray = Q.constraint
    return float(L @ samples / np.sum(L))


def l2_norm(mesh: Mesh, f: AnalyticField, degree: int = ERROR_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> float:
    """||f||_{L2(Omega_h)} of a closed-form field over the curved mesh domain."""
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    total: float = 0.0
    for block in element_blocks(mesh.num_triangles, block_size):
        geom: ElementGeometry = mesh_geometry(mesh, block)
        values: np.ndarray = np.asarray(f(geom.map(rule.points)), dtype=float)
        squared: np.ndarray = values**2 if f.rank == 0 else np.sum(values**2, axis=tuple(range(2, values.ndim)))
        total += float(np.sum(rule.weights[None, :] * piola_at(geom, rule.points).detDF * squared))
    return float(np.sqrt(total))


def error_norms(sol: StokesSolution, prob: Problem, mesh: Optional[Mesh] = None, n: int = 0,
                degree: int = ERROR_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> ErrorReport:
    """L2 and broken H1 velocity errors, recentred L2 pressure error and broken divergence of a solution.

    Raises:
        ValueError: mesh is given and differs from the solution mesh.
    """
    if mesh is not None and mesh is not sol.mesh and not mesh.same_structure(sol.mesh):
        raise ValueError("solution and problem live on different meshes")
    mesh = sol.mesh
    V, Q = sol.spaces.V, sol.spaces.Q
    shift: float = pressure_shift(prob.exact_p, Q)
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)

    u_l2, u_h1, p_l2, div_l2 = 0.0, 0.0, 0.0, 0.0
    for block in element_blocks(mesh.num_triangles, block_size):
        geom: ElementGeometry = mesh_geometry(mesh, block)
        x: np.ndarray = geom.map(rule.points)
        uh: LocalEval = evaluate_function(V, sol.u, geom, rule.points)
        ph: LocalEval = evaluate_function(Q, sol.p, geom, rule.points)
        w: np.ndarray = rule.weights[None, :] * uh.detDF

        u_l2 += float(np.sum(w * np.sum((prob.exact_u(x) - uh.values)**2, axis=-1)))
        u_h1 += float(np.sum(w * np.sum((prob.exact_grad_u(x) - uh.physical_gradients)**2, axis=(-2, -1))))
        p_l2 += float(np.sum(w * (prob.exact_p(x) - shift - ph.values)**2))
        div_l2 += float(np.sum(w * uh.divergences**2))

    return ErrorReport(sol.scheme.value, prob.name.value, sol.nu, n, mesh.h, sol.dofs,
                       float(np.sqrt(u_l2)), float(np.sqrt(u_h1)), float(np.sqrt(p_l2)), float(np.sqrt(div_l2)))
