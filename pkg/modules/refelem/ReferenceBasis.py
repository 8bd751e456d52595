# Standard library imports
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.refelem.Polynomials import NUM_MONOMIALS, divergence_coefficients, gradient_coefficients, monomial_gradients, monomials
from modules.refelem.Quadrature import QuadDomain, quad_rule

# DEFINITIONS
REF_VERTICES: np.ndarray = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
# vertices, then the midpoint opposite each vertex
P2_NODES: np.ndarray = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.0, 0.5], [0.5, 0.0]])
CENTROID: np.ndarray = np.array([1.0 / 3.0, 1.0 / 3.0])

# local edge i is opposite vertex i and runs counterclockwise
EDGE_VERTICES: tuple[tuple[int, int], ...] = ((1, 2), (2, 0), (0, 1))
EDGE_STARTS: np.ndarray = REF_VERTICES[[1, 2, 0]]
EDGE_TANGENTS: np.ndarray = REF_VERTICES[[2, 0, 1]] - REF_VERTICES[[1, 2, 0]]
# tangent rotated by -90 degrees, not normalised: outward for counterclockwise triangles
EDGE_NORMALS: np.ndarray = np.stack((EDGE_TANGENTS[:, 1], -EDGE_TANGENTS[:, 0]), axis=-1)

GAUSS_PARAMETERS: np.ndarray = np.array([(1.0 - 1.0 / np.sqrt(3.0)) / 2.0, (1.0 + 1.0 / np.sqrt(3.0)) / 2.0])

BUBBLE_COEFFS: np.ndarray = np.array([-1.0, 6.0, 6.0, -6.0, -6.0, -6.0])

# nodal coefficient matrices: basis_j(x) = sum_m monomial_m(x) * COEFFS[m, j]
P2_COEFFS: np.ndarray = np.linalg.inv(monomials(P2_NODES))
P1_COEFFS: np.ndarray = np.array([[1.0, 0.0, 0.0],
                                  [-1.0, 1.0, 0.0],
                                  [-1.0, 0.0, 1.0],
                                  [0.0, 0.0, 0.0],
                                  [0.0, 0.0, 0.0],
                                  [0.0, 0.0, 0.0]])

DOF_QUAD_DEGREE: int = 4


class BasisFamily(Enum):
    P1 =            'P1'
    P2_LAGRANGE =   'P2Lagrange'
    FS_BUBBLE =     'FSBubble'
    RT1 =           'RT1'
    NED1_DEG2 =     'NED1deg2'


class DofKind(Enum):
    POINT_VALUE =           'point_value'
    EDGE_NORMAL_MOMENT =    'edge_normal_moment'
    EDGE_TANGENT_MOMENT =   'edge_tangent_moment'
    INTERIOR_MOMENT =       'interior_moment'


@dataclass(frozen=True)
class DofDescriptor:
    kind: DofKind
    edge: Optional[int] = None
    degree: Optional[int] = None
    component: Optional[int] = None
    point: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class DofFunctional:
    """Sample-based representation of a family's DOF functionals.

    dof_k(v) = sum_{p, c} weights[k, p, c] * v(points[p])[c]   (vector families)
    dof_k(v) = sum_p weights[k, p] * v(points[p])               (scalar families)
    """
    points: np.ndarray
    weights: np.ndarray

    def apply(self, samples: np.ndarray) -> np.ndarray:
        """(..., np[, 2]) samples -> (..., ndofs)."""
        if self.weights.ndim == 3:
            return np.einsum('kpc,...pc->...k', self.weights, samples)
        return np.einsum('kp,...p->...k', self.weights, samples)

    def apply_coefficients(self, coeffs: np.ndarray) -> np.ndarray:
        """Apply to polynomial fields given by monomial coefficients (..., 6[, 2])."""
        mono: np.ndarray = monomials(self.points)
        if self.weights.ndim == 3:
            return self.apply(np.einsum('pm,...mc->...pc', mono, coeffs))
        return self.apply(np.einsum('pm,...m->...p', mono, coeffs))


def edge_points(s: np.ndarray) -> np.ndarray:
    """Reference points of the edge parameters s on each local edge, (ns,) -> (3, ns, 2)."""
    s = np.asarray(s, dtype=float)
    return EDGE_STARTS[:, None, :] + s[None, :, None] * EDGE_TANGENTS[:, None, :]


def edge_moment_polynomials(s: np.ndarray) -> np.ndarray:
    """Edge moment weights q0 = 1, q1 = 2s - 1 (a P1 basis on [0,1]), (ns,) -> (2, ns)."""
    s = np.asarray(s, dtype=float)
    return np.stack((np.ones_like(s), 2.0 * s - 1.0))


def moment_functional(directions: np.ndarray, edge_degree: int, cell_degree: int) -> DofFunctional:
    """Per edge two moments of v.direction against q0, q1, then two interior moments against e1, e2."""
    edge_rule = quad_rule(QuadDomain.EDGE, edge_degree)
    cell_rule = quad_rule(QuadDomain.TRIANGLE, cell_degree)
    ne: int = len(edge_rule)
    nc: int = len(cell_rule)
    points: np.ndarray = np.concatenate((edge_points(edge_rule.points).reshape(-1, 2), cell_rule.points))
    weights: np.ndarray = np.zeros((8, 3 * ne + nc, 2))
    q: np.ndarray = edge_moment_polynomials(edge_rule.points) * edge_rule.weights
    for i in range(3):
        block = slice(i * ne, (i + 1) * ne)
        for k in range(2):
            weights[2 * i + k, block, :] = q[k][:, None] * directions[i][None, :]
    for d in range(2):
        weights[6 + d, 3 * ne:, d] = cell_rule.weights
    return DofFunctional(points, weights)


def _nodal_functional(nodes: np.ndarray) -> DofFunctional:
    return DofFunctional(np.array(nodes, dtype=float), np.eye(len(nodes)))


# CLASSES
@dataclass(frozen=True)
class RefBasis:
    """A reference-triangle basis stored as monomial coefficients.

    Scalar families keep coeffs of shape (dim, 6), vector families (dim, 6, 2).
    """
    family: BasisFamily
    dim: int
    coeffs: np.ndarray
    dofs: tuple[DofDescriptor, ...]

    @property
    def is_vector(self) -> bool:
        return self.coeffs.ndim == 3

    def values(self, points: np.ndarray) -> np.ndarray:
        mono: np.ndarray = monomials(points)
        if self.is_vector:
            return np.einsum('...m,imc->...ic', mono, self.coeffs)
        return np.einsum('...m,im->...i', mono, self.coeffs)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Reference derivatives; for vector families entry [..., i, c, k] is d v_c / d x_k."""
        grad: np.ndarray = monomial_gradients(points)
        if self.is_vector:
            return np.einsum('...mk,imc->...ick', grad, self.coeffs)
        return np.einsum('...mk,im->...ik', grad, self.coeffs)

    def divergences(self, points: np.ndarray) -> np.ndarray:
        if not self.is_vector:
            raise ValueError(f"{self.family.value} is a scalar family")
        return np.einsum('...m,im->...i', monomials(points), divergence_coefficients(self.coeffs))

    def functional(self, edge_degree: int = DOF_QUAD_DEGREE, cell_degree: int = DOF_QUAD_DEGREE) -> DofFunctional:
        return _functional(self.family, edge_degree, cell_degree)

    def interpolate(self, field: Callable[[np.ndarray], np.ndarray], edge_degree: int = DOF_QUAD_DEGREE,
                    cell_degree: int = DOF_QUAD_DEGREE) -> np.ndarray:
        """Canonical interpolation: the DOF values of field, i.e. its coefficients in this basis."""
        functional: DofFunctional = self.functional(edge_degree, cell_degree)
        return functional.apply(np.asarray(field(functional.points), dtype=float))

    def gram(self) -> np.ndarray:
        """DOF functionals applied to the basis; the identity for a dual basis."""
        return self.functional().apply_coefficients(self.coeffs).T


@lru_cache(maxsize=None)
def _functional(family: BasisFamily, edge_degree: int, cell_degree: int) -> DofFunctional:
    if family == BasisFamily.P1:
        return _nodal_functional(REF_VERTICES)
    if family == BasisFamily.P2_LAGRANGE:
        return _nodal_functional(P2_NODES)
    if family == BasisFamily.FS_BUBBLE:
        return DofFunctional(CENTROID[None, :].copy(), np.eye(2)[:, None, :])
    if family == BasisFamily.RT1:
        return moment_functional(EDGE_NORMALS, edge_degree, cell_degree)
    return moment_functional(EDGE_TANGENTS, edge_degree, cell_degree)


def _moment_dofs(kind: DofKind) -> tuple[DofDescriptor, ...]:
    edge_dofs = tuple(DofDescriptor(kind, edge=i, degree=k) for i in range(3) for k in range(2))
    return edge_dofs + tuple(DofDescriptor(DofKind.INTERIOR_MOMENT, component=d) for d in range(2))


def _dual_coefficients(fields: np.ndarray, functional: DofFunctional) -> np.ndarray:
    matrix: np.ndarray = functional.apply_coefficients(fields)      # [field j, dof k]
    return np.einsum('jmc,ji->imc', fields, np.linalg.inv(matrix.T))


def _vector_fields(rows: list[tuple[list[float], list[float]]]) -> np.ndarray:
    return np.array([np.stack((np.array(a), np.array(b)), axis=-1) for a, b in rows])


# monomial coefficient rows for 1, x1, x2, x1^2, x1 x2, x2^2
_LINEAR_FIELDS: list[tuple[list[float], list[float]]] = [
    ([1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]),
    ([0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]),
    ([0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0]),
    ([0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0]),
    ([0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0]),
    ([0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]),
]
# x * P1 homogeneous: (x1^2, x1 x2), (x1 x2, x2^2)
_RT_EXTRA: list[tuple[list[float], list[float]]] = [
    ([0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0]),
    ([0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]),
]
# homogeneous quadratics orthogonal to x: (-x1 x2, x1^2), (-x2^2, x1 x2)
_NED_EXTRA: list[tuple[list[float], list[float]]] = [
    ([0, 0, 0, 0, -1, 0], [0, 0, 0, 1, 0, 0]),
    ([0, 0, 0, 0, 0, -1], [0, 0, 0, 0, 1, 0]),
]


@lru_cache(maxsize=None)
def ref_basis(family: BasisFamily) -> RefBasis:
    if family == BasisFamily.P1:
        dofs = tuple(DofDescriptor(DofKind.POINT_VALUE, point=tuple(p)) for p in REF_VERTICES)
        return RefBasis(family, 3, P1_COEFFS.T.copy(), dofs)
    if family == BasisFamily.P2_LAGRANGE:
        dofs = tuple(DofDescriptor(DofKind.POINT_VALUE, point=tuple(p)) for p in P2_NODES)
        return RefBasis(family, 6, P2_COEFFS.T.copy(), dofs)
    if family == BasisFamily.FS_BUBBLE:
        coeffs: np.ndarray = np.zeros((2, NUM_MONOMIALS, 2))
        coeffs[0, :, 0] = BUBBLE_COEFFS
        coeffs[1, :, 1] = BUBBLE_COEFFS
        dofs = tuple(DofDescriptor(DofKind.POINT_VALUE, component=d, point=tuple(CENTROID)) for d in range(2))
        return RefBasis(family, 2, coeffs, dofs)
    if family == BasisFamily.RT1:
        fields: np.ndarray = _vector_fields(_LINEAR_FIELDS + _RT_EXTRA)
        coeffs = _dual_coefficients(fields, _functional(family, DOF_QUAD_DEGREE, DOF_QUAD_DEGREE))
        return RefBasis(family, 8, coeffs, _moment_dofs(DofKind.EDGE_NORMAL_MOMENT))
    fields = _vector_fields(_LINEAR_FIELDS + _NED_EXTRA)
    coeffs = _dual_coefficients(fields, _functional(family, DOF_QUAD_DEGREE, DOF_QUAD_DEGREE))
    return RefBasis(family, 8, coeffs, _moment_dofs(DofKind.EDGE_TANGENT_MOMENT))


def p1_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P1 Lagrange values (..., 3) and reference gradients (..., 3, 2)."""
    basis: RefBasis = ref_basis(BasisFamily.P1)
    return basis.values(x), basis.gradients(x)


def p2_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P2 Lagrange values (..., 6) and reference gradients (..., 6, 2), nodes ordered as P2_NODES."""
    basis: RefBasis = ref_basis(BasisFamily.P2_LAGRANGE)
    return basis.values(x), basis.gradients(x)


def bubble_eval(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """phi(x) = 2 - 3 (l1^2 + l2^2 + l3^2) and its reference gradient 6 (l1 - l2, l1 - l3)."""
    x = np.asarray(x, dtype=float)
    l1: np.ndarray = 1.0 - x[..., 0] - x[..., 1]
    value: np.ndarray = 2.0 - 3.0 * (l1 * l1 + x[..., 0] ** 2 + x[..., 1] ** 2)
    gradient: np.ndarray = 6.0 * np.stack((l1 - x[..., 0], l1 - x[..., 1]), axis=-1)
    return value, gradient


def gauss_legendre_edge_points() -> np.ndarray:
    """The two Gauss points of every reference edge in local edge order, shape (6, 2)."""
    return edge_points(GAUSS_PARAMETERS).reshape(-1, 2)


def rt1_ref_basis(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """RT1 values (..., 8, 2) and reference divergences (..., 8)."""
    basis: RefBasis = ref_basis(BasisFamily.RT1)
    return basis.values(x), basis.divergences(x)


def ned1_ref_basis(x: np.ndarray) -> np.ndarray:
    """Nedelec (first kind, degree 2) values (..., 8, 2)."""
    return ref_basis(BasisFamily.NED1_DEG2).values(x)


def interpolate_rt1_ref(field: Callable[[np.ndarray], np.ndarray], edge_degree: int = DOF_QUAD_DEGREE,
                        cell_degree: int = DOF_QUAD_DEGREE) -> np.ndarray:
    return ref_basis(BasisFamily.RT1).interpolate(field, edge_degree, cell_degree)


def interpolate_ned1_ref(field: Callable[[np.ndarray], np.ndarray], edge_degree: int = DOF_QUAD_DEGREE,
                         cell_degree: int = DOF_QUAD_DEGREE) -> np.ndarray:
    return ref_basis(BasisFamily.NED1_DEG2).interpolate(field, edge_degree, cell_degree)


def p2_gradient_coefficients() -> np.ndarray:
    """Reference gradients of the P2 Lagrange basis as vector coefficients, (6, 6, 2)."""
    return gradient_coefficients(ref_basis(BasisFamily.P2_LAGRANGE).coeffs)
