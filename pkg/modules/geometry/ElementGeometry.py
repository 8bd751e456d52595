# Standard library imports
from dataclasses import dataclass, field
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.geometry.Mesh import Mesh
from modules.refelem.Polynomials import monomial_gradients, monomials
from modules.refelem.Quadrature import QuadDomain, QuadRule, quad_rule
from modules.refelem.ReferenceBasis import P2_COEFFS

# DEFINITIONS
AFFINE_TOLERANCE: float = 1e-13


class GeometryError(ValueError):
    def __init__(self, message: str, elements: np.ndarray) -> None:
        super().__init__(message)
        self.elements: list[int] = [int(e) for e in elements]


# CLASSES
@dataclass(frozen=True, eq=False)
class ElementGeometry:
    """Quadratic maps F_T of a batch of elements.

    F_T(x) = sum_m monomial_m(x) coeffs[b, m, :], fixed by the six physical nodes.
    Every evaluator returns arrays with the element axis first: points (..., 2) -> (nb, ..., ).
    """
    element_ids: np.ndarray
    nodes: np.ndarray
    coeffs: np.ndarray = field(init=False, repr=False)
    hessian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        coeffs: np.ndarray = np.einsum('mj,bjc->bmc', P2_COEFFS, self.nodes)
        hessian: np.ndarray = np.empty((len(self.nodes), 2, 2, 2))
        hessian[:, :, 0, 0] = 2.0 * coeffs[:, 3, :]
        hessian[:, :, 0, 1] = coeffs[:, 4, :]
        hessian[:, :, 1, 0] = coeffs[:, 4, :]
        hessian[:, :, 1, 1] = 2.0 * coeffs[:, 5, :]
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'hessian', hessian)

    def __len__(self) -> int:
        return len(self.element_ids)

    def map(self, points: np.ndarray) -> np.ndarray:
        return np.einsum('...m,bmc->b...c', monomials(points), self.coeffs)

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        """DF[b, ..., c, k] = d F_c / d x_k."""
        return np.einsum('...mk,bmc->b...ck', monomial_gradients(points), self.coeffs)

    def second_derivatives(self, point_ndim: int) -> np.ndarray:
        """d DF[c, l] / d x_k as [b, (1,)*point_ndim, c, l, k]; constant over the element."""
        return self.hessian.reshape((len(self),) + (1,) * point_ndim + (2, 2, 2))

    @property
    def is_affine(self) -> np.ndarray:
        scale: np.ndarray = np.abs(self.coeffs[:, :3, :]).max(axis=(1, 2))
        return np.abs(self.coeffs[:, 3:, :]).max(axis=(1, 2)) <= AFFINE_TOLERANCE * np.maximum(scale, 1.0)


@dataclass(frozen=True, eq=False)
class PiolaEval:
    """Piola data at reference points; matrices are [..., row, col], dA[..., c, d, k] = d A[c, d] / d x_k, likewise dDF."""
    A: np.ndarray
    A_inv: np.ndarray
    detDF: np.ndarray
    DF: np.ndarray
    DF_inv: np.ndarray
    dA: np.ndarray
    dDF: np.ndarray

    @property
    def DF_invT(self) -> np.ndarray:
        return np.swapaxes(self.DF_inv, -1, -2)


def geometry_of(mesh: Mesh, element: int) -> ElementGeometry:
    return mesh_geometry(mesh, np.array([element]))


def mesh_geometry(mesh: Mesh, elements: Optional[np.ndarray] = None) -> ElementGeometry:
    if elements is None:
        elements = np.arange(mesh.num_triangles)
    elements = np.asarray(elements, dtype=np.int64)
    bad: np.ndarray = elements[(elements < 0) | (elements >= mesh.num_triangles)]
    if len(bad):
        raise ValueError(f"unknown elements {bad.tolist()}")
    return ElementGeometry(elements, mesh.element_nodes[elements])


def _determinant(matrix: np.ndarray) -> np.ndarray:
    return matrix[..., 0, 0] * matrix[..., 1, 1] - matrix[..., 0, 1] * matrix[..., 1, 0]


def _check_determinant(geom: ElementGeometry, det: np.ndarray) -> None:
    bad: np.ndarray = ~(det.reshape(len(geom), -1) > 0.0).all(axis=1)
    if np.any(bad):
        elements: np.ndarray = geom.element_ids[bad]
        raise GeometryError(f"nonpositive Jacobian determinant on elements {elements[:10].tolist()}", elements)


def piola_at(geom: ElementGeometry, points: np.ndarray) -> PiolaEval:
    """A = DF / det DF and its reference derivatives at points (..., 2).

    Raises:
        GeometryError: if det DF <= 0 at any point, naming the elements.
    """
    points = np.asarray(points, dtype=float)
    DF: np.ndarray = geom.jacobian(points)
    det: np.ndarray = _determinant(DF)
    _check_determinant(geom, det)

    DF_inv: np.ndarray = np.empty_like(DF)
    DF_inv[..., 0, 0] = DF[..., 1, 1]
    DF_inv[..., 0, 1] = -DF[..., 0, 1]
    DF_inv[..., 1, 0] = -DF[..., 1, 0]
    DF_inv[..., 1, 1] = DF[..., 0, 0]
    A_inv: np.ndarray = DF_inv.copy()
    DF_inv /= det[..., None, None]
    A: np.ndarray = DF / det[..., None, None]

    dDF: np.ndarray = geom.second_derivatives(points.ndim - 1)
    ddet: np.ndarray = (dDF[..., 0, 0, :] * DF[..., 1, 1, None] + DF[..., 0, 0, None] * dDF[..., 1, 1, :]
                        - dDF[..., 0, 1, :] * DF[..., 1, 0, None] - DF[..., 0, 1, None] * dDF[..., 1, 0, :])
    dA: np.ndarray = (dDF * det[..., None, None, None] - DF[..., None] * ddet[..., None, None, :]) / (det ** 2)[..., None, None, None]
    return PiolaEval(A, A_inv, det, DF, DF_inv, dA, np.broadcast_to(dDF, dA.shape))


def covariant_at(geom: ElementGeometry, points: np.ndarray) -> np.ndarray:
    """DF^{-T} at points (..., 2), shape (nb, ..., 2, 2)."""
    return piola_at(geom, points).DF_invT


def domain_area(mesh: Mesh, degree: int = 10) -> float:
    """Area of the curved domain, sum over elements of the integral of det DF."""
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    geom: ElementGeometry = mesh_geometry(mesh)
    det: np.ndarray = _determinant(geom.jacobian(rule.points))
    _check_determinant(geom, det)
    return float(rule.integrate(det).sum())
