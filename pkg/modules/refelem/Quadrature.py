# Standard library imports
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

# Third-party imports
import numpy as np
from scipy.special import roots_jacobi, roots_legendre

# DEFINITIONS
MAX_TRIANGLE_DEGREE: int = 12
MAX_EDGE_DEGREE: int = 16


class QuadDomain(Enum):
    TRIANGLE = 'triangle'
    EDGE = 'edge'


# CLASSES
@dataclass(frozen=True)
class QuadRule:
    """Quadrature rule on the reference triangle (0,0)-(1,0)-(0,1) or on the edge parameter interval [0,1].

    Triangle points have shape (nq, 2), edge points shape (nq,).
    """
    domain: QuadDomain
    points: np.ndarray
    weights: np.ndarray
    exact_degree: int

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum of values sampled at the points, shape (..., nq) -> (...)."""
        return np.tensordot(values, self.weights, axes=([-1], [0]))


def _num_points(degree: int) -> int:
    # an m-point Gauss rule is exact up to 2m - 1
    return degree // 2 + 1


def _legendre_unit(m: int) -> tuple[np.ndarray, np.ndarray]:
    """ Gauss-Legendre points and weights on [0,1] """
    x, w = roots_legendre(m)
    return (x + 1.0) / 2.0, w / 2.0


def _collapsed_triangle(m: int) -> tuple[np.ndarray, np.ndarray]:
    """ Conical product rule: Gauss-Jacobi(1,0) in x1 absorbs the collapse factor, Gauss-Legendre along the fibres """
    xl, wl = roots_legendre(m)
    xj, wj = roots_jacobi(m, 1, 0)
    u: np.ndarray = (xj + 1.0) / 2.0
    v: np.ndarray = (xl + 1.0) / 2.0
    x1: np.ndarray = np.outer(u, np.ones_like(v)).reshape(-1)
    x2: np.ndarray = np.outer(1.0 - u, v).reshape(-1)
    # 2 for the legendre and 4 for the jacobi weight
    w: np.ndarray = np.outer(wj, wl).reshape(-1) / 8.0
    return np.stack((x1, x2), axis=-1), w


@lru_cache(maxsize=None)
def _cached_rule(domain: QuadDomain, degree: int) -> QuadRule:
    m: int = _num_points(degree)
    if domain == QuadDomain.TRIANGLE:
        points, weights = _collapsed_triangle(m)
    else:
        points, weights = _legendre_unit(m)
    points.setflags(write=False)
    weights.setflags(write=False)
    return QuadRule(domain, points, weights, 2 * m - 1)


def quad_rule(domain: QuadDomain | str, degree: int) -> QuadRule:
    """Positive-weight rule on the reference triangle or edge with exact_degree >= degree.

    Args:
        domain: QuadDomain or its string value ('triangle' / 'edge').
        degree: requested polynomial exactness.

    Raises:
        ValueError: on an unknown domain or a degree outside the supported range.
    """
    domain = QuadDomain(domain)
    limit: int = MAX_TRIANGLE_DEGREE if domain == QuadDomain.TRIANGLE else MAX_EDGE_DEGREE
    if int(degree) != degree or degree < 0 or degree > limit:
        raise ValueError(f"unsupported {domain.value} quadrature degree {degree} (supported 0..{limit})")
    return _cached_rule(domain, int(degree))
