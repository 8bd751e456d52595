# Third-party imports
import numpy as np
from scipy.special import factorial

# DEFINITIONS
# monomial basis of P2 on the reference triangle: 1, x1, x2, x1^2, x1 x2, x2^2
MONOMIAL_EXPONENTS: np.ndarray = np.array([[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]])
NUM_MONOMIALS: int = 6

# coefficient maps c -> coefficients of d/dx1 and d/dx2
DX1: np.ndarray = np.zeros((NUM_MONOMIALS, NUM_MONOMIALS))
DX1[0, 1], DX1[1, 3], DX1[2, 4] = 1.0, 2.0, 1.0
DX2: np.ndarray = np.zeros((NUM_MONOMIALS, NUM_MONOMIALS))
DX2[0, 2], DX2[1, 4], DX2[2, 5] = 1.0, 1.0, 2.0


def monomials(points: np.ndarray) -> np.ndarray:
    """Monomial values, (..., 2) -> (..., 6)."""
    x: np.ndarray = np.asarray(points, dtype=float)[..., 0]
    y: np.ndarray = np.asarray(points, dtype=float)[..., 1]
    one: np.ndarray = np.ones_like(x)
    return np.stack((one, x, y, x * x, x * y, y * y), axis=-1)


def monomial_gradients(points: np.ndarray) -> np.ndarray:
    """Monomial reference gradients, (..., 2) -> (..., 6, 2)."""
    x: np.ndarray = np.asarray(points, dtype=float)[..., 0]
    y: np.ndarray = np.asarray(points, dtype=float)[..., 1]
    zero: np.ndarray = np.zeros_like(x)
    one: np.ndarray = np.ones_like(x)
    d1: np.ndarray = np.stack((zero, one, zero, 2.0 * x, y, zero), axis=-1)
    d2: np.ndarray = np.stack((zero, zero, one, zero, x, 2.0 * y), axis=-1)
    return np.stack((d1, d2), axis=-1)


def gradient_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Scalar coefficients (..., 6) -> coefficients of the gradient field (..., 6, 2)."""
    return np.stack((coeffs @ DX1.T, coeffs @ DX2.T), axis=-1)


def divergence_coefficients(coeffs: np.ndarray) -> np.ndarray:
    """Vector field coefficients (..., 6, 2) -> coefficients of its divergence (..., 6)."""
    return coeffs[..., 0] @ DX1.T + coeffs[..., 1] @ DX2.T


def monomial_integrals() -> np.ndarray:
    """Exact reference-triangle integrals of the monomials, a! b! / (a + b + 2)!."""
    a: np.ndarray = MONOMIAL_EXPONENTS[:, 0]
    b: np.ndarray = MONOMIAL_EXPONENTS[:, 1]
    return factorial(a) * factorial(b) / factorial(a + b + 2)


def triangle_monomial_integral(a: int, b: int) -> float:
    return float(factorial(a) * factorial(b) / factorial(a + b + 2))
