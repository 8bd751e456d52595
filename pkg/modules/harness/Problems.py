# Standard library imports
from dataclasses import dataclass
from enum import Enum

# Third-party imports
import numpy as np

# Local application imports
from modules.operators.AnalyticField import AnalyticField


class ProblemName(Enum):
    NOFLOW = 'noflow'
    FLOW =   'flow'


# CLASSES
@dataclass(frozen=True)
class Problem:
    """Manufactured Stokes problem: -nu lap u + grad p = f, div u = 0, u = 0 on the boundary.

    exact_grad_u is stored as [..., c, k] = d u_c / d x_k.
    """
    name: ProblemName
    nu: float
    exact_u: AnalyticField
    exact_grad_u: AnalyticField
    exact_p: AnalyticField
    forcing: AnalyticField
    square_psi: bool = False


# PRESSURE  p = 2 x^2 (1 - x) y (1 - y)
def _pressure(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return 2.0 * x**2 * (1.0 - x) * y * (1.0 - y)


def _pressure_gradient(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return np.stack((2.0 * x * (2.0 - 3.0 * x) * y * (1.0 - y),
                     2.0 * x**2 * (1.0 - x) * (1.0 - 2.0 * y)), axis=-1)


# DISK STREAMFUNCTION  psi = (1 - x^2 - y^2)^2 / 100, u = (d_y psi, -d_x psi)
def _disk_velocity(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    bump: np.ndarray = 1.0 - x**2 - y**2
    return np.stack((-0.04 * y * bump, 0.04 * x * bump), axis=-1)


def _disk_velocity_gradient(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    du1: np.ndarray = np.stack((0.08 * x * y, -0.04 * (1.0 - x**2 - 3.0 * y**2)), axis=-1)
    du2: np.ndarray = np.stack((0.04 * (1.0 - 3.0 * x**2 - y**2), -0.08 * x * y), axis=-1)
    return np.stack((du1, du2), axis=-2)


def _disk_velocity_laplacian(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return np.stack((0.32 * y, -0.32 * x), axis=-1)


# SQUARE STREAMFUNCTION  psi = g(x) g(y) / 100 with g(t) = t^2 (1 - t)^2
def _g(t: np.ndarray, order: int) -> np.ndarray:
    if order == 0:
        return t**2 * (1.0 - t)**2
    if order == 1:
        return 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    if order == 2:
        return 2.0 * (1.0 - 6.0 * t + 6.0 * t**2)
    return 12.0 * (2.0 * t - 1.0)


def _square_velocity(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return np.stack((_g(x, 0) * _g(y, 1), -_g(x, 1) * _g(y, 0)), axis=-1) / 100.0


def _square_velocity_gradient(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    du1: np.ndarray = np.stack((_g(x, 1) * _g(y, 1), _g(x, 0) * _g(y, 2)), axis=-1)
    du2: np.ndarray = np.stack((-_g(x, 2) * _g(y, 0), -_g(x, 1) * _g(y, 1)), axis=-1)
    return np.stack((du1, du2), axis=-2) / 100.0


def _square_velocity_laplacian(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return np.stack((_g(x, 2) * _g(y, 1) + _g(x, 0) * _g(y, 3),
                     -(_g(x, 3) * _g(y, 0) + _g(x, 1) * _g(y, 2))), axis=-1) / 100.0


def _zero_vector(z: np.ndarray) -> np.ndarray:
    return np.zeros(z.shape[:-1] + (2,))


def _zero_tensor(z: np.ndarray) -> np.ndarray:
    return np.zeros(z.shape[:-1] + (2, 2))


def make_problem(name: ProblemName | str, nu: float, square_psi: bool = False) -> Problem:
    """Build a manufactured problem from its name; usable inside worker processes.

    noflow: u = 0, p = psi, f = grad psi for every nu.
    flow:   u = curl of a streamfunction, p as for noflow, f = -nu lap u + grad p in closed form.
            The default streamfunction vanishes on the unit circle; square_psi selects the
            square-domain one, whose velocity does not vanish there.
    """
    name = ProblemName(name)
    if not nu > 0.0:
        raise ValueError(f"viscosity must be positive, got {nu}")
    pressure: AnalyticField = AnalyticField.scalar(_pressure, 'polynomial')

    if name == ProblemName.NOFLOW:
        return Problem(name, nu,
                       AnalyticField(_zero_vector, 1, 'polynomial'),
                       AnalyticField.tensor(_zero_tensor, 'polynomial'),
                       pressure,
                       AnalyticField(_pressure_gradient, 1, 'polynomial'),
                       square_psi)

    velocity, gradient, laplacian = (_square_velocity, _square_velocity_gradient, _square_velocity_laplacian) if square_psi \
        else (_disk_velocity, _disk_velocity_gradient, _disk_velocity_laplacian)

    def forcing(z: np.ndarray) -> np.ndarray:
        return -nu * laplacian(z) + _pressure_gradient(z)

    return Problem(name, nu,
                   AnalyticField(velocity, 1, 'polynomial'),
                   AnalyticField.tensor(gradient, 'polynomial'),
                   pressure,
                   AnalyticField(forcing, 1, 'polynomial'),
                   square_psi)
