# Third-party imports
import numpy as np
import pytest

# Local application imports
from modules.Settings import Settings
from modules.geometry.Mesh import Mesh, generate_disk_mesh
from modules.refelem.ReferenceBasis import REF_VERTICES


@pytest.fixture
def settings() -> Settings:
    return Settings.defaults()


@pytest.fixture(scope='session')
def disk2() -> Mesh:
    return generate_disk_mesh(2)


@pytest.fixture(scope='session')
def disk4() -> Mesh:
    return generate_disk_mesh(4)


@pytest.fixture(scope='session')
def disk8() -> Mesh:
    return generate_disk_mesh(8)


@pytest.fixture(scope='session')
def disk16() -> Mesh:
    return generate_disk_mesh(16)


@pytest.fixture
def reference_mesh() -> Mesh:
    """The reference triangle as a one-element mesh."""
    return Mesh(REF_VERTICES.copy(), np.array([[0, 1, 2]]))


@pytest.fixture
def square_mesh() -> Mesh:
    """Two affine triangles on [0,1]^2 sharing the diagonal (1,0)-(0,1)."""
    vertices: np.ndarray = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    return Mesh(vertices, np.array([[0, 1, 2], [3, 2, 1]]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def reference_points(rng: np.random.Generator) -> np.ndarray:
    """100 random points of the closed reference triangle."""
    points: np.ndarray = rng.random((100, 2))
    outside: np.ndarray = points.sum(axis=1) > 1.0
    points[outside] = 1.0 - points[outside][:, ::-1]
    return points
