# Standard library imports
from dataclasses import dataclass, field
from time import perf_counter
from typing import Optional
import os

# Third-party imports
import numpy as np
import psutil
from scipy import sparse
from scipy.sparse.linalg import SuperLU, norm as sparse_norm, splu

# Local application imports
from modules.Settings import Settings
from modules.assembly.Assembler import Scheme, StokesSpaces, assemble_div, assemble_rhs, assemble_viscous
from modules.geometry.Mesh import Mesh
from modules.operators.AnalyticField import AnalyticField
from modules.operators.Interpolation import interpolate_Y
from modules.operators.Reconstruction import reconstruction_matrix


class SolverError(RuntimeError):
    """Factorization, residual or eigen-solve failure, with the mesh and viscosity it happened for."""
    def __init__(self, message: str, n: Optional[int] = None, nu: Optional[float] = None,
                 num_triangles: Optional[int] = None) -> None:
        self.message: str = message
        self.n: Optional[int] = n
        self.nu: Optional[float] = nu
        self.num_triangles: Optional[int] = num_triangles
        super().__init__(message)

    def __reduce__(self):
        return (self.__class__, (self.message, self.n, self.nu, self.num_triangles))

    def __str__(self) -> str:
        context: list[str] = []
        if self.n is not None:
            context.append(f"n={self.n}")
        if self.num_triangles is not None:
            context.append(f"triangles={self.num_triangles}")
        if self.nu is not None:
            context.append(f"nu={self.nu:g}")
        return f"{self.message} ({', '.join(context)})" if context else self.message


# CLASSES
@dataclass(frozen=True, eq=False)
class StokesOperators:
    """The viscosity-independent parts of the discrete problem on one mesh."""
    spaces: StokesSpaces
    A: sparse.csr_matrix
    B: sparse.csr_matrix
    reconstruction: sparse.csr_matrix
    assembly_time: float


@dataclass(frozen=True, eq=False)
class SaddleSystem:
    """[[nu A, B^T, 0], [B, 0, L^T], [0, L, 0]] restricted to the free velocity DOFs."""
    A: sparse.csr_matrix
    B: sparse.csr_matrix
    L: np.ndarray
    F: np.ndarray
    free: np.ndarray
    nu: float

    @property
    def num_velocity(self) -> int:
        return len(self.free)

    @property
    def num_pressure(self) -> int:
        return self.B.shape[0]

    def matrix(self) -> sparse.csc_matrix:
        A_ff: sparse.csr_matrix = self.A[self.free][:, self.free]
        B_f: sparse.csr_matrix = self.B[:, self.free]
        L: sparse.csr_matrix = sparse.csr_matrix(self.L.reshape(1, -1))
        return sparse.bmat([[self.nu * A_ff, B_f.T, None],
                            [B_f, None, L.T],
                            [None, L, None]], format='csc')

    def rhs(self) -> np.ndarray:
        return np.concatenate((self.F[self.free], np.zeros(self.num_pressure + 1)))

    def split(self, x: np.ndarray, num_velocity_dofs: int) -> tuple[np.ndarray, np.ndarray, float]:
        u: np.ndarray = np.zeros(num_velocity_dofs)
        u[self.free] = x[:self.num_velocity]
        p: np.ndarray = x[self.num_velocity:self.num_velocity + self.num_pressure].copy()
        return u, p, float(x[-1])


@dataclass(frozen=True, eq=False)
class StokesSolution:
    spaces: StokesSpaces
    u: np.ndarray
    p: np.ndarray
    multiplier: float
    scheme: Scheme
    residual: float
    nu: float
    timings: dict[str, float] = field(default_factory=dict)
    memory_rss: int = 0

    @property
    def mesh(self) -> Mesh:
        return self.spaces.mesh

    @property
    def dofs(self) -> int:
        return self.spaces.V.n_dofs + self.spaces.Q.n_dofs


def relative_residual(K: sparse.spmatrix, x: np.ndarray, b: np.ndarray) -> float:
    """||K x - b||_inf / (||K||_inf ||x||_inf + ||b||_inf); zero for the trivial system."""
    r: float = float(np.max(np.abs(K @ x - b), initial=0.0))
    scale: float = sparse_norm(K, np.inf) * float(np.max(np.abs(x), initial=0.0)) + float(np.max(np.abs(b), initial=0.0))
    if scale == 0.0:
        return r
    return r / scale


class StokesSolver():
    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings: Settings = settings if settings is not None else Settings.defaults()
        self.settings.check_values()

    def _log(self, message: str) -> None:
        if self.settings.verbose:
            print(f"[{self.__class__.__name__}] {message}")

    def assemble(self, mesh: Mesh, include_bubbles: bool = True) -> StokesOperators:
        start: float = perf_counter()
        spaces: StokesSpaces = StokesSpaces.build(mesh, include_bubbles)
        block: int = self.settings.solver_block_size
        A: sparse.csr_matrix = assemble_viscous(spaces, self.settings.quad_a_degree, block)
        B: sparse.csr_matrix = assemble_div(spaces, self.settings.quad_exact_degree, block)
        P: sparse.csr_matrix = reconstruction_matrix(spaces.V, spaces.R, self.settings.quad_exact_degree, block)
        elapsed: float = perf_counter() - start
        self._log(f"assembled {spaces.V.n_dofs} velocity and {spaces.Q.n_dofs} pressure DOFs on "
                  f"{mesh.num_triangles} triangles in {elapsed:.2f}s")
        return StokesOperators(spaces, A, B, P, elapsed)

    def solve(self, operators: StokesOperators, nu: float, scheme: Scheme | str, f: AnalyticField) -> StokesSolution:
        if not nu > 0.0:
            raise ValueError(f"viscosity must be positive, got {nu}")
        scheme = Scheme(scheme)
        spaces: StokesSpaces = operators.spaces
        mesh: Mesh = spaces.mesh
        timings: dict[str, float] = {'assemble': operators.assembly_time}

        start: float = perf_counter()
        f_h: np.ndarray = interpolate_Y(f, spaces.Y, self.settings.quad_y_edge_degree, self.settings.quad_y_cell_degree,
                                        self.settings.solver_block_size)
        F: np.ndarray = assemble_rhs(spaces, f_h, scheme, operators.reconstruction, self.settings.quad_exact_degree)
        timings['rhs'] = perf_counter() - start

        system: SaddleSystem = SaddleSystem(operators.A, operators.B, spaces.Q.constraint, F, spaces.V.free_dofs, nu)
        K: sparse.csc_matrix = system.matrix()
        b: np.ndarray = system.rhs()

        start = perf_counter()
        try:
            lu: SuperLU = splu(K)
        except RuntimeError as e:
            raise SolverError(f"factorization failed: {e}", nu=nu, num_triangles=mesh.num_triangles) from e
        timings['factorize'] = perf_counter() - start

        start = perf_counter()
        x: np.ndarray = lu.solve(b)
        for _ in range(self.settings.solver_refinement_steps):
            x += lu.solve(b - K @ x)
        timings['solve'] = perf_counter() - start

        residual: float = relative_residual(K, x, b)
        if not np.isfinite(residual) or residual > self.settings.solver_tolerance:
            raise SolverError(f"relative residual {residual:.3e} above tolerance {self.settings.solver_tolerance:.1e}",
                              nu=nu, num_triangles=mesh.num_triangles)

        u, p, multiplier = system.split(x, spaces.V.n_dofs)
        memory: int = psutil.Process(os.getpid()).memory_info().rss
        self._log(f"{scheme.value} nu={nu:g}: residual {residual:.2e}, "
                  f"factorize {timings['factorize']:.2f}s, {memory / 2**20:.0f} MiB")
        return StokesSolution(spaces, u, p, multiplier, scheme, residual, nu, timings, memory)


def solve_stokes(mesh: Mesh, nu: float, scheme: Scheme | str, f: AnalyticField, settings: Optional[Settings] = None,
                 include_bubbles: bool = True) -> StokesSolution:
    """Assemble and solve the discrete Stokes problem with f_h = Pi_h^Y f.

    Raises:
        ValueError: nonpositive viscosity or invalid geometry.
        SolverError: singular factorization or residual above the tolerance.
    """
    solver: StokesSolver = StokesSolver(settings)
    return solver.solve(solver.assemble(mesh, include_bubbles), nu, scheme, f)
