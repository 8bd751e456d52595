# Standard library imports
from typing import Optional

# Third-party imports
import numpy as np
from scipy import sparse
from scipy.linalg import LinAlgError, cholesky, solve_triangular, svdvals
from scipy.sparse.linalg import ArpackError, eigsh

# Local application imports
from modules.Settings import Settings
from modules.assembly.Assembler import StokesSpaces, assemble_div, assemble_mass, assemble_viscous
from modules.assembly.StokesSolver import SolverError
from modules.geometry.Mesh import Mesh

# DEFINITIONS
NUM_EIGENVALUES: int = 4


def constraint_basis(L: np.ndarray) -> np.ndarray:
    """Columns spanning {q : L q = 0}: Z = [I; -L[:-1] / L[-1]], shape (nQ, nQ - 1)."""
    n: int = len(L)
    Z: np.ndarray = np.zeros((n, n - 1))
    Z[:-1] = np.eye(n - 1)
    Z[-1] = -L[:-1] / L[-1]
    return Z


def _dense_infsup(A: sparse.csr_matrix, B: sparse.csr_matrix, M: sparse.csr_matrix, L: np.ndarray) -> float:
    """beta_h^2 = min over L q = 0 of (q^T B A^-1 B^T q) / (q^T M q), as the smallest singular value of
    L_A^{-1} B^T Z L_M^{-T} with Cholesky factors A = L_A L_A^T and Z^T M Z = L_M L_M^T.
    """
    Z: np.ndarray = constraint_basis(L)
    if A.shape[0] < Z.shape[1]:
        return 0.0
    L_A: np.ndarray = cholesky(A.toarray(), lower=True)
    L_M: np.ndarray = cholesky(Z.T @ (M @ Z), lower=True)
    G: np.ndarray = solve_triangular(L_A, B.T @ Z, lower=True)
    G = solve_triangular(L_M, G.T, lower=True).T
    return float(np.min(svdvals(G)))


def _sparse_infsup(A: sparse.csr_matrix, B: sparse.csr_matrix, M: sparse.csr_matrix, L: np.ndarray, shift: float) -> float:
    """Shift-invert Lanczos on the bordered pencil K x = mu diag(A, M, 0) x.

    Each Schur eigenvalue lambda of B A^-1 B^T against M appears as mu^2 - mu = lambda;
    the negative mu closest to zero carries the smallest lambda.
    """
    nV, nQ = A.shape[0], B.shape[0]
    L_row: sparse.csr_matrix = sparse.csr_matrix(L.reshape(1, -1))
    K: sparse.csc_matrix = sparse.bmat([[A, B.T, None], [B, None, L_row.T], [None, L_row, None]], format='csc')
    W: sparse.csc_matrix = sparse.block_diag((A, M, sparse.csr_matrix((1, 1))), format='csc')
    k: int = min(NUM_EIGENVALUES, nV + nQ - 1)
    mu: np.ndarray = eigsh(K, k=k, M=W, sigma=shift, which='LM', return_eigenvectors=False)
    negative: np.ndarray = mu[mu < 0.0]
    if len(negative) == 0:
        raise SolverError(f"no negative pencil eigenvalue near {shift:g}")
    m: float = float(np.max(negative))
    return float(np.sqrt(m * m - m))


def infsup_constant(mesh: Mesh, settings: Optional[Settings] = None, include_bubbles: bool = True, method: str = 'auto') -> float:
    """Discrete inf-sup constant beta_h at unit viscosity on the admissible pressures L q = 0.

    method 'dense' factors the velocity block, 'sparse' runs shift-invert Lanczos, 'auto' picks
    dense up to settings.infsup_dense_limit pressure DOFs.

    Raises:
        SolverError: no free velocity DOFs, or the eigen-solve fails.
    """
    if method not in ('auto', 'dense', 'sparse'):
        raise ValueError(f"unknown inf-sup method '{method}'")
    settings = settings if settings is not None else Settings.defaults()
    spaces: StokesSpaces = StokesSpaces.build(mesh, include_bubbles)
    free: np.ndarray = spaces.V.free_dofs
    if len(free) == 0:
        raise SolverError("no free velocity DOFs, no admissible pressures can be tested", num_triangles=mesh.num_triangles)

    A: sparse.csr_matrix = assemble_viscous(spaces, settings.quad_a_degree, settings.solver_block_size)[free][:, free]
    B: sparse.csr_matrix = assemble_div(spaces, settings.quad_exact_degree, settings.solver_block_size)[:, free]
    M: sparse.csr_matrix = assemble_mass(spaces.Q, settings.quad_exact_degree, settings.solver_block_size)
    L: np.ndarray = spaces.Q.constraint

    dense: bool = method == 'dense' or (method == 'auto' and spaces.Q.n_dofs <= settings.infsup_dense_limit)
    try:
        beta: float = _dense_infsup(A, B, M, L) if dense else _sparse_infsup(A, B, M, L, settings.infsup_shift)
    except SolverError:
        raise
    except (LinAlgError, ArpackError, RuntimeError) as e:
        raise SolverError(f"inf-sup eigen-solve failed: {e}", num_triangles=mesh.num_triangles) from e
    if settings.verbose:
        print(f"[InfSup] beta_h = {beta:.6f} on {mesh.num_triangles} triangles ({'dense' if dense else 'sparse'})")
    return beta
