# Third-party imports
import numpy as np
from scipy import sparse

# Local application imports
from modules.refelem.ReferenceBasis import BasisFamily, p2_gradient_coefficients, ref_basis
from modules.spaces.Space import Space, SpaceKind
from modules.utils.SparseTriplets import TripletBuffer


def local_gradient_matrix() -> np.ndarray:
    """Nedelec DOFs of the reference gradients of the six P2 Lagrange functions, (8, 6).

    Covariant mapping sends grad(sigma) to DF^{-T} grad_hat(sigma_hat), so the matrix is element independent.
    """
    functional = ref_basis(BasisFamily.NED1_DEG2).functional()
    return functional.apply_coefficients(p2_gradient_coefficients()).T


def discrete_gradient(Sigma: Space, Y: Space) -> sparse.csr_matrix:
    """Yh coefficients of grad(sigma_h) for sigma_h in Sigma_h, as a (Y.n_dofs, Sigma.n_dofs) matrix."""
    if Sigma.kind != SpaceKind.SIGMA or Y.kind != SpaceKind.Y:
        raise ValueError(f"expected (Sigmah, Yh), got ({Sigma.kind.value}, {Y.kind.value})")
    n: int = Y.mesh.num_triangles
    local: np.ndarray = np.broadcast_to(local_gradient_matrix(), (n, 8, 6))
    buffer: TripletBuffer = TripletBuffer((Y.n_dofs, Sigma.n_dofs))
    buffer.add(Y.local_to_global, Y.signs, Sigma.local_to_global, Sigma.signs, local, Y.owned_local_dofs())
    return buffer.tocsr()
