# Third-party imports
import numpy as np
from scipy import sparse

# Local application imports
from modules.geometry.ElementGeometry import ElementGeometry, mesh_geometry
from modules.refelem.ReferenceBasis import DOF_QUAD_DEGREE, BasisFamily, DofFunctional, ref_basis
from modules.spaces.LocalEval import reference_coefficients
from modules.spaces.Space import Space, SpaceKind
from modules.utils.SparseTriplets import TripletBuffer, element_blocks

# DEFINITIONS
DEFAULT_BLOCK_SIZE: int = 1024


def local_reconstruction(V: Space, geom: ElementGeometry, degree: int = DOF_QUAD_DEGREE) -> np.ndarray:
    """Reference RT1 DOFs of every local Vh basis field, (nb, 8, nloc).

    The reference field of a Vh function is a P2 vector polynomial, so degree-4 rules make the moments exact.
    """
    functional: DofFunctional = ref_basis(BasisFamily.RT1).functional(degree, degree)
    return np.swapaxes(functional.apply_coefficients(reference_coefficients(V, geom)), 1, 2)


def reconstruction_matrix(V: Space, R: Space, degree: int = DOF_QUAD_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> sparse.csr_matrix:
    """Pi_h as a sparse (R.n_dofs, V.n_dofs) matrix.

    Edge rows are written once, by the lower-id element of the edge; boundary rows stay zero.
    """
    if V.kind != SpaceKind.V or R.kind != SpaceKind.R:
        raise ValueError(f"expected (Vh, Rh), got ({V.kind.value}, {R.kind.value})")
    if V.mesh is not R.mesh:
        raise ValueError("Vh and Rh live on different meshes")
    mesh = V.mesh
    writable: np.ndarray = R.owned_local_dofs()
    writable &= ~np.isin(R.local_to_global, R.boundary_dofs)

    buffer: TripletBuffer = TripletBuffer((R.n_dofs, V.n_dofs))
    for block in element_blocks(mesh.num_triangles, block_size):
        local: np.ndarray = local_reconstruction(V, mesh_geometry(mesh, block), degree)
        buffer.add(R.local_to_global[block], R.signs[block], V.local_to_global[block], np.ones((len(block), V.num_local)),
                   local, writable[block])
    return buffer.tocsr()


def reconstruct(v: np.ndarray, V: Space, R: Space, degree: int = DOF_QUAD_DEGREE) -> np.ndarray:
    """Rh coefficients of Pi_h v for Vh coefficients v."""
    v = np.asarray(v, dtype=float)
    if v.shape != (V.n_dofs,):
        raise ValueError(f"expected {V.n_dofs} Vh coefficients, got {v.shape}")
    return reconstruction_matrix(V, R, degree) @ v
