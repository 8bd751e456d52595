# Standard library imports
from dataclasses import dataclass
from enum import Enum
from typing import Optional

# Third-party imports
import numpy as np
from scipy import sparse

# Local application imports
from modules.geometry.ElementGeometry import ElementGeometry, mesh_geometry
from modules.geometry.Mesh import Mesh
from modules.operators.Reconstruction import reconstruction_matrix
from modules.refelem.Polynomials import divergence_coefficients, monomials
from modules.refelem.Quadrature import QuadDomain, QuadRule, quad_rule
from modules.spaces.LocalEval import LocalEval, eval_local, reference_coefficients
from modules.spaces.Space import Mapping, Space, SpaceKind, build_Q, build_R, build_Sigma, build_V, build_Y
from modules.utils.SparseTriplets import TripletBuffer, element_blocks

# DEFINITIONS
A_DEGREE: int = 10
EXACT_DEGREE: int = 4
DEFAULT_BLOCK_SIZE: int = 1024


class Scheme(Enum):
    STANDARD = 'standard'
    MODIFIED = 'modified'


# CLASSES
@dataclass(frozen=True, eq=False)
class StokesSpaces:
    mesh: Mesh
    V: Space
    Q: Space
    R: Space
    Y: Space
    Sigma: Space

    @classmethod
    def build(cls, mesh: Mesh, include_bubbles: bool = True) -> 'StokesSpaces':
        return cls(mesh, build_V(mesh, include_bubbles), build_Q(mesh), build_R(mesh), build_Y(mesh), build_Sigma(mesh))


def _ones(space: Space, block: np.ndarray) -> np.ndarray:
    return np.ones((len(block), space.num_local))


def assemble_viscous(spaces: StokesSpaces, degree: int = A_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> sparse.csr_matrix:
    """Unit-viscosity form sum_T int_T grad(phi_i) : grad(phi_j) dx over all Vh DOFs (constrained ones included)."""
    V: Space = spaces.V
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    buffer: TripletBuffer = TripletBuffer((V.n_dofs, V.n_dofs))
    for block in element_blocks(spaces.mesh.num_triangles, block_size):
        local: LocalEval = eval_local(V, mesh_geometry(spaces.mesh, block), rule.points)
        weights: np.ndarray = rule.weights[None, :] * local.detDF
        matrix: np.ndarray = np.einsum('bq,bqicl,bqjcl->bij', weights, local.physical_gradients, local.physical_gradients)
        buffer.add(V.local_to_global[block], _ones(V, block), V.local_to_global[block], _ones(V, block), matrix)
    return buffer.tocsr()


def assemble_div(spaces: StokesSpaces, degree: int = EXACT_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> sparse.csr_matrix:
    """Pressure-divergence coupling b(v, q) = -int q div v dx = -int_T^ q^ div^ v^ dx^, shape (Q.n_dofs, V.n_dofs).

    The reference integrand is a polynomial of degree 2, so the degree-4 rule is exact.
    """
    V, Q = spaces.V, spaces.Q
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    mono: np.ndarray = monomials(rule.points)
    buffer: TripletBuffer = TripletBuffer((Q.n_dofs, V.n_dofs))
    for block in element_blocks(spaces.mesh.num_triangles, block_size):
        geom: ElementGeometry = mesh_geometry(spaces.mesh, block)
        div_hat: np.ndarray = np.einsum('qm,bjm->bqj', mono, divergence_coefficients(reference_coefficients(V, geom)))
        q_hat: np.ndarray = np.einsum('qm,bim->bqi', mono, reference_coefficients(Q, geom))
        matrix: np.ndarray = -np.einsum('q,bqi,bqj->bij', rule.weights, q_hat, div_hat)
        buffer.add(Q.local_to_global[block], _ones(Q, block), V.local_to_global[block], _ones(V, block), matrix)
    return buffer.tocsr()


def assemble_mass(space: Space, degree: int = A_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> sparse.csr_matrix:
    """Physical L2 Gram matrix of a space."""
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    buffer: TripletBuffer = TripletBuffer((space.n_dofs, space.n_dofs))
    for block in element_blocks(space.mesh.num_triangles, block_size):
        local: LocalEval = eval_local(space, mesh_geometry(space.mesh, block), rule.points)
        weights: np.ndarray = rule.weights[None, :] * local.detDF
        if space.mapping == Mapping.SCALAR:
            matrix: np.ndarray = np.einsum('bq,bqi,bqj->bij', weights, local.values, local.values)
        else:
            matrix = np.einsum('bq,bqic,bqjc->bij', weights, local.values, local.values)
        buffer.add(space.local_to_global[block], _ones(space, block), space.local_to_global[block], _ones(space, block), matrix)
    return buffer.tocsr()


def assemble_pairing(space: Space, Y: Space, degree: int = EXACT_DEGREE, block_size: int = DEFAULT_BLOCK_SIZE) -> sparse.csr_matrix:
    """int v . y dx for a contravariant space against Yh.

    Covariant times contravariant collapses the Jacobians: (DF^{-T} y^) . (DF v^ / J) J = y^ . v^,
    a polynomial of degree 4 integrated exactly by the degree-4 rule.
    """
    if space.mapping != Mapping.CONTRAVARIANT or Y.kind != SpaceKind.Y:
        raise ValueError(f"cannot pair {space.kind.value} with {Y.kind.value}")
    rule: QuadRule = quad_rule(QuadDomain.TRIANGLE, degree)
    mono: np.ndarray = monomials(rule.points)
    buffer: TripletBuffer = TripletBuffer((space.n_dofs, Y.n_dofs))
    for block in element_blocks(space.mesh.num_triangles, block_size):
        geom: ElementGeometry = mesh_geometry(space.mesh, block)
        v_hat: np.ndarray = np.einsum('qm,bimc->bqic', mono, reference_coefficients(space, geom))
        y_hat: np.ndarray = np.einsum('qm,bkmc->bqkc', mono, reference_coefficients(Y, geom))
        matrix: np.ndarray = np.einsum('q,bqic,bqkc->bik', rule.weights, v_hat, y_hat)
        buffer.add(space.local_to_global[block], _ones(space, block), Y.local_to_global[block], _ones(Y, block), matrix)
    return buffer.tocsr()


def assemble_rhs(spaces: StokesSpaces, f_h: np.ndarray, scheme: Scheme | str, reconstruction: Optional[sparse.csr_matrix] = None,
                 degree: int = EXACT_DEGREE) -> np.ndarray:
    """Load vector over all Vh DOFs.

    standard: F_i = int f_h . v_i dx
    modified: F_i = int f_h . Pi_h v_i dx = (P^T M_RY f_h)_i with P the reconstruction matrix
    """
    scheme = Scheme(scheme)
    f_h = np.asarray(f_h, dtype=float)
    if f_h.shape != (spaces.Y.n_dofs,):
        raise ValueError(f"expected {spaces.Y.n_dofs} Yh coefficients, got {f_h.shape}")
    if scheme == Scheme.STANDARD:
        return assemble_pairing(spaces.V, spaces.Y, degree) @ f_h
    if reconstruction is None:
        reconstruction = reconstruction_matrix(spaces.V, spaces.R, degree)
    return reconstruction.T @ (assemble_pairing(spaces.R, spaces.Y, degree) @ f_h)
