# Standard library imports
from dataclasses import dataclass
from typing import Optional

# Third-party imports
import numpy as np

# Local application imports
from modules.geometry.ElementGeometry import ElementGeometry, PiolaEval, geometry_of, piola_at
from modules.refelem.Polynomials import divergence_coefficients, monomial_gradients, monomials
from modules.refelem.ReferenceBasis import P2_NODES, BasisFamily, ref_basis
from modules.spaces.Space import Mapping, Space, SpaceKind


# CLASSES
@dataclass(frozen=True, eq=False)
class LocalEval:
    """Physical basis data on a batch of elements at reference points (..., 2).

    Vector families: values [b, ..., i, c], physical_gradients [b, ..., i, c, l], divergences [b, ..., i].
    Scalar families: values [b, ..., i], physical_gradients [b, ..., i, l], divergences None.
    Signs of the global basis are already applied.
    """
    values: np.ndarray
    physical_gradients: np.ndarray
    divergences: Optional[np.ndarray]
    reference_values: np.ndarray
    detDF: np.ndarray


def w_reference_coefficients(piola_nodes: PiolaEval) -> np.ndarray:
    """Element-specific reference fields of Wh: w_hat_{j,d} = phi_j A(a_j)^{-1} e_d, shape (nb, 12, 6, 2)."""
    p2: np.ndarray = ref_basis(BasisFamily.P2_LAGRANGE).coeffs
    coeffs: np.ndarray = np.einsum('jm,bjcd->bjdmc', p2, piola_nodes.A_inv)
    return coeffs.reshape(coeffs.shape[0], 12, 6, 2)


def reference_coefficients(space: Space, geom: ElementGeometry) -> np.ndarray:
    """Signed monomial coefficients of every local basis function on the reference element.

    Returns (nb, nloc, 6, 2) for vector spaces and (nb, nloc, 6) for scalar ones.
    """
    nb: int = len(geom)
    if space.kind == SpaceKind.W:
        coeffs: np.ndarray = w_reference_coefficients(piola_at(geom, P2_NODES))
    elif space.kind == SpaceKind.PHI:
        coeffs = np.broadcast_to(ref_basis(BasisFamily.FS_BUBBLE).coeffs, (nb, 2, 6, 2))
    elif space.kind == SpaceKind.V:
        coeffs = np.concatenate([reference_coefficients(c, geom) for c in space.components], axis=1)
    elif space.kind == SpaceKind.R:
        coeffs = np.broadcast_to(ref_basis(BasisFamily.RT1).coeffs, (nb, 8, 6, 2))
    elif space.kind == SpaceKind.Y:
        coeffs = np.broadcast_to(ref_basis(BasisFamily.NED1_DEG2).coeffs, (nb, 8, 6, 2))
    elif space.kind == SpaceKind.Q:
        coeffs = np.broadcast_to(ref_basis(BasisFamily.P1).coeffs, (nb, 3, 6))
    else:
        coeffs = np.broadcast_to(ref_basis(BasisFamily.P2_LAGRANGE).coeffs, (nb, 6, 6))
    signs: np.ndarray = space.signs[geom.element_ids]
    if coeffs.ndim == 4:
        return coeffs * signs[:, :, None, None]
    return coeffs * signs[:, :, None]


def _vector_eval(space: Space, piola: PiolaEval, coeffs: np.ndarray, points: np.ndarray) -> LocalEval:
    vhat: np.ndarray = np.einsum('...m,bimc->b...ic', monomials(points), coeffs)
    dvhat: np.ndarray = np.einsum('...mk,bimc->b...ick', monomial_gradients(points), coeffs)

    if space.mapping == Mapping.CONTRAVARIANT:
        values: np.ndarray = np.einsum('b...cd,b...id->b...ic', piola.A, vhat)
        dref: np.ndarray = (np.einsum('b...cdk,b...id->b...ick', piola.dA, vhat)
                            + np.einsum('b...cd,b...idk->b...ick', piola.A, dvhat))
        div_hat: np.ndarray = np.einsum('...m,bim->b...i', monomials(points), divergence_coefficients(coeffs))
        divergences: Optional[np.ndarray] = div_hat / piola.detDF[..., None]
    else:
        G: np.ndarray = piola.DF_invT
        # d(DF^{-1})/dx_k = -DF^{-1} (dDF/dx_k) DF^{-1}
        dinv: np.ndarray = -np.einsum('b...ij,b...jlk,b...lm->b...imk', piola.DF_inv, piola.dDF, piola.DF_inv)
        dG: np.ndarray = np.swapaxes(dinv, -3, -2)
        values = np.einsum('b...cd,b...id->b...ic', G, vhat)
        dref = (np.einsum('b...cdk,b...id->b...ick', dG, vhat)
                + np.einsum('b...cd,b...idk->b...ick', G, dvhat))
        divergences = None
    gradients: np.ndarray = np.einsum('b...ick,b...kl->b...icl', dref, piola.DF_inv)
    return LocalEval(values, gradients, divergences, vhat, piola.detDF)


def eval_local(space: Space, element: int | ElementGeometry, points: np.ndarray) -> LocalEval:
    """Physical values, gradients and divergences of the local basis of space at reference points.

    Raises:
        GeometryError: propagated from the element maps.
    """
    geom: ElementGeometry = geometry_of(space.mesh, element) if isinstance(element, (int, np.integer)) else element
    points = np.asarray(points, dtype=float)
    coeffs: np.ndarray = reference_coefficients(space, geom)
    piola: PiolaEval = piola_at(geom, points)
    if space.mapping != Mapping.SCALAR:
        return _vector_eval(space, piola, coeffs, points)
    qhat: np.ndarray = np.einsum('...m,bim->b...i', monomials(points), coeffs)
    dqhat: np.ndarray = np.einsum('...mk,bim->b...ik', monomial_gradients(points), coeffs)
    gradients: np.ndarray = np.einsum('b...ik,b...kl->b...il', dqhat, piola.DF_inv)
    return LocalEval(qhat, gradients, None, qhat, piola.detDF)


def evaluate_function(space: Space, coefficients: np.ndarray, geom: ElementGeometry, points: np.ndarray) -> LocalEval:
    """A global function of space on the elements of geom: same layout as LocalEval without the basis axis."""
    local: LocalEval = eval_local(space, geom, points)
    c: np.ndarray = np.asarray(coefficients, dtype=float)[space.local_to_global[geom.element_ids]]
    if space.mapping == Mapping.SCALAR:
        return LocalEval(np.einsum('b...i,bi->b...', local.values, c),
                         np.einsum('b...il,bi->b...l', local.physical_gradients, c),
                         None,
                         np.einsum('b...i,bi->b...', local.reference_values, c),
                         local.detDF)
    divergences: Optional[np.ndarray] = None
    if local.divergences is not None:
        divergences = np.einsum('b...i,bi->b...', local.divergences, c)
    return LocalEval(np.einsum('b...ic,bi->b...c', local.values, c),
                     np.einsum('b...icl,bi->b...cl', local.physical_gradients, c),
                     divergences,
                     np.einsum('b...ic,bi->b...c', local.reference_values, c),
                     local.detDF)
