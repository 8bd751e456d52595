import numpy as np
import pytest

from modules.geometry.ElementGeometry import mesh_geometry
from modules.geometry.Mesh import generate_disk_mesh
from modules.operators.AnalyticField import AnalyticField
from modules.operators.Interpolation import commuting_interpolate_Sigma, interpolate_Sigma, interpolate_Y, nodal_interpolate_W
from modules.operators.Reconstruction import local_reconstruction, reconstruct, reconstruction_matrix
from modules.refelem.Polynomials import divergence_coefficients, monomials
from modules.refelem.Quadrature import quad_rule
from modules.refelem.ReferenceBasis import P2_NODES
from modules.spaces.DiscreteGradient import discrete_gradient
from modules.spaces.LocalEval import evaluate_function, reference_coefficients
from modules.spaces.Space import build_R, build_Sigma, build_V, build_W, build_Y

SCALARS = {
    'one':  (lambda z: np.ones(z.shape[:-1]),          lambda z: np.zeros(z.shape)),
    'x':    (lambda z: z[..., 0],                      lambda z: np.stack((np.ones(z.shape[:-1]), np.zeros(z.shape[:-1])), axis=-1)),
    'x2':   (lambda z: z[..., 0]**2,                   lambda z: np.stack((2.0 * z[..., 0], np.zeros(z.shape[:-1])), axis=-1)),
    'xy':   (lambda z: z[..., 0] * z[..., 1],          lambda z: np.stack((z[..., 1], z[..., 0]), axis=-1)),
    'y2':   (lambda z: z[..., 1]**2 - 3.0 * z[..., 0], lambda z: np.stack((-3.0 * np.ones(z.shape[:-1]), 2.0 * z[..., 1]), axis=-1)),
}


def smooth_field():
    value = lambda z: np.stack((np.cos(z[..., 0]) * z[..., 1], np.exp(z[..., 1]) * z[..., 0]), axis=-1)
    gradient = lambda z: np.stack((np.stack((-np.sin(z[..., 0]) * z[..., 1], np.cos(z[..., 0])), axis=-1),
                                   np.stack((np.exp(z[..., 1]), np.exp(z[..., 1]) * z[..., 0]), axis=-1)), axis=-2)
    return AnalyticField(value), AnalyticField.tensor(gradient)


def l2_errors(space, coefficients, mesh, exact, exact_gradient=None):
    rule = quad_rule('triangle', 10)
    geom = mesh_geometry(mesh)
    local = evaluate_function(space, coefficients, geom, rule.points)
    x = geom.map(rule.points)
    weights = rule.weights[None, :] * local.detDF
    l2 = np.sqrt(np.einsum('bq,bqc->', weights, (local.values - exact(x))**2))
    if exact_gradient is None:
        return l2
    h1 = np.sqrt(np.einsum('bq,bqcl->', weights, (local.physical_gradients - exact_gradient(x))**2))
    return l2, h1


def test_reconstruction_preserves_owned_moments(disk4, rng):
    V, R = build_V(disk4), build_R(disk4)
    v = rng.standard_normal(V.n_dofs)
    r = reconstruct(v, V, R)
    expected = np.einsum('bij,bj->bi', local_reconstruction(V, mesh_geometry(disk4)), v[V.local_to_global])
    actual = R.signs * r[R.local_to_global]
    mask = R.owned_local_dofs() & ~np.isin(R.local_to_global, R.boundary_dofs)
    assert np.allclose(actual[mask], expected[mask], atol=1e-12)


def test_reconstruction_leaves_boundary_rows_empty(disk4):
    V, R = build_V(disk4), build_R(disk4)
    P = reconstruction_matrix(V, R)
    assert P.shape == (R.n_dofs, V.n_dofs)
    assert P[R.boundary_dofs].nnz == 0
    assert P[np.setdiff1d(np.arange(R.n_dofs), R.boundary_dofs)].getnnz(axis=1).min() > 0


def test_reconstruction_commutes_with_divergence(disk4, rng):
    V, R = build_V(disk4), build_R(disk4)
    v = rng.standard_normal(V.n_dofs)
    v[V.boundary_dofs] = 0.0
    r = reconstruct(v, V, R)
    geom = mesh_geometry(disk4)
    rule = quad_rule('triangle', 4)
    mono = monomials(rule.points)
    moments = []
    for space, coefficients in ((V, v), (R, r)):
        field = np.einsum('bimc,bi->bmc', reference_coefficients(space, geom), coefficients[space.local_to_global])
        div_hat = mono @ divergence_coefficients(field).T
        moments.append(np.einsum('q,qb,qk->bk', rule.weights, div_hat, mono[:, :3]))
    assert np.allclose(moments[0], moments[1], atol=1e-12)


def test_reconstruction_rejects_bad_input(disk4):
    V, R = build_V(disk4), build_R(disk4)
    with pytest.raises(ValueError):
        reconstruction_matrix(R, V)
    with pytest.raises(ValueError):
        reconstruct(np.zeros(V.n_dofs + 1), V, R)
    with pytest.raises(ValueError):
        reconstruction_matrix(build_V(generate_disk_mesh(2)), R)


@pytest.mark.parametrize("name", sorted(SCALARS))
def test_interpolations_commute_with_gradient(disk4, name):
    p, grad_p = SCALARS[name]
    Sigma, Y = build_Sigma(disk4), build_Y(disk4)
    lhs = interpolate_Y(AnalyticField(grad_p), Y)
    rhs = discrete_gradient(Sigma, Y) @ commuting_interpolate_Sigma(AnalyticField.scalar(p), Sigma)
    assert np.allclose(lhs, rhs, atol=1e-11)


def test_commuting_identity_for_smooth_pressure(disk4):
    p = AnalyticField.scalar(lambda z: np.sin(z[..., 0]) * np.exp(z[..., 1]))
    grad_p = AnalyticField(lambda z: np.stack((np.cos(z[..., 0]) * np.exp(z[..., 1]),
                                               np.sin(z[..., 0]) * np.exp(z[..., 1])), axis=-1))
    Sigma, Y = build_Sigma(disk4), build_Y(disk4)
    lhs = interpolate_Y(grad_p, Y)
    rhs = discrete_gradient(Sigma, Y) @ commuting_interpolate_Sigma(p, Sigma)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_nodal_sigma_interpolation(disk4, square_mesh):
    # exact for linear pressures on curved meshes
    p, grad_p = SCALARS['x']
    Sigma, Y = build_Sigma(disk4), build_Y(disk4)
    nodal = interpolate_Sigma(AnalyticField.scalar(p), Sigma)
    assert np.allclose(nodal, commuting_interpolate_Sigma(AnalyticField.scalar(p), Sigma), atol=1e-13)
    assert np.allclose(nodal[:disk4.num_vertices], disk4.vertices[:, 0])

    p, grad_p = SCALARS['xy']
    Sigma, Y = build_Sigma(square_mesh), build_Y(square_mesh)
    lhs = interpolate_Y(AnalyticField(grad_p), Y)
    assert np.allclose(lhs, discrete_gradient(Sigma, Y) @ interpolate_Sigma(AnalyticField.scalar(p), Sigma), atol=1e-12)


def test_interpolation_rejects_wrong_ranks(disk4):
    Sigma, Y = build_Sigma(disk4), build_Y(disk4)
    scalar = AnalyticField.scalar(SCALARS['x'][0])
    vector = AnalyticField(SCALARS['x'][1])
    with pytest.raises(ValueError):
        interpolate_Y(scalar, Y)
    with pytest.raises(ValueError):
        interpolate_Sigma(vector, Sigma)
    with pytest.raises(ValueError):
        interpolate_Y(vector, Sigma)
    with pytest.raises(ValueError):
        nodal_interpolate_W(scalar, disk4)


def test_y_interpolation_reproduces_constants(disk4, reference_points):
    Y = build_Y(disk4)
    y = interpolate_Y(AnalyticField.constant([0.3, -1.2]), Y)
    values = evaluate_function(Y, y, mesh_geometry(disk4), reference_points).values
    assert np.allclose(values, [0.3, -1.2], atol=1e-12)


def test_y_interpolation_converges_quadratically(disk8, disk16):
    f = AnalyticField(lambda z: np.stack((np.sin(z[..., 1]), np.cos(z[..., 0])), axis=-1))
    errors = [l2_errors(build_Y(mesh), interpolate_Y(f, build_Y(mesh)), mesh, f) for mesh in (disk8, disk16)]
    assert 3.4 <= errors[0] / errors[1] <= 4.6


def test_w_interpolation_is_exact_for_constants(disk4, reference_points):
    W = build_W(disk4)
    w = nodal_interpolate_W(AnalyticField.constant([1.0, 2.0]), disk4)
    local = evaluate_function(W, w, mesh_geometry(disk4), reference_points)
    assert np.allclose(local.values, [1.0, 2.0], atol=1e-12)
    assert np.allclose(local.physical_gradients, 0.0, atol=1e-10)
    homogeneous = nodal_interpolate_W(AnalyticField.constant([1.0, 2.0]), disk4, homogeneous=True)
    assert np.all(homogeneous[W.boundary_dofs] == 0.0)


def test_w_interpolation_reproduces_wh_functions(disk4, rng):
    W = build_W(disk4)
    w = rng.standard_normal(W.n_dofs)
    geom = mesh_geometry(disk4)
    positions = geom.map(P2_NODES).reshape(-1, 2)
    values = evaluate_function(W, w, geom, P2_NODES).values.reshape(-1, 2)

    def sampled(z):
        nearest = np.argmin(np.linalg.norm(z[..., None, :] - positions, axis=-1), axis=-1)
        return values[nearest]

    assert np.allclose(nodal_interpolate_W(AnalyticField(sampled), disk4), w, atol=1e-12)


def test_w_interpolation_rates(disk8, disk16):
    f, grad_f = smooth_field()
    errors = [l2_errors(build_W(mesh), nodal_interpolate_W(f, mesh), mesh, f, grad_f) for mesh in (disk8, disk16)]
    l2_ratio = errors[0][0] / errors[1][0]
    h1_ratio = errors[0][1] / errors[1][1]
    assert 3.4 <= h1_ratio <= 4.7
    assert l2_ratio > 6.5
