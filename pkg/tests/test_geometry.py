import numpy as np
import pytest

from modules.geometry.ElementGeometry import GeometryError, covariant_at, domain_area, geometry_of, mesh_geometry, piola_at
from modules.geometry.Mesh import Mesh, MeshError, generate_disk_mesh, validate
from modules.geometry.MeshIO import load_mesh, save_mesh
from modules.refelem.Polynomials import monomial_gradients, monomials
from modules.refelem.Quadrature import quad_rule
from modules.refelem.ReferenceBasis import EDGE_NORMALS, EDGE_TANGENTS, P2_NODES, REF_VERTICES, edge_points


def inverse_map(geom, x, start=(1.0 / 3.0, 1.0 / 3.0)):
    """Newton iteration for F^{-1}(x) on a single-element geometry."""
    xhat = np.array(start, dtype=float)
    for _ in range(50):
        residual = geom.map(xhat)[0] - x
        xhat = xhat - np.linalg.solve(geom.jacobian(xhat)[0], residual)
        if np.max(np.abs(residual)) < 1e-15:
            break
    return xhat


def curved_element(mesh):
    return int(mesh.curved_triangles[0])


def test_disk_mesh_counts(disk4):
    n = 4
    assert disk4.num_triangles == 6 * n * n
    assert disk4.num_vertices == 1 + 3 * n * (n + 1)
    assert disk4.boundary_edges.sum() == 6 * n
    assert len(disk4.curved) == 6 * n
    assert disk4.domain_radius == 1.0


def test_disk_mesh_boundary_on_circle(disk4):
    boundary = disk4.vertices[disk4.boundary_vertices]
    assert np.allclose(np.hypot(boundary[:, 0], boundary[:, 1]), 1.0, atol=1e-14)
    for point in disk4.curved_midpoints.values():
        assert np.hypot(*point) == pytest.approx(1.0, abs=1e-13)


def test_disk_mesh_at_most_two_boundary_vertices(disk4):
    assert np.all(disk4.boundary_vertices[disk4.triangles].sum(axis=1) <= 2)
    assert np.all(disk4.affine_areas > 0.0)


@pytest.mark.parametrize("n", [1, 0, -3, 2.5])
def test_disk_mesh_rejects_small_n(n):
    with pytest.raises(ValueError):
        generate_disk_mesh(n)


def test_jacobian_positive_and_area_converges(disk2, disk4, disk8):
    rule = quad_rule('triangle', 10)
    for mesh in (disk4, disk8):
        assert np.all(piola_at(mesh_geometry(mesh), rule.points).detDF > 0.0)
    errors = [abs(domain_area(mesh) - np.pi) for mesh in (disk2, disk4, disk8)]
    assert errors[0] / errors[1] >= 6.0
    assert errors[1] / errors[2] >= 6.0
    assert errors[2] < 1e-3


def test_diameters_halve(disk4, disk8):
    assert 1.8 <= disk4.h / disk8.h <= 2.2


def test_interior_elements_are_affine(disk4):
    geom = mesh_geometry(disk4)
    curved = np.zeros(disk4.num_triangles, dtype=bool)
    curved[disk4.curved_triangles] = True
    assert np.all(geom.is_affine[~curved])
    assert not np.any(geom.is_affine[curved])

    straight = int(np.flatnonzero(~curved)[0])
    piola = piola_at(geometry_of(disk4, straight), quad_rule('triangle', 4).points)
    assert np.allclose(piola.A, piola.A[:, :1], atol=1e-14)
    assert np.allclose(piola.dA, 0.0, atol=1e-13)


def test_map_interpolates_nodes(disk4):
    geom = mesh_geometry(disk4)
    assert np.allclose(geom.map(P2_NODES), disk4.element_nodes, atol=1e-14)


def test_boundary_midpoint_on_circle(disk4):
    for t in disk4.curved_triangles:
        geom = geometry_of(disk4, int(t))
        for local, e in enumerate(disk4.triangle_edges[t]):
            if disk4.boundary_edges[e]:
                point = geom.map(P2_NODES[3 + local])[0]
                assert np.hypot(*point) == pytest.approx(1.0, abs=1e-13)


def test_jacobian_matches_finite_differences(disk4, reference_points):
    geom = geometry_of(disk4, curved_element(disk4))
    step = 1e-5
    points = reference_points[:20]
    DF = geom.jacobian(points)[0]
    for k in range(2):
        shift = np.zeros(2)
        shift[k] = step
        fd = (geom.map(points + shift)[0] - geom.map(points - shift)[0]) / (2.0 * step)
        assert np.allclose(DF[:, :, k], fd, atol=1e-6)


def test_piola_inverse_identity(disk4, reference_points):
    piola = piola_at(geometry_of(disk4, curved_element(disk4)), reference_points)
    product = np.einsum('bpij,bpjk->bpik', piola.A, piola.A_inv)
    assert np.allclose(product, np.eye(2), atol=1e-13)
    assert np.allclose(np.einsum('bpij,bpjk->bpik', piola.DF, piola.DF_inv), np.eye(2), atol=1e-13)


def test_piola_divergence_matches_finite_differences(disk4, rng):
    geom = geometry_of(disk4, curved_element(disk4))
    coeffs = rng.standard_normal((6, 2))

    def physical_field(x):
        xhat = inverse_map(geom, x)
        return piola_at(geom, xhat).A[0] @ (monomials(xhat) @ coeffs)

    step = 1e-5
    for xhat in (np.array([0.2, 0.3]), np.array([0.6, 0.1]), np.array([0.1, 0.7])):
        x = geom.map(xhat)[0]
        fd = 0.0
        for k in range(2):
            shift = np.zeros(2)
            shift[k] = step
            fd += (physical_field(x + shift)[k] - physical_field(x - shift)[k]) / (2.0 * step)
        div_hat = np.einsum('mk,mk->', monomial_gradients(xhat), coeffs)
        assert div_hat / piola_at(geom, xhat).detDF[0] == pytest.approx(fd, abs=1e-5)


def test_covariant_identity_on_reference_element(reference_mesh, reference_points):
    G = covariant_at(mesh_geometry(reference_mesh), reference_points)
    assert np.allclose(G, np.eye(2), atol=1e-15)


def test_covariant_maps_gradients(disk4, rng):
    geom = geometry_of(disk4, curved_element(disk4))
    coeffs = rng.standard_normal(6)

    def physical_scalar(x):
        return monomials(inverse_map(geom, x)) @ coeffs

    step = 1e-5
    xhat = np.array([0.25, 0.35])
    x = geom.map(xhat)[0]
    fd = np.array([(physical_scalar(x + s) - physical_scalar(x - s)) / (2.0 * step) for s in np.eye(2) * step])
    mapped = covariant_at(geom, xhat)[0] @ (monomial_gradients(xhat).T @ coeffs)
    assert np.allclose(mapped, fd, atol=1e-5)


def test_covariant_contravariant_pairing(disk4, rng, reference_points):
    piola = piola_at(geometry_of(disk4, curved_element(disk4)), reference_points)
    f_hat = rng.standard_normal((len(reference_points), 2))
    v_hat = rng.standard_normal((len(reference_points), 2))
    f = np.einsum('bpij,pj->bpi', piola.DF_invT, f_hat)
    v = np.einsum('bpij,pj->bpi', piola.A, v_hat)
    assert np.allclose(np.sum(f * v, axis=-1) * piola.detDF, np.sum(f_hat * v_hat, axis=-1), atol=1e-13)


def test_edge_flux_identity(disk4, rng):
    geom = geometry_of(disk4, curved_element(disk4))
    rule = quad_rule('edge', 10)
    v_coeffs = rng.standard_normal((6, 2))
    q_coeffs = rng.standard_normal(3)
    for i in range(3):
        points = edge_points(rule.points)[i]
        v_hat = monomials(points) @ v_coeffs
        q_hat = monomials(points)[:, :3] @ q_coeffs
        piola = piola_at(geom, points)
        tangent = np.einsum('pck,k->pc', piola.DF[0], EDGE_TANGENTS[i])
        normal = np.stack((tangent[:, 1], -tangent[:, 0]), axis=-1)
        physical = rule.integrate(np.einsum('pcd,pd,pc->p', piola.A[0], v_hat, normal) * q_hat)
        reference = rule.integrate(v_hat @ EDGE_NORMALS[i] * q_hat)
        assert physical == pytest.approx(reference, abs=1e-12)


def test_nonpositive_jacobian_raises():
    mesh = Mesh(REF_VERTICES.copy(), np.array([[0, 1, 2]]), {(1, 2): np.array([-0.5, -0.5])})
    with pytest.raises(GeometryError) as info:
        piola_at(mesh_geometry(mesh), quad_rule('triangle', 4).points)
    assert info.value.elements == [0]


def test_validate_rejects_clockwise_triangle():
    mesh = Mesh(REF_VERTICES.copy(), np.array([[0, 2, 1]]))
    with pytest.raises(MeshError):
        validate(mesh)


def test_mesh_rejects_curved_interior_edge(square_mesh):
    with pytest.raises(MeshError):
        Mesh(square_mesh.vertices, square_mesh.triangles, {(1, 2): np.array([0.6, 0.6])})


def test_save_load_round_trip(disk4, tmp_path):
    path = tmp_path / 'disk4.fsmesh'
    save_mesh(disk4, str(path))
    loaded = load_mesh(str(path))
    assert loaded.same_structure(disk4)
    assert loaded.domain_radius == pytest.approx(1.0)
    again = tmp_path / 'again.fsmesh'
    save_mesh(loaded, str(again))
    assert again.read_text() == path.read_text()


def test_load_without_curved_section(tmp_path):
    path = tmp_path / 'square.fsmesh'
    path.write_text("VERTICES 4\n0 0 0\n1 1 0\n2 0 1\n3 1 1\nTRIANGLES 2\n0 0 1 2\n1 3 2 1\n")
    mesh = load_mesh(str(path))
    assert mesh.num_triangles == 2
    assert mesh.curved == {}
    assert mesh.domain_radius is None
    assert np.all(mesh_geometry(mesh).is_affine)


def test_load_reports_unknown_vertex(tmp_path):
    path = tmp_path / 'bad.fsmesh'
    path.write_text("VERTICES 3\n0 0 0\n1 1 0\n2 0 1\nTRIANGLES 1\n0 0 1 7\n")
    with pytest.raises(MeshError, match='line 6'):
        load_mesh(str(path))


def test_load_reports_malformed_number(tmp_path):
    path = tmp_path / 'bad.fsmesh'
    path.write_text("VERTICES 3\n0 0 0\n1 one 0\n2 0 1\nTRIANGLES 1\n0 0 1 2\n")
    with pytest.raises(MeshError, match='line 3'):
        load_mesh(str(path))


def test_load_rejects_wrong_boundary_section(tmp_path):
    path = tmp_path / 'bad.fsmesh'
    path.write_text("VERTICES 3\n0 0 0\n1 1 0\n2 0 1\nTRIANGLES 1\n0 0 1 2\nBOUNDARY 1\n0 1\n")
    with pytest.raises(MeshError):
        load_mesh(str(path))


@pytest.mark.parametrize("triangles, reason", [("0 0 2 1\n", "counterclockwise"), ("0 0 1 1\n", "repeated vertex")])
def test_load_names_file_on_invalid_triangulation(tmp_path, triangles, reason):
    path = tmp_path / 'bad.fsmesh'
    path.write_text("VERTICES 3\n0 0 0\n1 1 0\n2 0 1\nTRIANGLES 1\n" + triangles)
    with pytest.raises(MeshError) as info:
        load_mesh(str(path))
    assert str(path) in str(info.value)
    assert reason in str(info.value)
