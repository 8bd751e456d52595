import json

import numpy as np
import pytest

from modules.Settings import Settings
from modules.assembly.Assembler import Scheme, StokesSpaces
from modules.assembly.StokesSolver import StokesSolution, solve_stokes
from modules.harness.ConvergenceStudy import StudyCase, convergence_study, fill_rates, nu_sweep, run_cases
from modules.harness.ErrorNorms import ErrorReport, error_norms, l2_norm, pressure_shift
from modules.harness.Problems import Problem, ProblemName, make_problem
from modules.harness.Reports import CSV_COLUMNS, format_markdown, reports_frame, write_csv, write_markdown, write_solution_json
from modules.operators.AnalyticField import AnalyticField


def circle_points(count=200):
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    return np.stack((np.cos(theta), np.sin(theta)), axis=-1)


def finite_difference(field, x, step=1e-5):
    """Central differences of field at x (..., 2), derivative axis last."""
    return np.stack([(field(x + shift) - field(x - shift)) / (2.0 * step) for shift in np.eye(2) * step], axis=-1)


def report(n, err, scheme='standard', problem='flow', nu=1.0):
    return ErrorReport(scheme, problem, nu, n, 1.0 / n, 10 * n * n, err, 4.0 * err, 2.0 * err, 0.0)


def zero_solution(mesh):
    spaces = StokesSpaces.build(mesh)
    return StokesSolution(spaces, np.zeros(spaces.V.n_dofs), np.zeros(spaces.Q.n_dofs), 0.0, Scheme.MODIFIED, 0.0, 1.0)


def test_flow_velocity_vanishes_on_circle_and_is_divergence_free(rng):
    problem = make_problem('flow', 1.0)
    circle = circle_points()
    assert np.max(np.abs(problem.exact_u(circle))) <= 1e-13
    inside = rng.uniform(-0.7, 0.7, (200, 2))
    for points in (circle, inside):
        divergence = np.trace(problem.exact_grad_u(points), axis1=-2, axis2=-1)
        assert np.max(np.abs(divergence)) <= 1e-13


def test_square_streamfunction_does_not_vanish_on_circle():
    problem = make_problem('flow', 1.0, square_psi=True)
    assert problem.square_psi
    assert np.max(np.abs(problem.exact_u(circle_points()))) > 1e-6
    divergence = np.trace(problem.exact_grad_u(circle_points()), axis1=-2, axis2=-1)
    assert np.max(np.abs(divergence)) <= 1e-13


@pytest.mark.parametrize("square_psi", [False, True])
def test_flow_fields_are_consistent(rng, square_psi):
    nu = 0.3
    problem = make_problem('flow', nu, square_psi)
    x = rng.uniform(-0.7, 0.7, (50, 2))
    assert np.allclose(problem.exact_grad_u(x), finite_difference(problem.exact_u, x), atol=1e-8)
    laplacian = np.trace(finite_difference(problem.exact_grad_u, x), axis1=-2, axis2=-1)
    grad_p = finite_difference(problem.exact_p, x)
    assert np.allclose(problem.forcing(x), -nu * laplacian + grad_p, atol=1e-7)


def test_noflow_problem():
    problem = make_problem(ProblemName.NOFLOW, 1e-3)
    x = circle_points(20) * 0.5
    assert np.all(problem.exact_u(x) == 0.0)
    assert np.all(problem.exact_grad_u(x) == 0.0)
    assert np.allclose(problem.forcing(x), finite_difference(problem.exact_p, x), atol=1e-9)
    assert problem.exact_p(np.array([0.5, 0.5])) == pytest.approx(2.0 * 0.25 * 0.5 * 0.25)


@pytest.mark.parametrize("name, nu", [('flow', 0.0), ('noflow', -1.0), ('couette', 1.0)])
def test_make_problem_rejects_bad_input(name, nu):
    with pytest.raises(ValueError):
        make_problem(name, nu)


def test_area_of_mesh_domain(disk8):
    assert l2_norm(disk8, AnalyticField.constant(1.0))**2 == pytest.approx(np.pi, abs=1e-3)


def test_pressure_shift_of_constant(disk4):
    Q = StokesSpaces.build(disk4).Q
    assert pressure_shift(AnalyticField.constant(2.5), Q) == pytest.approx(2.5, rel=1e-14)


def test_zero_solution_of_noflow_has_zero_velocity_error(disk4):
    problem = make_problem('noflow', 1.0)
    errors = error_norms(zero_solution(disk4), problem, n=4)
    assert errors.err_u_l2 == 0.0
    assert errors.err_u_h1 == 0.0
    assert errors.div_l2 == 0.0
    assert errors.err_p_l2 > 0.0
    assert (errors.n, errors.dofs, errors.scheme, errors.problem) == (4, zero_solution(disk4).dofs, 'modified', 'noflow')


def test_recentred_linear_pressure_has_zero_error(square_mesh):
    solution = zero_solution(square_mesh)
    Q = solution.spaces.Q
    linear = AnalyticField.scalar(lambda z: 3.0 * z[..., 0] - z[..., 1] + 7.0)
    zero = make_problem('noflow', 1.0)
    problem = Problem(ProblemName.NOFLOW, 1.0, zero.exact_u, zero.exact_grad_u, linear, zero.forcing)
    samples = linear(square_mesh.vertices[square_mesh.triangles]).reshape(-1)
    solution.p[:] = samples - pressure_shift(linear, Q)
    assert error_norms(solution, problem).err_p_l2 == pytest.approx(0.0, abs=1e-13)


def test_error_norms_reject_other_mesh(square_mesh, reference_mesh):
    with pytest.raises(ValueError):
        error_norms(zero_solution(square_mesh), make_problem('noflow', 1.0), mesh=reference_mesh)


def test_fill_rates():
    rows = [report(4, 1e-2), report(8, 2.5e-3), report(4, 1e-2, scheme='modified'), report(8, 1.25e-3, scheme='modified'),
            report(16, 0.0, scheme='modified')]
    filled = fill_rates(rows)
    assert filled[0].rate_u_l2 is None and filled[2].rate_u_l2 is None
    assert filled[1].rate_u_l2 == pytest.approx(2.0)
    assert filled[1].rate_u_h1 == pytest.approx(2.0)
    assert filled[3].rate_p_l2 == pytest.approx(3.0)
    assert filled[4].rate_u_l2 is None


def test_convergence_study_validates_sizes():
    for ns in ([], [4, 2], [1, 2], [4, 4]):
        with pytest.raises(ValueError):
            convergence_study(ns, 'noflow', 'standard', 1.0)


def test_convergence_study_rows_and_rates():
    reports = convergence_study([2, 4], 'noflow', 'both', 1.0)
    assert [(r.scheme, r.n) for r in reports] == [('standard', 2), ('standard', 4), ('modified', 2), ('modified', 4)]
    assert reports[0].rate_u_l2 is None and reports[2].rate_p_l2 is None
    assert reports[1].rate_p_l2 is not None and reports[1].rate_p_l2 > 0.0
    for r in reports:
        assert r.div_l2 <= 1e-11
        assert r.h > 0.0
    for r in reports[2:]:
        assert r.err_u_h1 <= 1e-10


def test_run_cases_attach_mesh_size():
    with pytest.raises(ValueError, match='n=2'):
        run_cases([StudyCase(2, 'flow', 'standard', 0.0)], Settings.defaults())


def test_workers_preserve_order():
    settings = Settings.defaults()
    settings.study_workers = 2
    cases = [StudyCase(n, 'flow', 'modified', 1.0) for n in (3, 2)]
    assert [r.n for r in run_cases(cases, settings)] == [3, 2]


def test_nu_sweep_rows():
    reports = nu_sweep(2, [1.0, 1e-2], 'flow')
    assert [(r.scheme, r.nu) for r in reports] == [('standard', 1.0), ('standard', 1e-2), ('modified', 1.0), ('modified', 1e-2)]
    assert all(r.rate_u_l2 is None for r in reports)
    with pytest.raises(ValueError):
        nu_sweep(2, [], 'flow')


def test_csv_format(tmp_path):
    rows = fill_rates([report(4, 1e-2), report(8, 2.5e-3)])
    path = tmp_path / 'out' / 'study.csv'
    write_csv(rows, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == 'scheme,problem,nu,n,h,dofs,err_u_l2,rate_u_l2,err_u_h1,rate_u_h1,err_p_l2,rate_p_l2,div_l2'
    assert len(lines) == 3
    first = lines[1].split(',')
    assert first[:2] == ['standard', 'flow']
    assert first[3] == '4' and first[5] == '160'
    assert first[CSV_COLUMNS.index('rate_u_l2')] == ''
    assert float(lines[2].split(',')[CSV_COLUMNS.index('rate_u_l2')]) == pytest.approx(2.0)

    again = tmp_path / 'again.csv'
    write_csv(rows, str(again))
    assert again.read_bytes() == path.read_bytes()


def test_markdown_table(tmp_path):
    rows = fill_rates([report(4, 1e-2), report(8, 2.5e-3)])
    table = format_markdown(rows)
    lines = table.splitlines()
    assert len(lines) == 4
    assert all(line.startswith('|') and line.endswith('|') for line in lines)
    assert len({len(line) for line in lines}) == 1
    assert 'rate_u_l2' in lines[0]
    assert '2.00' in lines[3]
    assert list(reports_frame(rows).columns) == CSV_COLUMNS

    path = tmp_path / 'study.md'
    write_markdown(rows, str(path))
    assert path.read_text() == table


def test_solution_json(disk2, tmp_path):
    problem = make_problem('flow', 1.0)
    solution = solve_stokes(disk2, 1.0, 'modified', problem.forcing)
    path = tmp_path / 'solution.json'
    write_solution_json(solution, str(path))
    data = json.loads(path.read_text())
    assert data['scheme'] == 'modified'
    assert data['dims']['V'] == data['dims']['W'] + data['dims']['Phi']
    assert data['dims']['triangles'] == disk2.num_triangles
    assert len(data['u']) == data['dims']['V'] and len(data['p']) == data['dims']['Q']
    assert data['residual'] <= 1e-11
    assert set(data['timings']) == {'assemble', 'rhs', 'factorize', 'solve'}


RATE_WINDOWS = {'rate_u_l2': (2.85, 3.3), 'rate_u_h1': (1.9, 2.3), 'rate_p_l2': (1.85, 2.15)}


@pytest.mark.slow
@pytest.mark.parametrize("problem, scheme, nu", [('noflow', 'standard', 1.0),
                                                 ('flow', 'standard', 1.0), ('flow', 'modified', 1.0),
                                                 ('flow', 'standard', 1e-7), ('flow', 'modified', 1e-7)])
def test_convergence_rates(problem, scheme, nu):
    reports = convergence_study([4, 8, 16, 32], problem, scheme, nu)
    terminal = reports[-1]
    for rate, (low, high) in RATE_WINDOWS.items():
        assert low <= getattr(terminal, rate) <= high, rate
    assert all(r.div_l2 <= 1e-11 for r in reports)


@pytest.mark.slow
def test_noflow_modified_is_exact_on_all_meshes():
    reports = convergence_study([4, 8, 16, 32], 'noflow', 'modified', 1.0)
    assert all(r.err_u_h1 <= 1e-10 and r.div_l2 <= 1e-11 for r in reports)


@pytest.mark.slow
def test_modified_scheme_independent_of_viscosity():
    reports = nu_sweep(8, [1.0, 1e-7], 'flow', scheme='modified')
    for field in ('err_u_l2', 'err_u_h1'):
        assert getattr(reports[1], field) == pytest.approx(getattr(reports[0], field), rel=5e-5)


@pytest.mark.slow
def test_pressure_robustness_sweep():
    nus = [1.0, 1e-2, 1e-4, 1e-6, 1e-8]
    reports = nu_sweep(16, nus, 'flow')
    standard, modified = reports[:len(nus)], reports[len(nus):]
    assert [r.scheme for r in standard] == ['standard'] * len(nus)

    for r in modified[1:]:
        assert r.err_u_h1 == pytest.approx(modified[0].err_u_h1, rel=1e-5)

    for coarse, fine in zip(standard[1:], standard[2:]):
        assert fine.err_u_h1 / coarse.err_u_h1 == pytest.approx(100.0, rel=0.1)
    for r in standard[2:]:
        assert r.err_p_l2 == pytest.approx(standard[1].err_p_l2, rel=1e-3)
    assert all(r.div_l2 <= 1e-11 for r in reports)


# published no-flow errors at 1/h = 8 and 16, standard scheme then modified
NOFLOW_REFERENCE = {
    ('standard', 8):  {'err_u_l2': 5.953e-06, 'err_u_h1': 4.158e-04, 'err_p_l2': 2.591e-03},
    ('standard', 16): {'err_u_l2': 7.043e-07, 'err_u_h1': 9.482e-05, 'err_p_l2': 6.450e-04},
    ('modified', 8):  {'err_p_l2': 2.160e-03},
    ('modified', 16): {'err_p_l2': 5.358e-04},
}


@pytest.mark.slow
def test_noflow_error_magnitudes():
    reports = convergence_study([8, 16], 'noflow', 'both', 1.0)
    assert {(r.scheme, r.n) for r in reports} == set(NOFLOW_REFERENCE)
    for r in reports:
        for field, expected in NOFLOW_REFERENCE[(r.scheme, r.n)].items():
            assert 0.1 * expected <= getattr(r, field) <= 10.0 * expected, (r.scheme, r.n, field)
