# Standard library imports
import signal
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass, replace
from math import log
from typing import Optional

# Local application imports
from modules.Settings import Settings
from modules.assembly.Assembler import Scheme
from modules.assembly.StokesSolver import SolverError, StokesOperators, StokesSolution, StokesSolver
from modules.geometry.Mesh import Mesh, generate_disk_mesh
from modules.harness.ErrorNorms import ErrorReport, error_norms
from modules.harness.Problems import Problem, ProblemName, make_problem

# DEFINITIONS
BOTH: str = 'both'
RATE_FIELDS: tuple[tuple[str, str], ...] = (('err_u_l2', 'rate_u_l2'), ('err_u_h1', 'rate_u_h1'), ('err_p_l2', 'rate_p_l2'))


# CLASSES
@dataclass(frozen=True)
class StudyCase:
    """One (n, problem, scheme, nu) run; everything is plain data so the case can cross process boundaries."""
    n: int
    problem: str
    scheme: str
    nu: float
    square_psi: bool = False


def ignore_keyboard_interrupt() -> None:
    signal.signal(signal.SIGINT, signal.SIG_IGN)


def run_case(case: StudyCase, settings: Settings) -> ErrorReport:
    mesh: Mesh = generate_disk_mesh(case.n)
    problem: Problem = make_problem(case.problem, case.nu, case.square_psi)
    solver: StokesSolver = StokesSolver(settings)
    solution: StokesSolution = solver.solve(solver.assemble(mesh), case.nu, case.scheme, problem.forcing)
    return error_norms(solution, problem, n=case.n, degree=settings.quad_error_degree, block_size=settings.solver_block_size)


def _with_case(error: Exception, case: StudyCase) -> Exception:
    if isinstance(error, SolverError):
        return SolverError(error.message, n=case.n, nu=case.nu, num_triangles=error.num_triangles)
    if isinstance(error, ValueError):
        return ValueError(f"n={case.n}: {error}")
    return error


def run_cases(cases: list[StudyCase], settings: Settings) -> list[ErrorReport]:
    """Runs every case, in a process pool when settings.study_workers > 1; reports come back in input order.

    Raises:
        SolverError, ValueError: from the first failing case, with its n attached.
    """
    reports: list[ErrorReport] = []
    if settings.study_workers <= 1 or len(cases) <= 1:
        for case in cases:
            try:
                reports.append(run_case(case, settings))
            except (SolverError, ValueError) as e:
                raise _with_case(e, case) from e
        return reports

    with ProcessPoolExecutor(max_workers=settings.study_workers, initializer=ignore_keyboard_interrupt) as pool:
        futures: list[Future[ErrorReport]] = [pool.submit(run_case, case, settings) for case in cases]
        for case, future in zip(cases, futures):
            try:
                reports.append(future.result())
            except (SolverError, ValueError) as e:
                for pending in futures:
                    pending.cancel()
                raise _with_case(e, case) from e
    return reports


def _rate(previous: ErrorReport, current: ErrorReport, error_field: str) -> Optional[float]:
    e0: float = getattr(previous, error_field)
    e1: float = getattr(current, error_field)
    if e0 <= 0.0 or e1 <= 0.0 or current.n == previous.n:
        return None
    return log(e0 / e1) / log(current.n / previous.n)


def fill_rates(reports: list[ErrorReport]) -> list[ErrorReport]:
    """Observed orders between consecutive rows of the same (scheme, problem, nu) series; first rows stay empty."""
    filled: list[ErrorReport] = []
    last: dict[tuple[str, str, float], ErrorReport] = {}
    for report in reports:
        key: tuple[str, str, float] = (report.scheme, report.problem, report.nu)
        previous: Optional[ErrorReport] = last.get(key)
        if previous is not None:
            report = replace(report, **{rate: _rate(previous, report, error) for error, rate in RATE_FIELDS})
        last[key] = report
        filled.append(report)
    return filled


def _schemes(scheme: Scheme | str) -> list[Scheme]:
    if scheme == BOTH:
        return [Scheme.STANDARD, Scheme.MODIFIED]
    return [Scheme(scheme)]


def _problem_args(problem: Problem | ProblemName | str, settings: Settings) -> tuple[str, bool]:
    if isinstance(problem, Problem):
        return problem.name.value, problem.square_psi
    return ProblemName(problem).value, settings.problem_square_psi


def convergence_study(ns: list[int], problem: Problem | ProblemName | str, scheme: Scheme | str, nu: float,
                      settings: Optional[Settings] = None) -> list[ErrorReport]:
    """One solve per mesh size and scheme, with rates between consecutive sizes.

    scheme may be 'both': the standard series comes first, then the modified one.
    """
    settings = settings if settings is not None else Settings.defaults()
    if len(ns) == 0:
        raise ValueError("no mesh sizes given")
    if any(n < 2 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"mesh sizes must be ascending and at least 2, got {ns}")
    name, square_psi = _problem_args(problem, settings)
    cases: list[StudyCase] = [StudyCase(n, name, s.value, nu, square_psi) for s in _schemes(scheme) for n in ns]
    return fill_rates(run_cases(cases, settings))


def nu_sweep(n: int, nus: list[float], problem: Problem | ProblemName | str, settings: Optional[Settings] = None,
             scheme: Scheme | str = BOTH) -> list[ErrorReport]:
    """Fixed mesh, one row per viscosity per scheme; the viscosity-free operators are assembled once."""
    settings = settings if settings is not None else Settings.defaults()
    if len(nus) == 0:
        raise ValueError("no viscosities given")
    name, square_psi = _problem_args(problem, settings)
    mesh: Mesh = generate_disk_mesh(n)
    solver: StokesSolver = StokesSolver(settings)
    operators: StokesOperators = solver.assemble(mesh)
    reports: list[ErrorReport] = []
    for s in _schemes(scheme):
        for nu in nus:
            case: StudyCase = StudyCase(n, name, s.value, nu, square_psi)
            problem_nu: Problem = make_problem(name, nu, square_psi)
            try:
                solution: StokesSolution = solver.solve(operators, nu, s, problem_nu.forcing)
            except (SolverError, ValueError) as e:
                raise _with_case(e, case) from e
            reports.append(error_norms(solution, problem_nu, n=n, degree=settings.quad_error_degree,
                                       block_size=settings.solver_block_size))
    return reports
