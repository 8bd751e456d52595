# Standard library imports
from typing import Optional

# Local application imports
from modules.Settings import Settings
from modules.assembly.InfSup import infsup_constant
from modules.assembly.StokesSolver import StokesSolution, solve_stokes
from modules.geometry.Mesh import Mesh, generate_disk_mesh
from modules.geometry.MeshIO import load_mesh, save_mesh
from modules.harness.ConvergenceStudy import convergence_study, nu_sweep
from modules.harness.ErrorNorms import ErrorReport, error_norms
from modules.harness.Problems import Problem, make_problem
from modules.harness.Reports import format_markdown, write_csv, write_markdown, write_solution_json


class Main():
    """Command dispatch for the launcher; every command returns after writing its output files."""
    def __init__(self, settings: Settings) -> None:
        settings.check_values()
        self.settings: Settings = settings

    def _log(self, message: str) -> None:
        if self.settings.verbose:
            print(f"[{self.__class__.__name__}] {message}")

    def mesh(self, n: int, out: str) -> Mesh:
        mesh: Mesh = generate_disk_mesh(n)
        save_mesh(mesh, out)
        load_mesh(out)
        self._log(f"wrote {mesh.num_triangles} triangles to {out}")
        return mesh

    def solve(self, problem: str, scheme: str, nu: float, out: Optional[str] = None, mesh_path: Optional[str] = None,
              n: Optional[int] = None) -> ErrorReport:
        if (mesh_path is None) == (n is None):
            raise ValueError("give exactly one of a mesh file or a mesh size")
        mesh: Mesh = load_mesh(mesh_path) if mesh_path is not None else generate_disk_mesh(n) # type: ignore
        prob: Problem = make_problem(problem, nu, self.settings.problem_square_psi)
        solution: StokesSolution = solve_stokes(mesh, nu, scheme, prob.forcing, self.settings)
        report: ErrorReport = error_norms(solution, prob, n=n or 0, degree=self.settings.quad_error_degree)
        if out is not None:
            write_solution_json(solution, out)
            self._log(f"wrote solution to {out}")
        print(format_markdown([report]), end='')
        return report

    def convergence(self, ns: list[int], problem: str, scheme: str, nu: float, csv: str,
                    markdown: Optional[str] = None) -> list[ErrorReport]:
        reports: list[ErrorReport] = convergence_study(ns, problem, scheme, nu, self.settings)
        write_csv(reports, csv)
        if markdown is not None:
            write_markdown(reports, markdown)
        self._log(f"wrote {len(reports)} rows to {csv}")
        print(format_markdown(reports), end='')
        return reports

    def sweep_nu(self, n: int, nus: list[float], problem: str, csv: str, markdown: Optional[str] = None) -> list[ErrorReport]:
        reports: list[ErrorReport] = nu_sweep(n, nus, problem, self.settings)
        write_csv(reports, csv)
        if markdown is not None:
            write_markdown(reports, markdown)
        self._log(f"wrote {len(reports)} rows to {csv}")
        print(format_markdown(reports), end='')
        return reports

    def infsup(self, ns: list[int], include_bubbles: bool = True) -> list[float]:
        betas: list[float] = []
        for n in ns:
            beta: float = infsup_constant(generate_disk_mesh(n), self.settings, include_bubbles)
            print(f"n={n} beta_h={beta:.6e}")
            betas.append(beta)
        return betas
