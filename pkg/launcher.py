from argparse import ArgumentParser, ArgumentTypeError, Namespace
from os import path
from typing import NoReturn, Optional
import multiprocessing as mp
import sys

from modules.Main import Main
from modules.Settings import Settings
from modules.assembly.StokesSolver import SolverError


def int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ArgumentTypeError(f"expected a comma separated list of integers, got '{text}'")


def float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ArgumentTypeError(f"expected a comma separated list of numbers, got '{text}'")


class CliParser(ArgumentParser):
    """Exits with 1 on usage errors."""
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> ArgumentParser:
    parser: ArgumentParser = CliParser(description='curved nonconforming Stokes elements on the unit disk')
    parser.add_argument('-qa',  '--quad-a-degree',  type=int,   default=10,         help='quadrature degree of the viscous form')
    parser.add_argument('-pp',  '--paper-psi',      action='store_true', dest='square_psi', help='flow problem with the square-domain streamfunction')
    parser.add_argument('-w',   '--workers',        type=int,   default=1,          help='worker processes for convergence studies')
    parser.add_argument('-v',   '--verbose',        action='store_true',            help='print progress')
    commands = parser.add_subparsers(dest='command', required=True)

    mesh: ArgumentParser = commands.add_parser('mesh', help='write a disk mesh')
    mesh.add_argument('--n',        type=int,   required=True,  help='rings of the disk mesh')
    mesh.add_argument('--out',      type=str,   required=True,  help='mesh file')

    solve: ArgumentParser = commands.add_parser('solve', help='one solve with error norms')
    source = solve.add_mutually_exclusive_group(required=True)
    source.add_argument('--mesh',   type=str,                   help='mesh file')
    source.add_argument('--n',      type=int,                   help='rings of a generated disk mesh')
    solve.add_argument('--problem', choices=['noflow', 'flow'], default='noflow')
    solve.add_argument('--scheme',  choices=['standard', 'modified'], default='modified')
    solve.add_argument('--nu',      type=float, default=1.0)
    solve.add_argument('--out',     type=str,   default=None,   help='solution json')

    convergence: ArgumentParser = commands.add_parser('convergence', help='errors and rates over mesh sizes')
    convergence.add_argument('--ns',        type=int_list,  required=True,  help='comma separated mesh sizes')
    convergence.add_argument('--problem',   choices=['noflow', 'flow'], default='noflow')
    convergence.add_argument('--scheme',    choices=['standard', 'modified', 'both'], default='both')
    convergence.add_argument('--nu',        type=float,     default=1.0)
    convergence.add_argument('--csv',       type=str,       required=True)
    convergence.add_argument('--markdown',  type=str,       default=None)

    sweep: ArgumentParser = commands.add_parser('sweep-nu', help='errors over viscosities on one mesh, both schemes')
    sweep.add_argument('--n',           type=int,           required=True)
    sweep.add_argument('--nus',         type=float_list,    required=True,  help='comma separated viscosities')
    sweep.add_argument('--problem',     choices=['noflow', 'flow'], default='flow')
    sweep.add_argument('--csv',         type=str,           required=True)
    sweep.add_argument('--markdown',    type=str,           default=None)

    infsup: ArgumentParser = commands.add_parser('infsup', help='discrete inf-sup constants')
    infsup.add_argument('--ns',         type=int_list,      default=[4, 8, 16])
    infsup.add_argument('--no-bubbles', action='store_true',                help='drop the bubble space')
    return parser


def make_settings(args: Namespace) -> Settings:
    currentPath: str = path.dirname(path.abspath(__file__))
    settings: Settings = Settings.defaults()

    settings.quad_a_degree =        args.quad_a_degree
    settings.problem_square_psi =  args.square_psi
    settings.study_workers =        args.workers
    settings.verbose =              args.verbose

    settings.path_root =            currentPath
    settings.path_file =            path.join(currentPath, 'files')

    settings.check_values()
    return settings


def main(argv: Optional[list[str]] = None) -> int:
    args: Namespace = build_parser().parse_args(argv)
    try:
        app: Main = Main(make_settings(args))
        if args.command == 'mesh':
            app.mesh(args.n, args.out)
        elif args.command == 'solve':
            app.solve(args.problem, args.scheme, args.nu, args.out, args.mesh, args.n)
        elif args.command == 'convergence':
            app.convergence(args.ns, args.problem, args.scheme, args.nu, args.csv, args.markdown)
        elif args.command == 'sweep-nu':
            app.sweep_nu(args.n, args.nus, args.problem, args.csv, args.markdown)
        elif args.command == 'infsup':
            app.infsup(args.ns, not args.no_bubbles)
    except SolverError as e:
        print(f"[Launcher] solver failure: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"[Launcher] {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__': # For Windows compatibility with multiprocessing
    mp.freeze_support()
    sys.exit(main())
