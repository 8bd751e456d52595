from __future__ import annotations

from os import path


class Settings():
    def __init__(self) -> None:
        # QUADRATURE
        self.quad_a_degree: int                 = None # type: ignore
        self.quad_exact_degree: int             = None # type: ignore
        self.quad_error_degree: int             = None # type: ignore
        self.quad_y_edge_degree: int            = None # type: ignore
        self.quad_y_cell_degree: int            = None # type: ignore

        # SOLVER
        self.solver_tolerance: float            = None # type: ignore
        self.solver_refinement_steps: int       = None # type: ignore
        self.solver_block_size: int             = None # type: ignore
        self.infsup_dense_limit: int            = None # type: ignore
        self.infsup_shift: float                = None # type: ignore

        # PROBLEMS
        self.problem_square_psi: bool           = None # type: ignore

        # STUDY
        self.study_workers: int                 = None # type: ignore

        # PATHS
        self.path_root: str                     = None # type: ignore
        self.path_file: str                     = None # type: ignore

        # OUTPUT
        self.verbose: bool                      = None # type: ignore

    def check_values(self) -> None:
        for key, value in vars(self).items():
            if value is None:
                raise ValueError(f"'{key}' is not set")
        if self.quad_a_degree < 1 or self.quad_error_degree < 1:
            raise ValueError("quadrature degrees must be positive")
        if self.solver_tolerance <= 0.0:
            raise ValueError("'solver_tolerance' must be positive")
        if self.study_workers < 1:
            raise ValueError("'study_workers' must be at least 1")

    @classmethod
    def defaults(cls) -> Settings:
        """Fully populated settings for library use and tests."""
        settings: Settings = cls()
        root: str = path.dirname(path.dirname(path.abspath(__file__)))

        settings.quad_a_degree =            10
        settings.quad_exact_degree =        4
        settings.quad_error_degree =        10
        settings.quad_y_edge_degree =       16
        settings.quad_y_cell_degree =       12

        settings.solver_tolerance =         1e-11
        settings.solver_refinement_steps =  2
        settings.solver_block_size =        1024
        settings.infsup_dense_limit =       2000
        settings.infsup_shift =             -1e-6

        settings.problem_square_psi =       False

        settings.study_workers =            1

        settings.path_root =                root
        settings.path_file =                path.join(root, 'files')

        settings.verbose =                  False
        return settings
