# Standard library imports
from dataclasses import dataclass
from typing import Callable

# Third-party imports
import numpy as np

FieldFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AnalyticField:
    """A closed-form field on points x (..., 2): rank 0 gives (...), rank 1 (..., 2), rank 2 (..., 2, 2).

    Fields are evaluable on the closed disk of radius 1.05 so that curved elements
    reaching slightly outside the unit disk can be sampled.
    """
    value: FieldFunction
    rank: int = 1
    smoothness: str = 'analytic'

    @property
    def vector(self) -> bool:
        return self.rank == 1

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        result: np.ndarray = np.asarray(self.value(x), dtype=float)
        return np.broadcast_to(result, x.shape[:-1] + (2,) * self.rank)

    @classmethod
    def constant(cls, value: np.ndarray | float) -> 'AnalyticField':
        array: np.ndarray = np.asarray(value, dtype=float)
        return cls(lambda x: np.broadcast_to(array, x.shape[:-1] + array.shape), array.ndim, 'polynomial')

    @classmethod
    def scalar(cls, value: FieldFunction, smoothness: str = 'analytic') -> 'AnalyticField':
        return cls(value, 0, smoothness)

    @classmethod
    def tensor(cls, value: FieldFunction, smoothness: str = 'analytic') -> 'AnalyticField':
        return cls(value, 2, smoothness)
