# Standard library imports
from typing import Iterator, Optional

# Third-party imports
import numpy as np
from numba import njit
from scipy import sparse


@njit
def scatter_triplets(row_map: np.ndarray, row_signs: np.ndarray, col_map: np.ndarray, col_signs: np.ndarray,
                     local: np.ndarray, row_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Element matrices (nb, nr, nc) to signed global COO triplets, element by element in input order."""
    nb, nr, nc = local.shape
    count: int = 0
    for b in range(nb):
        for i in range(nr):
            if row_mask[b, i]:
                count += nc
    rows: np.ndarray = np.empty(count, dtype=np.int64)
    cols: np.ndarray = np.empty(count, dtype=np.int64)
    vals: np.ndarray = np.empty(count, dtype=np.float64)
    k: int = 0
    for b in range(nb):
        for i in range(nr):
            if not row_mask[b, i]:
                continue
            for j in range(nc):
                rows[k] = row_map[b, i]
                cols[k] = col_map[b, j]
                vals[k] = row_signs[b, i] * col_signs[b, j] * local[b, i, j]
                k += 1
    return rows, cols, vals


def element_blocks(num_elements: int, block_size: int) -> Iterator[np.ndarray]:
    for start in range(0, num_elements, block_size):
        yield np.arange(start, min(start + block_size, num_elements))


class TripletBuffer():
    """Collects element contributions block by block and sums them into one CSR matrix."""
    def __init__(self, shape: tuple[int, int]) -> None:
        self.shape: tuple[int, int] = shape
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []

    def add(self, row_map: np.ndarray, row_signs: np.ndarray, col_map: np.ndarray, col_signs: np.ndarray,
            local: np.ndarray, row_mask: Optional[np.ndarray] = None) -> None:
        if row_mask is None:
            row_mask = np.ones(row_map.shape, dtype=np.bool_)
        rows, cols, vals = scatter_triplets(np.ascontiguousarray(row_map, dtype=np.int64),
                                            np.ascontiguousarray(row_signs, dtype=np.float64),
                                            np.ascontiguousarray(col_map, dtype=np.int64),
                                            np.ascontiguousarray(col_signs, dtype=np.float64),
                                            np.ascontiguousarray(local, dtype=np.float64),
                                            np.ascontiguousarray(row_mask, dtype=np.bool_))
        self._rows.append(rows)
        self._cols.append(cols)
        self._vals.append(vals)

    def tocsr(self) -> sparse.csr_matrix:
        if not self._rows:
            return sparse.csr_matrix(self.shape)
        rows: np.ndarray = np.concatenate(self._rows)
        cols: np.ndarray = np.concatenate(self._cols)
        vals: np.ndarray = np.concatenate(self._vals)
        return sparse.coo_matrix((vals, (rows, cols)), shape=self.shape).tocsr()
