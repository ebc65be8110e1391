"""Dense matrices over GF(2).

Rows are stored as Python integers used as bitsets (bit ``j`` of row ``i`` is
entry ``(i, j)``), so elimination runs as whole-row XORs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

__all__ = ["BitMatrix", "rank", "rank_of_rows", "submatrix"]


@dataclass(frozen=True)
class BitMatrix:
    """Immutable ``rows x cols`` bit matrix with bit-packed rows."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        if len(self.data) != self.rows:
            raise InputError(f"expected {self.rows} rows, got {len(self.data)}")
        limit = 1 << self.cols
        for r in self.data:
            if r < 0 or r >= limit:
                raise InputError("row has bits outside the column range")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> BitMatrix:
        """Build from nested 0/1 lists. ``cols`` is needed only when there are no rows."""
        if cols is None:
            cols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != cols:
                raise InputError("ragged row")
            word = 0
            for j, bit in enumerate(row):
                if bit not in (0, 1):
                    raise InputError(f"entry {bit!r} is not a bit")
                word |= bit << j
            packed.append(word)
        return cls(len(rows), cols, tuple(packed))

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        a = np.asarray(arr)
        if a.ndim != 2:
            raise InputError("expected a 2-d array")
        return cls.from_rows(a.astype(int).tolist(), cols=a.shape[1])

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(idx)
        return (self.data[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    def to_array(self) -> np.ndarray:
        return np.array(self.to_lists(), dtype=np.uint8).reshape(self.rows, self.cols)

    def transpose(self) -> BitMatrix:
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            j = 0
            while r:
                if r & 1:
                    out[j] |= 1 << i
                r >>= 1
                j += 1
        return BitMatrix(self.cols, self.rows, tuple(out))

    @property
    def T(self) -> BitMatrix:
        return self.transpose()

    def rank(self) -> int:
        return rank_of_rows(self.data)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> BitMatrix:
        return submatrix(self, row_idx, col_idx)


def rank_of_rows(rows: Iterable[int]) -> int:
    """GF(2) rank of a collection of bitset rows.

    Keeps a basis keyed by leading bit; each incoming row is reduced against
    it. The input is not modified.
    """
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            b = basis.get(lead)
            if b is None:
                basis[lead] = r
                break
            r ^= b
    return len(basis)


def rank(m: BitMatrix) -> int:
    return rank_of_rows(m.data)


def _check_indices(idx: Sequence[int], bound: int, what: str) -> None:
    seen = set()
    for i in idx:
        if not isinstance(i, (int, np.integer)) or not 0 <= i < bound:
            raise InputError(f"{what} index {i!r} out of range [0, {bound})")
        if i in seen:
            raise InputError(f"duplicate {what} index {i}")
        seen.add(i)


def submatrix(m: BitMatrix, row_idx: Sequence[int], col_idx: Sequence[int]) -> BitMatrix:
    """Rows ``row_idx`` and columns ``col_idx`` of ``m``, in the order given."""
    _check_indices(row_idx, m.rows, "row")
    _check_indices(col_idx, m.cols, "column")
    out = []
    for i in row_idx:
        r = m.data[i]
        word = 0
        for k, j in enumerate(col_idx):
            word |= ((r >> j) & 1) << k
        out.append(word)
    return BitMatrix(len(row_idx), len(col_idx), tuple(out))
