"""Sparse exact linear algebra over a prime field F_p."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from koszul_truncation.errors import ShapeMismatchError

logger = logging.getLogger(__name__)

DEFAULT_PRIME = 32003


@dataclass(frozen=True)
class PrimeField:
    """The field F_p."""

    p: int = DEFAULT_PRIME

    def __post_init__(self) -> None:
        if self.p < 2 or any(self.p % k == 0 for k in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"{self.p} is not prime")

    def reduce(self, value: int) -> int:
        return value % self.p

    def inverse(self, value: int) -> int:
        return pow(value % self.p, -1, self.p)


@dataclass(frozen=True)
class SparseMatrix:
    """A rows x cols matrix over F_p stored as (row, col, value) triples.

    Entries are reduced mod p, nonzero and without duplicate positions.
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...] = ()
    p: int = DEFAULT_PRIME

    @classmethod
    def from_entries(
        cls,
        rows: int,
        cols: int,
        entries: Iterable[tuple[int, int, int]],
        p: int = DEFAULT_PRIME,
    ) -> SparseMatrix:
        """Build a matrix, summing repeated positions and dropping zeros."""
        acc: dict[tuple[int, int], int] = {}
        for r, c, v in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeMismatchError(f"Entry ({r}, {c}) outside a {rows}x{cols} matrix")
            acc[(r, c)] = (acc.get((r, c), 0) + v) % p
        return cls(rows, cols, tuple(sorted((r, c, v) for (r, c), v in acc.items() if v)), p)

    @classmethod
    def from_columns(
        cls,
        rows: int,
        columns: Iterable[dict[int, int]],
        p: int = DEFAULT_PRIME,
    ) -> SparseMatrix:
        cols = list(columns)
        return cls.from_entries(
            rows, len(cols), ((r, c, v) for c, col in enumerate(cols) for r, v in col.items()), p
        )

    @classmethod
    def identity(cls, size: int, p: int = DEFAULT_PRIME) -> SparseMatrix:
        return cls(size, size, tuple((i, i, 1) for i in range(size)), p)

    @classmethod
    def zero(cls, rows: int, cols: int, p: int = DEFAULT_PRIME) -> SparseMatrix:
        return cls(rows, cols, (), p)

    @classmethod
    def from_dense(cls, array: np.ndarray | list, p: int = DEFAULT_PRIME) -> SparseMatrix:
        dense = np.asarray(array, dtype=object)
        if dense.ndim != 2:
            raise ShapeMismatchError("Expected a two-dimensional array")
        rows, cols = dense.shape
        return cls.from_entries(
            rows, cols, ((r, c, int(dense[r, c])) for r in range(rows) for c in range(cols)), p
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def transpose(self) -> SparseMatrix:
        return SparseMatrix(
            self.cols, self.rows, tuple(sorted((c, r, v) for r, c, v in self.entries)), self.p
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=object)
        for r, c, v in self.entries:
            dense[r, c] = v
        return dense

    def row_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.rows)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def column_dicts(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [{} for _ in range(self.cols)]
        for r, c, v in self.entries:
            out[c][r] = v
        return out


def multiply(left: SparseMatrix, right: SparseMatrix) -> SparseMatrix:
    """left @ right."""
    if left.cols != right.rows:
        raise ShapeMismatchError(f"Cannot multiply {left.shape} by {right.shape}")
    if left.p != right.p:
        raise ShapeMismatchError(f"Matrices over F_{left.p} and F_{right.p}")
    right_rows = right.row_dicts()
    acc: dict[tuple[int, int], int] = {}
    for r, k, v in left.entries:
        for c, w in right_rows[k].items():
            acc[(r, c)] = (acc.get((r, c), 0) + v * w) % left.p
    return SparseMatrix.from_entries(
        left.rows, right.cols, ((r, c, v) for (r, c), v in acc.items()), left.p
    )


def hstack(*blocks: SparseMatrix, rows: int | None = None, p: int | None = None) -> SparseMatrix:
    """Place matrices with equal row counts side by side."""
    if not blocks:
        return SparseMatrix.zero(rows or 0, 0, p or DEFAULT_PRIME)
    height = blocks[0].rows
    if any(b.rows != height for b in blocks):
        raise ShapeMismatchError("hstack needs equal row counts")
    entries: list[tuple[int, int, int]] = []
    offset = 0
    for block in blocks:
        entries.extend((r, c + offset, v) for r, c, v in block.entries)
        offset += block.cols
    return SparseMatrix(height, offset, tuple(sorted(entries)), blocks[0].p)


@dataclass
class _Eliminator:
    """Working copy for sparse elimination; the input matrix is never touched."""

    p: int
    rows: dict[int, dict[int, int]]
    col_index: dict[int, set[int]] = field(default_factory=dict)

    @classmethod
    def of(cls, matrix: SparseMatrix) -> _Eliminator:
        rows = {i: r for i, r in enumerate(matrix.row_dicts()) if r}
        col_index: dict[int, set[int]] = {}
        for i, row in rows.items():
            for c in row:
                col_index.setdefault(c, set()).add(i)
        return cls(matrix.p, rows, col_index)

    def _pick_pivot(self) -> tuple[int, int]:
        # Markowitz: sparsest row, then within it the sparsest column.
        row_id = min(self.rows, key=lambda i: (len(self.rows[i]), i))
        row = self.rows[row_id]
        col = min(row, key=lambda c: (len(self.col_index[c]), c))
        return row_id, col

    def _drop(self, row_id: int) -> dict[int, int]:
        row = self.rows.pop(row_id)
        for c in row:
            bucket = self.col_index[c]
            bucket.discard(row_id)
            if not bucket:
                del self.col_index[c]
        return row

    def run(self) -> int:
        rank = 0
        p = self.p
        while self.rows:
            row_id, col = self._pick_pivot()
            pivot_row = self._drop(row_id)
            inv = pow(pivot_row[col], -1, p)
            for other in sorted(self.col_index.get(col, ())):
                target = self.rows[other]
                factor = target[col] * inv % p
                for c, v in pivot_row.items():
                    new = (target.get(c, 0) - factor * v) % p
                    if new:
                        if c not in target:
                            self.col_index.setdefault(c, set()).add(other)
                        target[c] = new
                    elif c in target:
                        del target[c]
                        bucket = self.col_index[c]
                        bucket.discard(other)
                        if not bucket:
                            del self.col_index[c]
                if not target:
                    del self.rows[other]
            rank += 1
        return rank


def rank(matrix: SparseMatrix) -> int:
    """Rank over F_p by sparse Gaussian elimination with Markowitz-style pivoting."""
    if not matrix.entries:
        return 0
    return _Eliminator.of(matrix).run()


def kernel_dim(matrix: SparseMatrix) -> int:
    return matrix.cols - rank(matrix)


def kernel_basis(matrix: SparseMatrix) -> list[dict[int, int]]:
    """A basis of the null space as sparse column vectors {index: value}."""
    p = matrix.p
    pivots: dict[int, dict[int, int]] = {}  # pivot column -> reduced row with leading 1
    for row in matrix.row_dicts():
        row = dict(row)
        for pc, prow in pivots.items():
            if pc in row:
                f = row[pc]
                for c, v in prow.items():
                    new = (row.get(c, 0) - f * v) % p
                    if new:
                        row[c] = new
                    else:
                        row.pop(c, None)
        if not row:
            continue
        lead = min(row)
        inv = pow(row[lead], -1, p)
        row = {c: v * inv % p for c, v in row.items()}
        for pc, prow in pivots.items():
            if lead in prow:
                f = prow[lead]
                for c, v in row.items():
                    new = (prow.get(c, 0) - f * v) % p
                    if new:
                        prow[c] = new
                    else:
                        prow.pop(c, None)
        pivots[lead] = row
    basis = []
    for free in range(matrix.cols):
        if free in pivots:
            continue
        vec = {free: 1}
        for pc, prow in pivots.items():
            if free in prow:
                vec[pc] = (-prow[free]) % p
        basis.append(vec)
    return basis


def image_rank_through(first: SparseMatrix, second: SparseMatrix) -> int:
    """rank(second @ first): the rank of 'apply first, then second'."""
    if first.rows != second.cols:
        raise ShapeMismatchError(f"Cannot compose {first.shape} with {second.shape}")
    return rank(multiply(second, first))


def rank_modulo(columns: SparseMatrix, base: SparseMatrix) -> int:
    """dim((span(base) + span(columns)) / span(base))."""
    if columns.rows != base.rows:
        raise ShapeMismatchError(f"Column spaces in F_p^{columns.rows} and F_p^{base.rows}")
    if not base.entries:
        return rank(columns)
    return rank(hstack(base, columns)) - rank(base)


def dense_rank(array: np.ndarray | list, p: int = DEFAULT_PRIME) -> int:
    """Row-echelon rank of a dense integer array mod p (reference implementation)."""
    work = np.array(array, dtype=object) % p
    if work.size == 0:
        return 0
    m, n = work.shape
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if work[i, c] % p), None)
        if pivot is None:
            continue
        if pivot != r:
            work[[r, pivot], :] = work[[pivot, r], :]
        work[r, :] = (work[r, :] * pow(int(work[r, c]), -1, p)) % p
        for i in range(r + 1, m):
            if work[i, c] % p:
                work[i, :] = (work[i, :] - work[i, c] * work[r, :]) % p
        r += 1
        if r == m:
            break
    return r
