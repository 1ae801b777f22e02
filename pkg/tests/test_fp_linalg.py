"""Tests for sparse linear algebra over F_p."""

from __future__ import annotations

import numpy as np
import pytest

from koszul_truncation.errors import ShapeMismatchError
from koszul_truncation.fp_linalg import (
    PrimeField,
    SparseMatrix,
    dense_rank,
    hstack,
    image_rank_through,
    kernel_basis,
    kernel_dim,
    multiply,
    rank,
    rank_modulo,
)


class TestPrimeField:
    def test_rejects_composite(self) -> None:
        with pytest.raises(ValueError, match="not prime"):
            PrimeField(32001)

    def test_inverse(self) -> None:
        field = PrimeField(7)
        assert field.inverse(3) * 3 % 7 == 1
        assert field.reduce(-1) == 6


class TestSparseMatrix:
    def test_from_entries_sums_and_drops_zeros(self) -> None:
        m = SparseMatrix.from_entries(2, 2, [(0, 0, 3), (0, 0, 4), (1, 1, 1)], p=7)
        assert m.entries == ((1, 1, 1),)

    def test_out_of_range_entry(self) -> None:
        with pytest.raises(ShapeMismatchError):
            SparseMatrix.from_entries(2, 2, [(2, 0, 1)])

    def test_dense_round_trip(self) -> None:
        dense = [[1, 0, 2], [0, 0, 5]]
        assert SparseMatrix.from_dense(dense).to_dense().tolist() == dense

    def test_transpose(self) -> None:
        m = SparseMatrix.from_dense([[1, 2, 0]])
        assert m.transpose().shape == (3, 1)
        assert m.transpose().to_dense().tolist() == [[1], [2], [0]]

    def test_multiply(self) -> None:
        a = SparseMatrix.from_dense([[1, 1], [0, 1]])
        b = SparseMatrix.from_dense([[1, 0], [1, 1]])
        assert multiply(a, b).to_dense().tolist() == [[2, 1], [1, 1]]

    def test_multiply_shape_mismatch(self) -> None:
        with pytest.raises(ShapeMismatchError):
            multiply(SparseMatrix.zero(2, 3), SparseMatrix.zero(2, 3))

    def test_hstack(self) -> None:
        left = SparseMatrix.identity(2)
        right = SparseMatrix.from_dense([[5], [6]])
        assert hstack(left, right).to_dense().tolist() == [[1, 0, 5], [0, 1, 6]]


class TestRank:
    def test_small_cases(self) -> None:
        assert rank(SparseMatrix.zero(3, 4)) == 0
        assert rank(SparseMatrix.identity(5)) == 5
        assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1

    def test_characteristic_matters(self) -> None:
        m = [[2, 1], [1, 2]]
        assert rank(SparseMatrix.from_dense(m, p=3)) == 1
        assert rank(SparseMatrix.from_dense(m, p=5)) == 2

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_dense_oracle(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        rows, cols = rng.integers(1, 41, size=2)
        dense = rng.integers(-3, 4, size=(rows, cols)) * (rng.random((rows, cols)) < 0.4)
        matrix = SparseMatrix.from_dense(dense.tolist())
        expected = dense_rank(dense.tolist())
        assert rank(matrix) == expected
        assert rank(matrix.transpose()) == expected
        shuffled = dense[rng.permutation(rows)][:, rng.permutation(cols)]
        assert rank(SparseMatrix.from_dense(shuffled.tolist())) == expected

    def test_input_unchanged(self) -> None:
        m = SparseMatrix.from_dense([[1, 1], [1, 1]])
        before = m.entries
        rank(m)
        assert m.entries == before


class TestKernel:
    def test_kernel_dim(self) -> None:
        m = SparseMatrix.from_dense([[1, 1, 0], [0, 0, 1]])
        assert kernel_dim(m) == 1

    def test_kernel_basis_is_annihilated(self) -> None:
        m = SparseMatrix.from_dense([[1, 2, 3, 0], [0, 1, 1, 1]])
        basis = kernel_basis(m)
        assert len(basis) == 2
        for vec in basis:
            column = SparseMatrix.from_columns(4, [vec])
            assert multiply(m, column).nnz == 0

    def test_rank_modulo(self) -> None:
        base = SparseMatrix.from_dense([[1], [0], [0]])
        columns = SparseMatrix.from_dense([[1, 0], [0, 1], [0, 0]])
        assert rank_modulo(columns, base) == 1
        assert rank_modulo(columns, SparseMatrix.zero(3, 0)) == 2

    def test_image_rank_through(self) -> None:
        first = SparseMatrix.from_dense([[1, 0], [0, 1], [0, 0]])
        second = SparseMatrix.from_dense([[0, 0, 1]])
        assert image_rank_through(first, second) == 0
