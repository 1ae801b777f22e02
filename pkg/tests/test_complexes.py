"""Tests for graded complexes, their homology and cones."""

from __future__ import annotations

from dataclasses import replace

import pytest

from koszul_truncation.builders import (
    WeightedSystem,
    co_koszul,
    co_quotient_L,
    koszul,
    quotient_L,
    sub_koszul,
)
from koszul_truncation.complexes import (
    UNSTABLE,
    ComplexSpec,
    DiffEntry,
    Orientation,
    Slot,
    annihilation_check,
    check_d_squared,
    check_d_squared_symbolic,
    euler_by_terms,
    euler_characteristic,
    homology_dims,
    mapping_cone,
    ses_check,
    slice_complex,
    slot_length,
)
from koszul_truncation.errors import ConstructionError, NotFiniteLengthError, ShapeMismatchError
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    parse_ideal,
    parse_monomial,
)

R = CyclicModule.free(2)
M = CyclicModule(parse_ideal("[x^2, x*y]", 2))


def mono(text: str) -> Monomial:
    return parse_monomial(text, 2)


def worked_system() -> WeightedSystem:
    return WeightedSystem((mono("x^2"), mono("y^3")), (2, 3), MonomialIdeal.maximal(2))


class TestComplexSpec:
    def test_rejects_wrong_multiplier_degree(self) -> None:
        unit = MonomialIdeal.unit(2)
        components = {0: (Slot((), unit, 0),), 1: (Slot((0,), unit, 2),)}
        with pytest.raises(ConstructionError, match="has degree 1, expected 2"):
            ComplexSpec(
                Orientation.CHAIN, R, components, {1: (DiffEntry(0, 0, 1, mono("x")),)}
            )

    def test_rejects_bad_sign(self) -> None:
        unit = MonomialIdeal.unit(2)
        components = {0: (Slot((), unit, 0),), 1: (Slot((0,), unit, 1),)}
        with pytest.raises(ConstructionError, match="Sign"):
            ComplexSpec(
                Orientation.CHAIN, R, components, {1: (DiffEntry(0, 0, 2, mono("x")),)}
            )

    def test_slice_dims_of_koszul(self) -> None:
        spec = koszul([mono("x^2"), mono("y^3")], R)
        # degree 5: R_5 at index 0, R_3 + R_2 at index 1, R_0 at index 2
        assert [spec.slice_dim(i, 5) for i in (0, 1, 2)] == [6, 7, 1]

    def test_quotient_slices_drop_coefficient(self) -> None:
        spec = quotient_L(worked_system(), R, 3)
        # slot {} is R/m^3, so degrees 0..2 only
        assert [spec.slice_dim(0, e) for e in range(4)] == [1, 2, 3, 0]

    def test_slice_complex(self) -> None:
        spec = koszul([mono("x"), mono("y")], R)
        matrices = slice_complex(spec, 1)
        assert matrices[1].shape == (2, 2)
        assert matrices[2].shape == (2, 0)


class TestHomology:
    def test_koszul_on_complete_intersection(self) -> None:
        table = homology_dims(koszul([mono("x^2"), mono("y^3")], R))
        assert table.stable
        assert [table.dim(0, e) for e in range(5)] == [1, 2, 2, 1, 0]
        assert table.total_length(1) == 0
        assert table.total_length(2) == 0
        assert table.euler_characteristic() == 6

    def test_koszul_with_nonzero_first_homology(self) -> None:
        table = homology_dims(koszul([mono("y")], M))
        assert table.rows() == [(0, 0, 1), (0, 1, 1), (1, 2, 1)]
        assert table.euler_characteristic() == 1

    def test_unstable_at_small_cap(self) -> None:
        spec = koszul([mono("x^2"), mono("y^3")], R)
        table = homology_dims(spec, degree_cap=2, window=4)
        assert not table.stable
        assert table.total_length(0) == UNSTABLE
        assert euler_characteristic(spec, 2, 4) == UNSTABLE

    def test_cochain_koszul_top_cohomology(self) -> None:
        table = homology_dims(co_koszul([mono("x^2"), mono("y^3")], R))
        assert table.total_length(0) == 0
        assert table.total_length(2) == 6

    def test_d_squared_vanishes(self) -> None:
        ws = worked_system()
        for spec in (sub_koszul(ws, R, 4), quotient_L(ws, M, 4), co_quotient_L(ws, R, 1)):
            assert check_d_squared(spec, spec.degree_range(12)) == []
            assert check_d_squared_symbolic(spec) == []

    def test_symbolic_d_squared_catches_sign_error(self) -> None:
        spec = koszul([mono("x"), mono("y")], R)
        top = tuple(replace(e, sign=1) for e in spec.diffs[2])
        broken = ComplexSpec(spec.orientation, R, spec.components, {**spec.diffs, 2: top})
        assert check_d_squared_symbolic(broken) == [(2, 0, 0)]


class TestTermwise:
    def test_slot_lengths_of_co_quotient(self) -> None:
        spec = co_quotient_L(worked_system(), R, 0)
        lengths = {
            s.label: slot_length(spec, s) for slots in spec.components.values() for s in slots
        }
        assert lengths == {(): 0, (0,): 3, (1,): 6, (0, 1): 15}
        assert euler_by_terms(spec) == 0 - 3 - 6 + 15

    def test_quotient_euler_by_terms(self) -> None:
        assert euler_by_terms(quotient_L(worked_system(), R, 6)) == 6

    @pytest.mark.parametrize(("coeff", "length"), [("[x]", 1), ("[x^2]", 0)])
    def test_finite_slot_over_infinite_module(self, coeff: str, length: int) -> None:
        slot = Slot((), parse_ideal(coeff, 2), 0)
        spec = ComplexSpec(Orientation.CHAIN, M, {0: (slot,)}, {})
        assert slot_length(spec, slot) == length

    @pytest.mark.parametrize("coeff", ["[y]", "[x, y^3]"])
    def test_infinite_slot_over_infinite_module(self, coeff: str) -> None:
        slot = Slot((), parse_ideal(coeff, 2), 0)
        spec = ComplexSpec(Orientation.CHAIN, M, {0: (slot,)}, {})
        with pytest.raises(NotFiniteLengthError):
            slot_length(spec, slot)


class TestExactSequence:
    def test_accounting_holds(self) -> None:
        ws = worked_system()
        report = ses_check(sub_koszul(ws, R, 6), koszul(ws.elements, R), quotient_L(ws, R, 6))
        assert report.success
        assert report.chi == {"sub": 0, "mid": 6, "quot": 6}
        assert report.euler_ok is True


class TestAnnihilation:
    def test_each_element_kills_homology(self) -> None:
        ws = worked_system()
        spec = sub_koszul(ws, R, 5)
        for a in ws.elements:
            assert annihilation_check(spec, a)

    def test_non_annihilator_detected(self) -> None:
        assert not annihilation_check(koszul([mono("y^2")], R), mono("x"), degree_cap=4)


class TestCones:
    def test_orientation_mismatch(self) -> None:
        spec = co_koszul([mono("x")], R)
        with pytest.raises(ShapeMismatchError):
            mapping_cone(mono("y"), spec, spec, 1)

    def test_cone_of_koszul(self) -> None:
        first = koszul([mono("x^2")], R)
        cone = mapping_cone(mono("y^3"), first, first, 1)
        direct = koszul([mono("x^2"), mono("y^3")], R)
        assert homology_dims(cone, 20, 7).dims == homology_dims(direct, 20, 7).dims
