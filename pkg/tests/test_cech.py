"""Tests for colimit cohomology and the saturation-side checks."""

from __future__ import annotations

from dataclasses import replace

import pytest

from koszul_truncation.builders import WeightedSystem
from koszul_truncation.cech import (
    SystemKind,
    artin_rees_gap,
    build_system,
    cech_H,
    cech_L,
    colon_condition,
    les_check,
    local_cohomology,
    nonv_equivalence_check,
    radical_invariance_check,
    saturation_power,
    squares_commute_symbolically,
    star_check,
    torsion_H0,
    verify_squares,
)
from koszul_truncation.errors import ConstructionError, RadicalMismatchError
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    parse_ideal,
    parse_monomial,
)

R = CyclicModule.free(2)
m = MonomialIdeal.maximal(2)
LINE = CyclicModule(parse_ideal("[x^2, x*y]", 2))


def mono(text: str, nvars: int = 2) -> Monomial:
    return parse_monomial(text, nvars)


def worked_system() -> WeightedSystem:
    return WeightedSystem((mono("x^2"), mono("y^3")), (2, 3), m)


class TestDirectSystem:
    def test_stages_and_squares(self) -> None:
        system = build_system(worked_system(), R, 2, SystemKind.QUOTIENT, k_max=4)
        assert system.k_max == 4
        assert system.stage(2).components[1][0].shift == 4
        assert verify_squares(system, range(-3, 3)) == []

    @pytest.mark.parametrize("kind", list(SystemKind))
    def test_squares_commute_symbolically(self, kind: SystemKind) -> None:
        system = build_system(worked_system(), R, 2, kind, k_max=4)
        assert squares_commute_symbolically(system) == []

    def test_symbolic_squares_catch_a_repeated_stage(self) -> None:
        system = build_system(worked_system(), R, 2, SystemKind.SUB, k_max=3)
        stuck = replace(system, stages=(system.stage(1), system.stage(1), system.stage(3)))
        assert (1, 0) in squares_commute_symbolically(stuck)

    def test_k_max_too_small(self) -> None:
        with pytest.raises(ConstructionError, match="at least 2"):
            build_system(worked_system(), R, 2, k_max=1)

    def test_negative_level(self) -> None:
        with pytest.raises(ConstructionError, match="nonnegative"):
            build_system(worked_system(), R, -1)


class TestLocalCohomology:
    def test_top_local_cohomology_of_plane(self) -> None:
        report = local_cohomology([mono("x"), mono("y")], R, k_max=8, degrees=range(-6, 0))
        assert report.stable
        assert [report.dim(2, e) for e in range(-6, 0)] == [5, 4, 3, 2, 1, 0]
        assert report.all_zero(0)
        assert report.all_zero(1)
        assert report.entries[(2, -6)].k_star == 5

    def test_to_dict_lists_nonzero_entries(self) -> None:
        report = local_cohomology([mono("x"), mono("y")], R, k_max=6, degrees=range(-3, 0))
        payload = report.to_dict()
        assert payload["degrees"] == [-3, -1]
        assert [(row["i"], row["e"]) for row in payload["entries"]] == [(2, -2), (2, -3)]


class TestTruncatedColimits:
    def test_sub_colimit_has_no_top_cohomology(self) -> None:
        report = cech_H(worked_system(), R, 6, k_max=6)
        assert report.all_zero(2)

    def test_quotient_colimit_matches_local_cohomology(self) -> None:
        report = cech_L(worked_system(), R, 6, k_max=6, degrees=range(-5, 0))
        assert [report.dim(2, e) for e in range(-5, 0)] == [4, 3, 2, 1, 0]

    def test_radical_invariance(self) -> None:
        linear = WeightedSystem((mono("x"), mono("y")), (1, 1), m)
        report = radical_invariance_check(
            linear, worked_system(), R, 2, degrees=range(-4, 2), k_max=6
        )
        assert report.success
        assert report.compared > 0

    def test_radical_mismatch(self) -> None:
        left = WeightedSystem((mono("x"),), (1,), m)
        right = WeightedSystem((mono("y"),), (1,), m)
        with pytest.raises(RadicalMismatchError):
            radical_invariance_check(left, right, LINE, 1)

    def test_long_exact_sequence(self) -> None:
        report = les_check(worked_system(), R, 6, degrees=range(-4, 3), k_max=6)
        assert report.success
        assert report.compared > 0


class TestSaturation:
    def test_full_saturation(self) -> None:
        module = CyclicModule(parse_ideal("[x^3]", 1))
        result = saturation_power(module, parse_ideal("[x]", 1), mono("x", 1), 1, 1)
        assert result.full
        assert result.stage == 3
        assert str(result) == "full: [1] (stage 3)"

    def test_proper_saturation(self) -> None:
        q = parse_ideal("[x]", 1)
        result = saturation_power(CyclicModule.free(1), q, mono("x^2", 1), 2, 1)
        assert not result.full
        assert result.ideal == q
        assert result.stage == 0

    def test_element_outside_power(self) -> None:
        with pytest.raises(ConstructionError):
            saturation_power(R, m, mono("x"), 2, 1)

    def test_nonv_on_finite_length_module(self) -> None:
        module = CyclicModule(parse_ideal("[x^3]", 1))
        report = nonv_equivalence_check(module, parse_ideal("[x]", 1), mono("x", 1), 1)
        assert report.success
        assert report.fullness == {1: True, 2: True, 3: True}
        assert report.lhat_zero is not False

    def test_nonv_on_free_module(self) -> None:
        report = nonv_equivalence_check(
            CyclicModule.free(1), parse_ideal("[x]", 1), mono("x^2", 1), 2
        )
        assert report.success
        assert report.lhat_zero is False
        assert not any(report.fullness.values())


class TestColonCondition:
    def test_holds_for_worked_system(self) -> None:
        report = star_check(worked_system(), R)
        assert report.success
        assert [(v.l, v.k) for v in report.verdicts] == [(0, 0), (0, 0)]

    def test_fails_with_too_small_weight(self) -> None:
        report = star_check(WeightedSystem((mono("x^2"),), (1,), m), R)
        assert not report.success
        assert str(report.verdicts[0]) == "x^2: fails"

    def test_single_condition(self) -> None:
        zero = MonomialIdeal.zero(2)
        assert colon_condition(mono("x^2"), 2, m, zero, 0, 3)
        assert not colon_condition(mono("x^2"), 1, m, zero, 0, 3)


class TestTorsion:
    def test_torsion_slices(self) -> None:
        ws = WeightedSystem((mono("y"),), (1,), m)
        table = torsion_H0(ws, LINE, 1, cross_check=True)
        assert str(table.torsion) == "[x]"
        assert table.dims == {1: 1}
        assert table.agrees is True

    def test_torsion_leaves_higher_powers(self) -> None:
        ws = WeightedSystem((mono("y"),), (1,), m)
        assert torsion_H0(ws, LINE, 2).dims == {}


class TestArtinRees:
    def test_gap_grows_on_free_module(self) -> None:
        rows = artin_rees_gap(mono("x^2"), 1, m, R, range(1, 5))
        assert [row.gap for row in rows] == [0, 1, 2, 3]

    def test_gap_vanishes_on_line(self) -> None:
        rows = artin_rees_gap(mono("y"), 1, m, LINE, range(1, 4))
        assert [row.gap for row in rows] == [0, 0, 0]


def system(pairs: list[tuple[str, int]], q: str, nvars: int = 2) -> WeightedSystem:
    return WeightedSystem(
        tuple(mono(a, nvars) for a, _ in pairs),
        tuple(c for _, c in pairs),
        parse_ideal(q, nvars),
    )


def module(relations: str, nvars: int = 2) -> CyclicModule:
    return CyclicModule(parse_ideal(relations, nvars))


class TestQuotientColimitAgainstLocalCohomology:
    # With q = m and deg a_i = c_i the truncated sub complexes vanish below degree n.
    DEGREES = range(-4, 2)

    @pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
    def test_linear_system(self, n: int) -> None:
        ws = system([("x", 1), ("y", 1)], "[x, y]")
        local = local_cohomology(ws.elements, R, k_max=8, degrees=self.DEGREES)
        lhat = cech_L(ws, R, n, k_max=8, degrees=self.DEGREES)
        assert local.stable
        for i in range(3):
            assert [lhat.dim(i, e) for e in self.DEGREES] == [
                local.dim(i, e) for e in self.DEGREES
            ], i
        assert [local.dim(2, e) for e in self.DEGREES] == [3, 2, 1, 0, 0, 0]

    @pytest.mark.parametrize("n", range(6, 12))
    def test_worked_system_window(self, n: int) -> None:
        ws = worked_system()
        assert cech_H(ws, R, n, k_max=4, degrees=range(-4, n + 4)).all_zero(2)
        degrees = range(-4, 3)
        local = local_cohomology(ws.elements, R, k_max=6, degrees=degrees)
        lhat = cech_L(ws, R, n, k_max=6, degrees=degrees)
        assert [lhat.dim(2, e) for e in degrees] == [local.dim(2, e) for e in degrees]


NONVANISHING_CASES = [
    pytest.param(system([("x", 1), ("y", 1)], "[x, y]"), R, id="plane-linear"),
    pytest.param(worked_system(), R, id="plane-weighted"),
    pytest.param(system([("y", 1)], "[x, y]"), LINE, id="line"),
    pytest.param(system([("y^2", 2)], "[x, y]"), module("[x^2]"), id="double-line"),
    pytest.param(system([("x", 1)], "[x]", 1), CyclicModule.free(1), id="affine-line"),
    pytest.param(system([("x^2", 2)], "[x]", 1), CyclicModule.free(1), id="affine-square"),
]


class TestTopQuotientCohomologyNonvanishing:
    @pytest.mark.parametrize(("ws", "mod"), NONVANISHING_CASES)
    def test_top_index_nonzero(self, ws: WeightedSystem, mod: CyclicModule) -> None:
        t = ws.length
        degrees = range(-3, 0)
        for n in range(2, 8):
            report = cech_L(ws, mod, n, k_max=6, degrees=degrees)
            assert any((report.dim(t, e) or 0) > 0 for e in degrees), n


TORSION_CASES = [
    pytest.param("[x^2, x*y]", [("y", 1)], "[x, y]", 1, id="line-n1"),
    pytest.param("[x^2, x*y]", [("y", 1)], "[x, y]", 0, id="line-n0"),
    pytest.param("[x^2, x*y]", [("y^2", 2)], "[x, y]", 1, id="line-square"),
    pytest.param("[x^2, x*y]", [("y^2", 1)], "[x, y^2]", 1, id="line-coarse-q"),
    pytest.param("[x^2, x*y^2]", [("y", 1)], "[x, y]", 1, id="embedded-y2"),
    pytest.param("[x^2, x*y^2]", [("y^3", 3)], "[x, y]", 2, id="embedded-y2-cube"),
    pytest.param("[x^3, x*y]", [("y", 1)], "[x, y]", 1, id="triple-point"),
    pytest.param("[x^3, x*y]", [("y^2", 1)], "[x^2, y]", 2, id="triple-point-q"),
    pytest.param("[x*y, y^3]", [("x", 1)], "[x, y]", 2, id="x-axis"),
    pytest.param("[x^2]", [("y", 1)], "[x, y]", 1, id="torsion-free"),
    pytest.param("[]", [("x", 1), ("y", 1)], "[x, y]", 1, id="plane"),
]


class TestTorsionAgainstColimit:
    @pytest.mark.parametrize(("relations", "pairs", "q", "n"), TORSION_CASES)
    def test_agrees_with_zeroth_cohomology(
        self, relations: str, pairs: list[tuple[str, int]], q: str, n: int
    ) -> None:
        table = torsion_H0(system(pairs, q), module(relations), n, cross_check=True)
        assert table.agrees is True
