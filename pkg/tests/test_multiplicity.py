"""Tests for Hilbert-Samuel multiplicities and the Euler characteristic identities."""

from __future__ import annotations

import math

import pytest

from koszul_truncation.builders import WeightedSystem
from koszul_truncation.corpus import random_corpus, worked_instances
from koszul_truncation.errors import NotArtinianError, NotSOPError, UnstableError
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    parse_ideal,
    parse_monomial,
)
from koszul_truncation.multiplicity import (
    MonitorReport,
    MonitorRow,
    chi_K_stable,
    chi_koszul,
    chi_L,
    chi_nonneg_monitor,
    e0,
    hilbert_samuel_table,
    monitor_instance,
    verify_mult1,
    verify_mult2,
)

R = CyclicModule.free(2)
m = MonomialIdeal.maximal(2)


def mono(text: str) -> Monomial:
    return parse_monomial(text, 2)


def worked(name: str) -> tuple[WeightedSystem, CyclicModule]:
    found = {key: (ws, module) for key, ws, module in worked_instances()}
    return found[name]


CONSTANCY_CASES = [
    pytest.param(name, ws, module, id=name)
    for name, ws, module in random_corpus(31, 6, max_vars=2, max_elems=2, max_degree=3)
]


class TestHilbertSamuel:
    def test_table_for_polynomial_ring(self) -> None:
        table = hilbert_samuel_table(R, m, n_max=5)
        assert [table.values[n] for n in range(6)] == [0, 1, 3, 6, 10, 15]
        assert table.differences(1) == [1, 2, 3, 4, 5]
        assert table.e0 == 1
        assert table.rows()[-1] == (5, 15, None, None)

    def test_finite_length_required(self) -> None:
        with pytest.raises(NotArtinianError):
            hilbert_samuel_table(R, parse_ideal("[x]", 2))

    def test_e0_values(self) -> None:
        assert e0(R, m) == 1
        assert e0(R, parse_ideal("[x^2, y^3]", 2)) == 6
        assert e0(R, parse_ideal("[x^2, x*y, y^2]", 2)) == 4
        assert e0(CyclicModule(parse_ideal("[x^2, x*y]", 2)), m) == 1

    def test_e0_of_line(self) -> None:
        assert e0(CyclicModule(parse_ideal("[x]", 2)), m) == 1


class TestKoszulEuler:
    def test_mult1_complete_intersection(self) -> None:
        report = verify_mult1([mono("x^2"), mono("y^3")], R)
        assert report.success
        assert report.numbers == {"chi": 6, "e0_a": 6}
        assert report.message == "6 = 6"

    def test_mult1_with_first_homology(self) -> None:
        module = CyclicModule(parse_ideal("[x^2, x*y]", 2))
        report = verify_mult1([mono("y")], module)
        assert report.success
        assert report.numbers == {"chi": 1, "e0_a": 1}

    def test_not_a_system_of_parameters(self) -> None:
        with pytest.raises(NotSOPError):
            chi_koszul([mono("x")], R)
        with pytest.raises(NotSOPError):
            chi_koszul([mono("x"), mono("x*y")], R)

    @pytest.mark.parametrize(
        ("nvars", "relations", "elements", "expected"),
        [
            (2, "[]", ["x", "y"], 1),
            (2, "[]", ["x^2", "y^3"], 6),
            (2, "[]", ["x^3", "y"], 3),
            (2, "[]", ["y^2", "x^4"], 8),
            (3, "[]", ["x", "y", "z"], 1),
            (3, "[]", ["x^2", "y", "z^2"], 4),
            (2, "[x^2, x*y]", ["y"], 1),
            (2, "[x^2, x*y]", ["y^3"], 3),
            (2, "[x^2]", ["y^2"], 4),
            (2, "[x^3]", ["y"], 3),
            (3, "[x^2]", ["y^2", "z"], 4),
            (3, "[x^2, x*y]", ["y", "z^2"], 2),
        ],
    )
    def test_mult1_instances(
        self, nvars: int, relations: str, elements: list[str], expected: int
    ) -> None:
        module = CyclicModule(parse_ideal(relations, nvars))
        report = verify_mult1([parse_monomial(a, nvars) for a in elements], module)
        assert report.success, report.message
        assert report.numbers == {"chi": expected, "e0_a": expected}


class TestTruncatedEuler:
    def test_chi_L_settles(self) -> None:
        ws, module = worked("w1")
        assert [chi_L(ws, module, n) for n in (5, 6, 9)] == [6, 6, 6]

    def test_chi_K_stable(self) -> None:
        ws, module = worked("w2")
        chi, n_star = chi_K_stable(ws, module)
        assert chi == 5
        assert n_star >= sum(ws.weights)

    def test_chi_K_stable_needs_stable_homology(self) -> None:
        ws, module = worked("w1")
        with pytest.raises(UnstableError, match="degree cap 2"):
            chi_K_stable(ws, module, degree_cap=2)

    @pytest.mark.parametrize(
        ("relations", "pairs"),
        [
            ("[]", [("x", 1), ("y", 1)]),
            ("[]", [("x^2", 1), ("y^3", 1)]),
            ("[]", [("y^2", 1), ("x", 1)]),
            ("[x^2, x*y]", [("y", 1)]),
            ("[x^2]", [("y^2", 1)]),
        ],
    )
    def test_chi_K_vanishes_when_q_is_generated_by_a(
        self, relations: str, pairs: list[tuple[str, int]]
    ) -> None:
        elements = [mono(a) for a, _ in pairs]
        q = MonomialIdeal.of(2, elements)
        ws = WeightedSystem(tuple(elements), tuple(c for _, c in pairs), q)
        chi, _ = chi_K_stable(ws, CyclicModule(parse_ideal(relations, 2)))
        assert chi == 0

    @pytest.mark.parametrize(("name", "ws", "module"), CONSTANCY_CASES)
    def test_chi_L_constant_over_window(
        self, name: str, ws: WeightedSystem, module: CyclicModule
    ) -> None:
        start = sum(ws.weights) + 10
        values = [chi_L(ws, module, n) for n in range(start, start + 5)]
        assert values == [math.prod(ws.weights) * e0(module, ws.q)] * 5, name

    @pytest.mark.parametrize(
        ("name", "numbers"),
        [
            ("w1", {"e0_a": 6, "e0_q": 1, "chi": 0}),
            ("w2", {"e0_a": 9, "e0_q": 4, "chi": 5}),
            ("w3", {"e0_a": 24, "e0_q": 4, "chi": 0}),
        ],
    )
    def test_mult2_worked_instances(self, name: str, numbers: dict) -> None:
        ws, module = worked(name)
        report = verify_mult2(ws, module)
        assert report.success
        for key, value in numbers.items():
            assert report.numbers[key] == value

    def test_mult2_message(self) -> None:
        ws, module = worked("w2")
        assert verify_mult2(ws, module).message == "9 = 4 + 5"

    def test_mult2_with_smaller_weights_fails(self) -> None:
        ws, module = worked("w1")
        report = verify_mult2(ws, module, weights=[1, 3])
        assert not report.success


class TestMonitor:
    def test_worked_corpus(self) -> None:
        report = chi_nonneg_monitor(worked_instances())
        assert report.success
        assert [r.instance_id for r in report.rows] == ["w1", "w2", "w3"]
        assert report.values == [0, 5, 0]
        assert report.histogram() == {0: 2, 5: 1}
        assert report.minimum == 0
        assert report.maximum == 5

    def test_skipped_row(self) -> None:
        ws = WeightedSystem((mono("x"),), (1,), m)
        row = monitor_instance("bad", ws, R)
        assert row.status.startswith("skipped")
        assert MonitorReport([row]).skipped == [row]

    def test_negative_value_is_a_finding(self) -> None:
        row = MonitorRow("r0000", 2, 2, (1, 1), chi=-1)
        report = MonitorReport([row])
        assert not report.success
        assert report.to_dict()["negative"] == ["r0000"]

    @pytest.mark.slow
    def test_seeded_corpus_has_no_negative_values(self) -> None:
        report = chi_nonneg_monitor(random_corpus(1, 200))
        assert len(report.rows) == 200
        assert report.values
        assert report.success, report.to_dict()["negative"]
