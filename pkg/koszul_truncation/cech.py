"""Direct limits of Koszul cochain complexes over powers of a, computed slice by slice.

Stage k of a system is built from (a_1^k, ..., a_t^k) with weights k*c_i. Slot J at
stage k carries the shift k * sum deg a_J, and the transition to stage k+1 multiplies
slot J by a_J = prod a_j, which preserves internal degree. The colimit dimension at
(i, e) is read off as the rank of H(stage k) -> H(stage k+w), once that rank stays
constant in k.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from koszul_truncation.builders import (
    WeightedSystem,
    co_koszul,
    co_quotient_L,
    power_system,
    sub_co_koszul,
)
from koszul_truncation.complexes import ComplexSpec
from koszul_truncation.errors import (
    ConstructionError,
    NoStabilizationError,
    RadicalMismatchError,
)
from koszul_truncation.fp_linalg import (
    DEFAULT_PRIME,
    SparseMatrix,
    kernel_basis,
    multiply,
    rank,
    rank_modulo,
)
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    colon,
    contains,
    format_monomial,
    ideal_intersection,
    ideal_power,
    ideal_sum,
    minimalize,
    radical,
    saturation,
    std_basis_slice,
)

logger = logging.getLogger(__name__)

DEFAULT_K_MAX = 8
DEFAULT_COLIMIT_WINDOW = 2
SATURATION_BOUND = 64


class SystemKind(str, Enum):
    SUB = "sub"
    QUOTIENT = "quotient"
    PLAIN = "plain"


@dataclass
class DirectSystemSpec:
    """Stages 1..k_max of a direct system of cochain complexes."""

    elements: tuple[Monomial, ...]
    module: CyclicModule
    n: int
    kind: SystemKind
    stages: tuple[ComplexSpec, ...]
    ws: WeightedSystem | None = None

    @property
    def k_max(self) -> int:
        return len(self.stages)

    @property
    def length(self) -> int:
        return len(self.elements)

    def stage(self, k: int) -> ComplexSpec:
        """Stage k, counted from 1."""
        return self.stages[k - 1]

    def transition(
        self, k: int, steps: int, index: int, degree: int, p: int = DEFAULT_PRIME
    ) -> SparseMatrix:
        """Composite map from stage k to stage k+steps on the (index, degree) slice."""
        source_spec, target_spec = self.stage(k), self.stage(k + steps)
        source = source_spec.index_basis(index, degree)
        target = target_spec.index_basis(index, degree)
        slots = source_spec.components.get(index, ())
        one = Monomial.one(self.module.nvars)
        factors = [
            math.prod((self.elements[j] ** steps for j in slot.label), start=one) for slot in slots
        ]
        entries = []
        for (j, m), col in source.items():
            row = target.get((j, m * factors[j]))
            if row is not None:
                entries.append((row, col, 1))
        return SparseMatrix.from_entries(len(target), len(source), entries, p)

    def default_degrees(self) -> range:
        return range(-2 * self.k_max, self.n + self.stage(1).max_shift + 1)

    def to_dict(self) -> dict:
        return {
            "elements": [format_monomial(a) for a in self.elements],
            "module": str(self.module),
            "n": self.n,
            "kind": self.kind.value,
            "k_max": self.k_max,
        }


def _stage_complex(
    kind: SystemKind, base: WeightedSystem | None, elements: Sequence[Monomial],
    module: CyclicModule, n: int, k: int,
) -> ComplexSpec:
    if kind is SystemKind.PLAIN or base is None:
        return co_koszul(tuple(a**k for a in elements), module)
    powered = power_system(base, k)
    if kind is SystemKind.SUB:
        return sub_co_koszul(powered, module, n)
    return co_quotient_L(powered, module, n)


def verify_squares(
    system: DirectSystemSpec,
    degrees: Iterable[int],
    stages: Iterable[int] | None = None,
    p: int = DEFAULT_PRIME,
) -> list[tuple[int, int, int]]:
    """(stage, index, degree) where transition and differential fail to commute."""
    bad = []
    ks = range(1, system.k_max) if stages is None else stages
    for k in ks:
        for e in degrees:
            for i in range(system.length):
                left = multiply(
                    system.transition(k, 1, i + 1, e, p), system.stage(k).differential(i, e, p)
                )
                right = multiply(
                    system.stage(k + 1).differential(i, e, p), system.transition(k, 1, i, e, p)
                )
                if left.entries != right.entries:
                    bad.append((k, i, e))
    return bad


def squares_commute_symbolically(
    system: DirectSystemSpec, stages: Iterable[int] | None = None
) -> list[tuple[int, int]]:
    """(stage, index) where transition and differential differ as monomial maps.

    Transitions and differentials multiply slots by monomials, so agreement of the
    signed products covers every degree at once.
    """
    one = Monomial.one(system.module.nvars)

    def lift(label: tuple[int, ...]) -> Monomial:
        return math.prod((system.elements[j] for j in label), start=one)

    bad = []
    ks = range(1, system.k_max) if stages is None else stages
    for k in ks:
        paths = []
        for spec in (system.stage(k), system.stage(k + 1)):
            by_index: dict[int, dict] = {}
            for i, entries in spec.diffs.items():
                by_index[i] = {
                    (
                        spec.components[i][e.source].label,
                        spec.components[i + 1][e.target].label,
                    ): (e.sign, e.multiplier)
                    for e in entries
                }
            paths.append(by_index)
        lower, upper = paths
        for i in sorted(set(lower) | set(upper)):
            left = {
                key: (sign, (lift(key[1]) * mult).exponents)
                for key, (sign, mult) in lower.get(i, {}).items()
            }
            right = {
                key: (sign, (mult * lift(key[0])).exponents)
                for key, (sign, mult) in upper.get(i, {}).items()
            }
            if left != right:
                bad.append((k, i))
    return bad


def build_system(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    kind: SystemKind | str = SystemKind.SUB,
    k_max: int = DEFAULT_K_MAX,
) -> DirectSystemSpec:
    """Stages 1..k_max of K^.(a^k, q, M; n), L^.(a^k, q, M; n) or K^.(a^k; M).

    Raises:
        ConstructionError: If k_max < 2, n < 0, or a transition square fails to commute
    """
    kind = SystemKind(kind)
    if k_max < 2:
        raise ConstructionError(f"k_max = {k_max} must be at least 2")
    if n < 0:
        raise ConstructionError(f"n = {n} must be nonnegative")
    return _assemble(ws.elements, module, n, kind, k_max, ws)


def _assemble(
    elements: Sequence[Monomial],
    module: CyclicModule,
    n: int,
    kind: SystemKind,
    k_max: int,
    ws: WeightedSystem | None,
) -> DirectSystemSpec:
    stages = tuple(
        _stage_complex(kind, ws, elements, module, n, k) for k in range(1, k_max + 1)
    )
    system = DirectSystemSpec(tuple(elements), module, n, kind, stages, ws)
    bad = squares_commute_symbolically(system)
    if bad:
        raise ConstructionError(f"Transition squares fail to commute at {bad}")
    logger.debug("built %s system over %d stages", kind.value, k_max)
    return system


@dataclass
class ColimitEntry:
    index: int
    degree: int
    dim: int | None
    k_star: int | None
    ranks: tuple[int, ...]

    @property
    def stable(self) -> bool:
        return self.dim is not None

    @property
    def status(self) -> str:
        return "stable" if self.stable else "unstable"


@dataclass
class ColimitReport:
    """Stabilized colimit dimensions per (index, degree)."""

    entries: dict[tuple[int, int], ColimitEntry]
    n: int
    k_max: int
    window: int
    degrees: range
    kind: str = ""

    def dim(self, index: int, degree: int) -> int | None:
        entry = self.entries.get((index, degree))
        return 0 if entry is None else entry.dim

    @property
    def stable(self) -> bool:
        return all(e.stable for e in self.entries.values())

    @property
    def unstable(self) -> list[ColimitEntry]:
        return [e for e in self.entries.values() if not e.stable]

    def nonzero(self, index: int | None = None) -> list[ColimitEntry]:
        return [
            e for e in self.entries.values()
            if e.stable and e.dim and (index is None or e.index == index)
        ]

    def all_zero(self, index: int | None = None) -> bool:
        """No stable entry is nonzero and every entry at ``index`` is stable."""
        scoped = [e for e in self.entries.values() if index is None or e.index == index]
        return all(e.stable and e.dim == 0 for e in scoped)

    def rows(self, include_zero: bool = False) -> list[ColimitEntry]:
        return sorted(
            (e for e in self.entries.values() if include_zero or not e.stable or e.dim),
            key=lambda e: (e.index, -e.degree),
        )

    def to_dict(self, include_zero: bool = False) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "k_max": self.k_max,
            "window": self.window,
            "degrees": [self.degrees.start, self.degrees.stop - 1],
            "stable": self.stable,
            "entries": [
                {"i": e.index, "e": e.degree, "dim": e.dim, "k_star": e.k_star, "status": e.status}
                for e in self.rows(include_zero)
            ],
        }


def _stable_run(ranks: Sequence[int]) -> tuple[int | None, int | None]:
    """(value, first stage) of the final constant run, if it has at least two terms."""
    if len(ranks) < 2 or ranks[-1] != ranks[-2]:
        return None, None
    start = len(ranks) - 2
    while start > 0 and ranks[start - 1] == ranks[-1]:
        start -= 1
    return ranks[-1], start + 1


def _unsupported_zero(
    system: DirectSystemSpec, index: int, degree: int, first: int, last: int
) -> bool:
    """A zero run over empty slices says nothing when later stages have a nonempty slice."""
    if any(system.stage(k).slice_dim(index, degree) for k in range(first, last + 1)):
        return False
    return bool(system.stage(system.k_max).slice_dim(index, degree))


def _composite_rank(
    system: DirectSystemSpec, k: int, w: int, index: int, degree: int, p: int
) -> int:
    stage = system.stage(k)
    if not stage.slice_dim(index, degree):
        return 0
    if index in stage.diffs:
        cycles = kernel_basis(stage.differential(index, degree, p))
    else:
        cycles = [{r: 1} for r in range(stage.slice_dim(index, degree))]
    if not cycles:
        return 0
    z = SparseMatrix.from_columns(stage.slice_dim(index, degree), cycles, p)
    image = multiply(system.transition(k, w, index, degree, p), z)
    if not image.entries:
        return 0
    boundaries = system.stage(k + w).differential(index - 1, degree, p) if index > 0 else None
    if boundaries is None or not boundaries.cols:
        return rank(image)
    return rank_modulo(image, boundaries)


def colimit_cohomology(
    system: DirectSystemSpec,
    degrees: Iterable[int] | None = None,
    window: int = DEFAULT_COLIMIT_WINDOW,
    p: int = DEFAULT_PRIME,
) -> ColimitReport:
    """Colimit cohomology dimensions of a direct system, slice by slice.

    For each (i, e) the rank r_k of H(stage k) -> H(stage k+window) is computed for
    k = 1..k_max-window. The entry is stable when the last two or more r_k agree;
    its dimension is that common value and ``k_star`` the first stage of the run.
    """
    degs = system.default_degrees() if degrees is None else range(min(degrees), max(degrees) + 1)
    entries: dict[tuple[int, int], ColimitEntry] = {}
    last = system.k_max - window
    for i in range(system.length + 1):
        for e in degs:
            ranks = tuple(_composite_rank(system, k, window, i, e, p) for k in range(1, last + 1))
            value, k_star = _stable_run(ranks)
            if value == 0 and k_star is not None and _unsupported_zero(system, i, e, k_star, last):
                value = k_star = None
            entries[(i, e)] = ColimitEntry(i, e, value, k_star, ranks)
            logger.debug("colimit (%d, %d): ranks %s", i, e, ranks)
            if value is None:
                logger.warning("colimit entry (%d, %d) unstable, ranks %s", i, e, ranks)
    return ColimitReport(entries, system.n, system.k_max, window, degs, system.kind.value)


def cech_H(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
    degrees: Iterable[int] | None = None,
    p: int = DEFAULT_PRIME,
) -> ColimitReport:
    """H^i of the colimit of K^.(a^k, q, M; n)."""
    system = build_system(ws, module, n, SystemKind.SUB, k_max)
    return colimit_cohomology(system, degrees, window, p)


def cech_L(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
    degrees: Iterable[int] | None = None,
    p: int = DEFAULT_PRIME,
) -> ColimitReport:
    """H^i of the colimit of L^.(a^k, q, M; n)."""
    system = build_system(ws, module, n, SystemKind.QUOTIENT, k_max)
    return colimit_cohomology(system, degrees, window, p)


def local_cohomology(
    elements: Sequence[Monomial],
    module: CyclicModule,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
    degrees: Iterable[int] | None = None,
    p: int = DEFAULT_PRIME,
) -> ColimitReport:
    """H^i_(a)(M) as the colimit of K^.(a^k; M)."""
    if k_max < 2:
        raise ConstructionError(f"k_max = {k_max} must be at least 2")
    system = _assemble(tuple(elements), module, 0, SystemKind.PLAIN, k_max, None)
    return colimit_cohomology(system, degrees, window, p)


@dataclass
class SaturationResult:
    """U with (q^n M)^{aA} = U/I, and the first l where the chain reaches U."""

    ideal: MonomialIdeal
    stage: int
    relations: MonomialIdeal

    @property
    def full(self) -> bool:
        """(q^n M)^{aA} = M."""
        return self.ideal.is_unit

    def __str__(self) -> str:
        verdict = "full" if self.full else "proper"
        return f"{verdict}: {self.ideal} (stage {self.stage})"

    def to_dict(self) -> dict:
        return {"ideal": str(self.ideal), "stage": self.stage, "full": self.full}


def saturation_power(
    module: CyclicModule,
    q: MonomialIdeal,
    a: Monomial,
    c: int,
    n: int,
    bound: int = SATURATION_BOUND,
) -> SaturationResult:
    """Stable value of (q^{n + c*l} + I) : a^l.

    The chain is ascending in l and may pause before growing again, so a value counts
    as stable once it has held for more steps than the generator degrees of q^n and I.

    Raises:
        ConstructionError: If a is not in q^c
        NoStabilizationError: If no value holds long enough before ``bound``
    """
    if not contains(a, ideal_power(q, c)):
        raise ConstructionError(f"{format_monomial(a)} is not in q^{c}")
    relations = module.relations
    confirm = 1 + max(n * q.max_generator_degree, relations.max_generator_degree, 1)
    previous: MonomialIdeal | None = None
    first = 0
    held = 0
    for ell in range(bound + 1):
        current = colon(ideal_sum(ideal_power(q, n + c * ell), relations), a**ell)
        current = ideal_sum(current, relations)
        if current == previous:
            held += 1
        else:
            previous, first, held = current, ell, 1
        if held > confirm or current.is_unit:
            logger.info("saturation of q^%d M by %s at l = %d", n, format_monomial(a), first)
            return SaturationResult(current, first, relations)
    raise NoStabilizationError(f"(q^{n} M)^(aA) still moving at l = {bound}")


@dataclass
class NonvReport:
    """Agreement of the fullness conditions with vanishing of the first L-cohomology."""

    fullness: dict[int, bool]
    lhat_zero: bool | None
    success: bool
    message: str

    def __str__(self) -> str:
        return f"{'✓' if self.success else '✗'} {self.message}"

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "fullness": {str(k): v for k, v in self.fullness.items()},
            "lhat_zero": self.lhat_zero,
            "message": self.message,
        }


def nonv_equivalence_check(
    module: CyclicModule,
    q: MonomialIdeal,
    a: Monomial,
    c: int,
    n_list: Sequence[int] = (1, 2, 3),
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
) -> NonvReport:
    """For one element: fullness at n=1, at every tested n and at some tested n agree,
    and fullness matches vanishing of the first L-cohomology at n = 1."""
    tested = sorted(set(n_list) | {1})
    fullness = {k: saturation_power(module, q, a, c, k).full for k in tested}
    at_one = fullness[1]
    every = all(fullness.values())
    some = any(fullness.values())
    ws = WeightedSystem((a,), (c,), q)
    report = cech_L(ws, module, 1, k_max, window)
    if report.nonzero(1):
        lhat_zero: bool | None = False
    elif all(e.stable for e in report.entries.values() if e.index == 1):
        lhat_zero = True
    else:
        lhat_zero = None
    agree = at_one == every == some
    consistent = agree and (lhat_zero is None or lhat_zero == at_one)
    message = (
        f"full at n=1: {at_one}, at every n: {every}, at some n: {some}, "
        f"first L-cohomology zero: {lhat_zero}"
    )
    return NonvReport(fullness, lhat_zero, consistent, message)


@dataclass
class StarVerdict:
    element: str
    holds: bool
    l: int | None = None
    k: int | None = None

    def __str__(self) -> str:
        if self.holds:
            return f"{self.element}: holds up to tested range (l={self.l}, k={self.k})"
        return f"{self.element}: fails"


@dataclass
class StarReport:
    verdicts: list[StarVerdict] = field(default_factory=list)
    n_span: int = 8
    l_max: int = 6
    k_max: int = 6

    @property
    def success(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def __str__(self) -> str:
        mark = "✓" if self.success else "✗"
        return "\n".join([f"{mark} colon condition"] + [f"  {v}" for v in self.verdicts])

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "n_span": self.n_span,
            "l_max": self.l_max,
            "k_max": self.k_max,
            "elements": [
                {"element": v.element, "holds": v.holds, "l": v.l, "k": v.k}
                for v in self.verdicts
            ],
        }


def colon_condition(
    a: Monomial, c: int, q: MonomialIdeal, relations: MonomialIdeal, ell: int, n: int
) -> bool:
    """((q^{n+c} + I) : a) meets q^l + I in exactly q^n + I."""
    lhs = ideal_intersection(
        ideal_sum(colon(ideal_sum(ideal_power(q, n + c), relations), a), relations),
        ideal_sum(ideal_power(q, ell), relations),
    )
    return lhs == ideal_sum(ideal_power(q, n), relations)


def star_check(
    ws: WeightedSystem,
    module: CyclicModule,
    n_span: int = 8,
    l_max: int = 6,
    k_max: int = 6,
) -> StarReport:
    """Search (l, k) for each a_i over R/(I + (a_1, ..., a_{i-1}))."""
    report = StarReport(n_span=n_span, l_max=l_max, k_max=k_max)
    relations = module.relations
    for a, c in zip(ws.elements, ws.weights, strict=True):
        verdict = StarVerdict(format_monomial(a), False)
        for ell in range(l_max + 1):
            found = next(
                (
                    k for k in range(k_max + 1)
                    if all(
                        colon_condition(a, c, ws.q, relations, ell, n)
                        for n in range(k, k + n_span + 1)
                    )
                ),
                None,
            )
            if found is not None:
                verdict = StarVerdict(verdict.element, True, ell, found)
                break
        report.verdicts.append(verdict)
        relations = ideal_sum(relations, minimalize([a], module.nvars))
    return report


def _slice_count(
    inside: MonomialIdeal, outside: MonomialIdeal, degrees: Iterable[int]
) -> dict[int, int]:
    """Per degree, monomials of ``inside`` that are not in ``outside``."""
    out = {}
    for e in degrees:
        count = sum(1 for m in std_basis_slice(outside, e) if contains(m, inside))
        if count:
            out[e] = count
    return out


@dataclass
class TorsionTable:
    """Degree slices of (0 :_M (a)^infinity) meet q^n M."""

    torsion: MonomialIdeal
    n: int
    dims: dict[int, int]
    degree_cap: int
    agrees: bool | None = None

    def to_dict(self) -> dict:
        return {
            "torsion": str(self.torsion),
            "n": self.n,
            "degree_cap": self.degree_cap,
            "dims": {str(e): v for e, v in sorted(self.dims.items())},
            "agrees_with_cech": self.agrees,
        }


def torsion_H0(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    degree_cap: int | None = None,
    cross_check: bool = False,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
) -> TorsionTable:
    """Slice dimensions of T meet q^n M, with T/I the a-torsion of M."""
    relations = module.relations
    torsion, _ = saturation(relations, ws.ideal())
    cap = (
        n * ws.q.max_generator_degree
        + torsion.max_generator_degree
        + relations.max_generator_degree
        + 4
        if degree_cap is None
        else degree_cap
    )
    truncated = ideal_intersection(torsion, ideal_sum(ideal_power(ws.q, n), relations))
    dims = _slice_count(truncated, relations, range(cap + 1))
    table = TorsionTable(torsion, n, dims, cap)
    if cross_check:
        report = cech_H(ws, module, n, k_max, window, range(0, cap + 1))
        table.agrees = all(
            report.dim(0, e) == dims.get(e, 0) for e in range(cap + 1)
        )
    return table


@dataclass
class GapRow:
    n: int
    gap: int | None

    def to_dict(self) -> dict:
        return {"n": self.n, "gap": self.gap if self.gap is not None else "unstable"}


def artin_rees_gap(
    a: Monomial,
    c: int,
    q: MonomialIdeal,
    module: CyclicModule,
    n_values: Iterable[int],
    window: int = 4,
) -> list[GapRow]:
    """l(((a) + I) meet (q^n + I) / (a q^{n-c} + I)) for each n; None when not finite."""
    if not contains(a, ideal_power(q, c)):
        raise ConstructionError(f"{format_monomial(a)} is not in q^{c}")
    relations = module.relations
    principal = minimalize([a], module.nvars)
    rows = []
    for n in n_values:
        top = ideal_intersection(
            ideal_sum(principal, relations), ideal_sum(ideal_power(q, n), relations)
        )
        bottom = ideal_sum(
            minimalize((a * g for g in ideal_power(q, n - c).generators), module.nvars),
            relations,
        )
        cap = n * q.max_generator_degree + a.degree + relations.max_generator_degree + window
        counts = _slice_count(top, bottom, range(cap + 1))
        finite = all(e <= cap - window for e in counts)
        rows.append(GapRow(n, sum(counts.values()) if finite else None))
    return rows


@dataclass
class ComparisonReport:
    """Entry-by-entry comparison of colimit reports."""

    name: str
    mismatches: list[dict] = field(default_factory=list)
    compared: int = 0
    skipped: int = 0

    @property
    def success(self) -> bool:
        return not self.mismatches

    def __str__(self) -> str:
        mark = "✓" if self.success else "✗"
        return (
            f"{mark} {self.name}: {self.compared} degrees compared, {self.skipped} skipped "
            f"as unstable, {len(self.mismatches)} mismatches"
        )

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "success": self.success,
            "compared": self.compared,
            "skipped": self.skipped,
            "mismatches": self.mismatches,
        }


def radical_invariance_check(
    ws_a: WeightedSystem,
    ws_b: WeightedSystem,
    module: CyclicModule,
    n: int,
    degrees: Iterable[int] | None = None,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
) -> ComparisonReport:
    """L-cohomology of two systems with the same radical agrees where both are stable.

    Raises:
        RadicalMismatchError: If rad (a) != rad (b)
    """
    if radical(ws_a.ideal()) != radical(ws_b.ideal()):
        raise RadicalMismatchError(
            f"rad {ws_a.ideal()} = {radical(ws_a.ideal())} but "
            f"rad {ws_b.ideal()} = {radical(ws_b.ideal())}"
        )
    left = cech_L(ws_a, module, n, k_max, window, degrees)
    right = cech_L(ws_b, module, n, k_max, window, degrees)
    report = ComparisonReport("radical invariance")
    for key, entry in sorted(left.entries.items()):
        other = right.entries.get(key)
        if other is None or not (entry.stable and other.stable):
            report.skipped += 1
            continue
        report.compared += 1
        if entry.dim != other.dim:
            report.mismatches.append({"i": key[0], "e": key[1], "a": entry.dim, "b": other.dim})
    return report


def les_check(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    degrees: Iterable[int] | None = None,
    k_max: int = DEFAULT_K_MAX,
    window: int = DEFAULT_COLIMIT_WINDOW,
) -> ComparisonReport:
    """Exactness of the H-hat -> local cohomology -> L-hat sequence in each degree."""
    sub = build_system(ws, module, n, SystemKind.SUB, k_max)
    degs = sub.default_degrees() if degrees is None else degrees
    hhat = colimit_cohomology(sub, degs, window)
    local = local_cohomology(ws.elements, module, k_max, window, degs)
    lhat = cech_L(ws, module, n, k_max, window, degs)
    report = ComparisonReport("long exact sequence")
    t = ws.length
    for e in hhat.degrees:
        keys = [(i, e) for i in range(t + 1)]
        triples = [(hhat.dim(*key), local.dim(*key), lhat.dim(*key)) for key in keys]
        if any(v is None for triple in triples for v in triple):
            report.skipped += 1
            continue
        report.compared += 1
        alternating = sum((-1) ** i * (h - a + ell) for i, (h, a, ell) in enumerate(triples))
        if alternating:
            report.mismatches.append({"e": e, "alternating_sum": alternating})
        h_top, a_top, l_top = triples[t]
        if l_top > a_top:
            report.mismatches.append({"e": e, "top_L": l_top, "top_local": a_top})
    return report
