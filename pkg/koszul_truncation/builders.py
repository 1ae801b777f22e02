"""Builders for Koszul-type complexes attached to (a, c, q, M, n)."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from itertools import combinations

from koszul_truncation.complexes import (
    DEFAULT_WINDOW,
    ComplexSpec,
    DiffEntry,
    Orientation,
    Slot,
    check_d_squared_symbolic,
    co_mapping_cone,
    mapping_cone,
)
from koszul_truncation.errors import ConstructionError
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    NegPowerConvention,
    contains,
    format_monomial,
    ideal_power,
    ideal_sum,
    initial_degree,
    is_m_primary,
    minimalize,
    socle_exponent,
)

logger = logging.getLogger(__name__)

Label = tuple[int, ...]


@dataclass(frozen=True)
class WeightedSystem:
    """Monomials a_1..a_t with weights c_i such that a_i lies in q^{c_i}.

    Raises:
        ConstructionError: If the lengths differ, a weight is not positive,
            q is zero or the unit ideal, or some a_i is not in q^{c_i}
    """

    elements: tuple[Monomial, ...]
    weights: tuple[int, ...]
    q: MonomialIdeal

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "weights", tuple(int(c) for c in self.weights))
        if len(self.elements) != len(self.weights):
            raise ConstructionError(
                f"{len(self.elements)} elements but {len(self.weights)} weights"
            )
        if self.q.is_zero or self.q.is_unit:
            raise ConstructionError(f"q = {self.q} must be a proper nonzero ideal")
        for i, (a, c) in enumerate(zip(self.elements, self.weights, strict=True)):
            if a.nvars != self.q.nvars:
                raise ConstructionError(f"a[{i}] lives in {a.nvars} variables, q in {self.q.nvars}")
            if c < 1:
                raise ConstructionError(f"Weight c[{i}] = {c} must be positive")
            if not contains(a, ideal_power(self.q, c)):
                raise ConstructionError(
                    f"a[{i}] = {format_monomial(a)} is not in q^{c} for q = {self.q}"
                )

    @classmethod
    def of(
        cls, pairs: Sequence[tuple[Monomial, int]], q: MonomialIdeal
    ) -> WeightedSystem:
        return cls(tuple(a for a, _ in pairs), tuple(c for _, c in pairs), q)

    @property
    def length(self) -> int:
        return len(self.elements)

    @property
    def nvars(self) -> int:
        return self.q.nvars

    def ideal(self) -> MonomialIdeal:
        """The ideal (a_1, ..., a_t)."""
        return minimalize(self.elements, self.nvars)

    def weight_sum(self, label: Label) -> int:
        return sum(self.weights[j] for j in label)

    def permuted(self, order: Sequence[int]) -> WeightedSystem:
        if sorted(order) != list(range(self.length)):
            raise ConstructionError(f"{list(order)} is not a permutation of 0..{self.length - 1}")
        return WeightedSystem(
            tuple(self.elements[j] for j in order), tuple(self.weights[j] for j in order), self.q
        )

    def extended(self, element: Monomial, weight: int) -> WeightedSystem:
        return WeightedSystem((*self.elements, element), (*self.weights, weight), self.q)

    def prefix(self, k: int) -> WeightedSystem:
        return WeightedSystem(self.elements[:k], self.weights[:k], self.q)

    def to_dict(self) -> dict:
        return {
            "a": [
                {"monomial": format_monomial(a), "c": c}
                for a, c in zip(self.elements, self.weights, strict=True)
            ],
            "q": str(self.q),
        }


def power_system(ws: WeightedSystem, k: int) -> WeightedSystem:
    """(a_1^k, ..., a_t^k) with weights k*c_i."""
    if k < 1:
        raise ConstructionError(f"Power k = {k} must be at least 1")
    if k == 1:
        return ws
    return WeightedSystem(
        tuple(a**k for a in ws.elements), tuple(k * c for c in ws.weights), ws.q
    )


def max_weights(elements: Sequence[Monomial], q: MonomialIdeal) -> tuple[int, ...]:
    """Largest c_i with a_i in q^{c_i}, computed in the polynomial ring."""
    ring = CyclicModule.free(q.nvars)
    return tuple(int(initial_degree(a, q, ring)) for a in elements)


def _labels(t: int, size: int) -> list[Label]:
    return list(combinations(range(t), size))


def _label_degree(elements: Sequence[Monomial], label: Label) -> int:
    return sum(elements[j].degree for j in label)


def _chain_diffs(
    elements: Sequence[Monomial], components: dict[int, tuple[Slot, ...]]
) -> dict[int, tuple[DiffEntry, ...]]:
    # e_J -> sum_k (-1)^(k+1) a_{j_k} e_{J \ j_k}
    diffs: dict[int, tuple[DiffEntry, ...]] = {}
    for i in range(1, len(elements) + 1):
        targets = {slot.label: n for n, slot in enumerate(components[i - 1])}
        entries = []
        for src, slot in enumerate(components[i]):
            for k, j in enumerate(slot.label):
                rest = slot.label[:k] + slot.label[k + 1 :]
                entries.append(DiffEntry(src, targets[rest], (-1) ** k, elements[j]))
        diffs[i] = tuple(entries)
    return diffs


def _cochain_diffs(
    elements: Sequence[Monomial], components: dict[int, tuple[Slot, ...]]
) -> dict[int, tuple[DiffEntry, ...]]:
    # e_J* -> sum_{j not in J} (-1)^(pos(j) + 1) a_j e_{J u j}*, pos 1-based in J u j
    t = len(elements)
    diffs: dict[int, tuple[DiffEntry, ...]] = {}
    for i in range(t):
        targets = {slot.label: n for n, slot in enumerate(components[i + 1])}
        entries = []
        for src, slot in enumerate(components[i]):
            for j in range(t):
                if j in slot.label:
                    continue
                bigger = tuple(sorted((*slot.label, j)))
                pos = bigger.index(j)
                entries.append(DiffEntry(src, targets[bigger], (-1) ** pos, elements[j]))
        diffs[i] = tuple(entries)
    return diffs


def _hints(
    elements: Sequence[Monomial],
    module: CyclicModule,
    components: dict[int, tuple[Slot, ...]],
    orientation: Orientation,
    quotient: bool,
) -> tuple[int | None, int | None]:
    """Degree cap and stability window for complexes with finite-length homology."""
    total = ideal_sum(minimalize(elements, module.nvars), module.relations)
    if not elements or not is_m_primary(total):
        return None, None
    window = DEFAULT_WINDOW + total.max_generator_degree
    bound = 0
    for slots in components.values():
        for slot in slots:
            if quotient:
                finite = ideal_sum(slot.coeff, module.relations)
                if not is_m_primary(finite):
                    return None, None
                poly = socle_exponent(finite)
            else:
                poly = slot.coeff.max_generator_degree
            shift = slot.shift if orientation is Orientation.CHAIN else 0
            bound = max(bound, shift + poly)
    return bound + 2 * socle_exponent(total) + window, window


def _build(
    elements: Sequence[Monomial],
    module: CyclicModule,
    coeff: Callable[[Label], MonomialIdeal],
    orientation: Orientation,
    quotient: bool,
    name: str,
) -> ComplexSpec:
    t = len(elements)
    if t == 0:
        raise ConstructionError("A Koszul-type complex needs at least one element")
    for a in elements:
        if a.nvars != module.nvars:
            raise ConstructionError(
                f"{format_monomial(a)} lives in {a.nvars} variables, M in {module.nvars}"
            )
    components = {
        i: tuple(Slot(J, coeff(J), _label_degree(elements, J)) for J in _labels(t, i))
        for i in range(t + 1)
    }
    if orientation is Orientation.CHAIN:
        diffs = _chain_diffs(elements, components)
    else:
        diffs = _cochain_diffs(elements, components)
    degree_hint, window_hint = _hints(elements, module, components, orientation, quotient)
    spec = ComplexSpec(
        orientation, module, components, diffs, quotient, name, degree_hint, window_hint
    )
    bad = check_d_squared_symbolic(spec)
    if bad:
        raise ConstructionError(f"d o d != 0 in {name} at (index, source, target) {bad}")
    logger.debug("built %s with %d slots", name, sum(len(s) for s in components.values()))
    return spec


def _tag(elements: Sequence[Monomial]) -> str:
    return ",".join(format_monomial(a) for a in elements)


def koszul(elements: Sequence[Monomial], module: CyclicModule) -> ComplexSpec:
    """The Koszul complex K.(a; M)."""
    unit = MonomialIdeal.unit(module.nvars)
    return _build(
        tuple(elements), module, lambda _: unit, Orientation.CHAIN, False,
        f"K({_tag(elements)})",
    )


def co_koszul(elements: Sequence[Monomial], module: CyclicModule) -> ComplexSpec:
    """The Koszul cochain complex K^.(a; M)."""
    unit = MonomialIdeal.unit(module.nvars)
    return _build(
        tuple(elements), module, lambda _: unit, Orientation.COCHAIN, False,
        f"coK({_tag(elements)})",
    )


def sub_koszul(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> ComplexSpec:
    """K.(a, q, M; n): slot J carries q^{n - sum c_J} M."""
    return _build(
        ws.elements,
        module,
        lambda J: ideal_power(ws.q, n - ws.weight_sum(J), convention),
        Orientation.CHAIN,
        False,
        f"K({_tag(ws.elements)};n={n})",
    )


def quotient_L(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> ComplexSpec:
    """L.(a, q, M; n) = K.(a; M) / K.(a, q, M; n), slot J is M / q^{n - sum c_J} M."""
    return _build(
        ws.elements,
        module,
        lambda J: ideal_power(ws.q, n - ws.weight_sum(J), convention),
        Orientation.CHAIN,
        True,
        f"L({_tag(ws.elements)};n={n})",
    )


def _check_nonnegative(n: int) -> None:
    if n < 0:
        raise ConstructionError(f"n = {n} must be nonnegative")


def sub_co_koszul(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
) -> ComplexSpec:
    """K^.(a, q, M; n): slot J carries q^{n + sum c_J} M."""
    _check_nonnegative(n)
    return _build(
        ws.elements,
        module,
        lambda J: ideal_power(ws.q, n + ws.weight_sum(J)),
        Orientation.COCHAIN,
        False,
        f"coK({_tag(ws.elements)};n={n})",
    )


def co_quotient_L(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
) -> ComplexSpec:
    """L^.(a, q, M; n), slot J is M / q^{n + sum c_J} M."""
    _check_nonnegative(n)
    return _build(
        ws.elements,
        module,
        lambda J: ideal_power(ws.q, n + ws.weight_sum(J)),
        Orientation.COCHAIN,
        True,
        f"coL({_tag(ws.elements)};n={n})",
    )


def rees_slice_oracle(ws: WeightedSystem, module: CyclicModule, n: int) -> ComplexSpec:
    """K.(a, q, M; n) read off as the degree-n part of the Koszul complex over the Rees module.

    Subsets are enumerated as bitmasks and each slot is the Rees component of degree
    n - sum c_J, which is zero in negative degree.
    """
    t = ws.length
    if t == 0:
        raise ConstructionError("A Koszul-type complex needs at least one element")
    by_size: dict[int, list[Slot]] = {i: [] for i in range(t + 1)}
    for mask in range(1 << t):
        label = tuple(j for j in range(t) if mask >> j & 1)
        rees_degree = n - ws.weight_sum(label)
        if rees_degree < 0:
            coeff = MonomialIdeal.zero(ws.nvars)
        elif rees_degree == 0:
            coeff = MonomialIdeal.unit(ws.nvars)
        else:
            coeff = ideal_power(ws.q, rees_degree)
        shift = sum(ws.elements[j].degree for j in label)
        by_size[len(label)].append(Slot(label, coeff, shift))
    components = {i: tuple(slots) for i, slots in by_size.items()}
    diffs: dict[int, tuple[DiffEntry, ...]] = {}
    for i in range(1, t + 1):
        position = {slot.label: k for k, slot in enumerate(components[i - 1])}
        entries = []
        for src, slot in enumerate(components[i]):
            sign = 1
            for j in slot.label:
                rest = tuple(x for x in slot.label if x != j)
                entries.append(DiffEntry(src, position[rest], sign, ws.elements[j]))
                sign = -sign
        diffs[i] = tuple(entries)
    return ComplexSpec(
        Orientation.CHAIN, module, components, diffs, False, f"rees({_tag(ws.elements)};n={n})"
    )


COMPLEX_KINDS = ("K", "L", "coK", "coL")


def build_complex(
    which: str,
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> ComplexSpec:
    """One of K., L., K^., L^. by its short name."""
    if which == "K":
        return sub_koszul(ws, module, n, convention)
    if which == "L":
        return quotient_L(ws, module, n, convention)
    if which == "coK":
        return sub_co_koszul(ws, module, n)
    if which == "coL":
        return co_quotient_L(ws, module, n)
    raise ConstructionError(f"Unknown complex {which!r}; expected one of {COMPLEX_KINDS}")


def _empty_system_complex(
    which: str,
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention,
) -> ComplexSpec:
    # No elements: a single slot q^n M (or M / q^n M) in index 0.
    if which not in COMPLEX_KINDS:
        raise ConstructionError(f"Unknown complex {which!r}; expected one of {COMPLEX_KINDS}")
    if which in ("K", "L"):
        orientation, coeff = Orientation.CHAIN, ideal_power(ws.q, n, convention)
    else:
        _check_nonnegative(n)
        orientation, coeff = Orientation.COCHAIN, ideal_power(ws.q, n)
    return ComplexSpec(
        orientation, module, {0: (Slot((), coeff, 0),)}, {}, which in ("L", "coL"),
        f"{which}(;n={n})",
    )


def cone_rebuild(
    which: str,
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> ComplexSpec:
    """The same complex assembled as a cone of multiplication by the last element.

    Chain complexes use the cone K(a'; n - c_t) -> K(a'; n), cochain complexes the
    cone K^(a'; n) -> K^(a'; n + c_t), where a' drops the last element. For t = 1
    the head complexes are the single slots q^{n - c_t} M and q^n M.
    """
    if ws.length < 1:
        raise ConstructionError("A cone rebuild needs at least one element")
    head = ws.prefix(ws.length - 1)
    last, c = ws.elements[-1], ws.weights[-1]
    label = ws.length - 1

    def part(m: int) -> ComplexSpec:
        if head.length == 0:
            return _empty_system_complex(which, head, module, m, convention)
        return build_complex(which, head, module, m, convention)

    if which in ("K", "L"):
        return mapping_cone(last, part(n - c), part(n), label)
    return co_mapping_cone(last, part(n), part(n + c), label)
