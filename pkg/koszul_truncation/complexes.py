"""Finite complexes of "coefficient ideal times M" slots, computed one degree at a time.

A slot carries a coefficient ideal J and a shift. Its module is J*M (or M/J*M for
quotient complexes) and its degree-e slice has the standard monomials of polynomial
degree e - shift (chain complexes) or e + shift (cochain complexes) as a basis.
Differentials are signed multiplications by monomials between slots.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import Enum

from koszul_truncation.errors import ConstructionError, NotFiniteLengthError, ShapeMismatchError
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
    artinian_length,
    contains,
    format_monomial,
    ideal_sum,
    is_m_primary,
    saturation,
    std_basis_slice,
)

logger = logging.getLogger(__name__)

UNSTABLE = "unstable"

DEFAULT_WINDOW = 4


class Orientation(str, Enum):
    CHAIN = "chain"
    COCHAIN = "cochain"

    @property
    def step(self) -> int:
        """Index change along the differential."""
        return -1 if self is Orientation.CHAIN else 1


@dataclass(frozen=True)
class Slot:
    """One summand: coefficient ideal J (module J*M or M/J*M) placed at ``shift``."""

    label: tuple[int, ...]
    coeff: MonomialIdeal
    shift: int


@dataclass(frozen=True)
class DiffEntry:
    """``sign * multiplier`` from slot ``source`` at index i to slot ``target`` at i+step."""

    source: int
    target: int
    sign: int
    multiplier: Monomial


@dataclass(frozen=True)
class ComplexSpec:
    """A finite complex of slots with monomial differentials.

    ``diffs[i]`` holds the entries of the differential leaving index i. The optional
    hints carry the degree cap and stability window the builder derived from its data.
    """

    orientation: Orientation
    module: CyclicModule
    components: Mapping[int, tuple[Slot, ...]]
    diffs: Mapping[int, tuple[DiffEntry, ...]]
    quotient: bool = False
    name: str = ""
    degree_hint: int | None = None
    window_hint: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        step = self.orientation.step
        for i, entries in self.diffs.items():
            sources = self.components.get(i, ())
            targets = self.components.get(i + step, ())
            for entry in entries:
                if not (0 <= entry.source < len(sources) and 0 <= entry.target < len(targets)):
                    raise ConstructionError(f"Differential entry {entry} out of range at index {i}")
                if entry.sign not in (1, -1):
                    raise ConstructionError(f"Sign must be +1 or -1, got {entry.sign}")
                src, tgt = sources[entry.source], targets[entry.target]
                expected = (
                    src.shift - tgt.shift
                    if self.orientation is Orientation.CHAIN
                    else tgt.shift - src.shift
                )
                if entry.multiplier.degree != expected:
                    raise ConstructionError(
                        f"Multiplier {format_monomial(entry.multiplier)} from {src.label} to "
                        f"{tgt.label} has degree {entry.multiplier.degree}, expected {expected}"
                    )

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(i for i, slots in self.components.items() if slots))

    @property
    def nvars(self) -> int:
        return self.module.nvars

    @property
    def max_shift(self) -> int:
        return max((s.shift for slots in self.components.values() for s in slots), default=0)

    @property
    def is_empty(self) -> bool:
        return not self.indices

    def polynomial_degree(self, slot: Slot, degree: int) -> int:
        if self.orientation is Orientation.CHAIN:
            return degree - slot.shift
        return degree + slot.shift

    def slot_basis(self, slot: Slot, degree: int) -> tuple[Monomial, ...]:
        """Standard monomials spanning the degree slice of one slot."""
        key = ("slot", slot, degree)
        if key not in self._cache:
            poly = self.polynomial_degree(slot, degree)
            if poly < 0:
                basis: tuple[Monomial, ...] = ()
            elif self.quotient:
                basis = tuple(
                    m for m in std_basis_slice(self.module.relations, poly)
                    if not contains(m, slot.coeff)
                )
            elif slot.coeff.is_zero:
                basis = ()
            else:
                basis = tuple(
                    m for m in std_basis_slice(self.module.relations, poly)
                    if contains(m, slot.coeff)
                )
            self._cache[key] = basis
        return self._cache[key]

    def index_basis(self, index: int, degree: int) -> dict[tuple[int, Monomial], int]:
        """Position of each (slot number, monomial) in the slice basis at ``index``."""
        key = ("index", index, degree)
        if key not in self._cache:
            lookup: dict[tuple[int, Monomial], int] = {}
            for j, slot in enumerate(self.components.get(index, ())):
                for m in self.slot_basis(slot, degree):
                    lookup[(j, m)] = len(lookup)
            self._cache[key] = lookup
        return self._cache[key]

    def slice_dim(self, index: int, degree: int) -> int:
        return len(self.index_basis(index, degree))

    def differential(self, index: int, degree: int, p: int = DEFAULT_PRIME) -> SparseMatrix:
        """Matrix of the differential leaving ``index`` on the degree slice."""
        key = ("diff", index, degree, p)
        if key in self._cache:
            return self._cache[key]
        source = self.index_basis(index, degree)
        target_index = index + self.orientation.step
        target = self.index_basis(target_index, degree)
        target_slots = self.components.get(target_index, ())
        entries = []
        for entry in self.diffs.get(index, ()):
            for (j, m), col in source.items():
                if j != entry.source:
                    continue
                image = m * entry.multiplier
                row = target.get((entry.target, image))
                if row is None:
                    if not self.quotient and not contains(image, self.module.relations):
                        raise ConstructionError(
                            f"{format_monomial(image)} escapes the coefficient ideal of slot "
                            f"{target_slots[entry.target].label} at index {target_index}"
                        )
                    continue
                entries.append((row, col, entry.sign))
        matrix = SparseMatrix.from_entries(len(target), len(source), entries, p)
        logger.debug(
            "%s d[%d] at degree %d: %dx%d, %d nonzeros",
            self.name or "complex",
            index,
            degree,
            matrix.rows,
            matrix.cols,
            matrix.nnz,
        )
        self._cache[key] = matrix
        return matrix

    def multiplication(
        self, index: int, degree: int, factor: Monomial, p: int = DEFAULT_PRIME
    ) -> SparseMatrix:
        """Multiplication by ``factor`` from the degree slice to degree + deg(factor)."""
        source = self.index_basis(index, degree)
        target = self.index_basis(index, degree + factor.degree)
        entries = []
        for (j, m), col in source.items():
            row = target.get((j, m * factor))
            if row is not None:
                entries.append((row, col, 1))
        return SparseMatrix.from_entries(len(target), len(source), entries, p)

    def degree_range(self, cap: int) -> range:
        """Degrees that can carry a nonzero slice, up to ``cap``."""
        low = 0 if self.orientation is Orientation.CHAIN else -self.max_shift
        return range(low, cap + 1)

    def default_degree_cap(self) -> int:
        if self.degree_hint is not None:
            return self.degree_hint
        spread = max(
            [self.module.relations.max_generator_degree]
            + [s.coeff.max_generator_degree for slots in self.components.values() for s in slots]
        )
        return self.max_shift + 3 * spread + DEFAULT_WINDOW

    def default_window(self) -> int:
        return self.window_hint if self.window_hint is not None else DEFAULT_WINDOW


def slice_complex(
    spec: ComplexSpec, degree: int, p: int = DEFAULT_PRIME
) -> dict[int, SparseMatrix]:
    """Differential matrices of every index on one degree slice."""
    out = {}
    for i in sorted(set(spec.components) | set(spec.diffs)):
        out[i] = spec.differential(i, degree, p)
    return out


@dataclass
class HomologyTable:
    """Homology dimensions per (index, degree) with the stability verdict."""

    dims: dict[tuple[int, int], int]
    indices: tuple[int, ...]
    low: int
    degree_cap: int
    window: int
    stable_indices: tuple[int, ...]
    p: int = DEFAULT_PRIME

    @property
    def stable(self) -> bool:
        return set(self.stable_indices) >= set(self.indices)

    def dim(self, index: int, degree: int) -> int:
        return self.dims.get((index, degree), 0)

    def total_length(self, index: int) -> int | str:
        """Sum of the slice dimensions at ``index``, or ``UNSTABLE``."""
        if index not in self.indices:
            return 0
        if index not in self.stable_indices:
            return UNSTABLE
        return sum(v for (i, _), v in self.dims.items() if i == index)

    def euler_characteristic(self) -> int | str:
        total = 0
        for i in self.indices:
            length = self.total_length(i)
            if length == UNSTABLE:
                return UNSTABLE
            total += (-1) ** i * int(length)
        return total

    def rows(self) -> list[tuple[int, int, int]]:
        return sorted((i, e, v) for (i, e), v in self.dims.items())

    def to_dict(self) -> dict:
        return {
            "degree_cap": self.degree_cap,
            "window": self.window,
            "prime": self.p,
            "stable": self.stable,
            "stable_indices": list(self.stable_indices),
            "dims": [{"i": i, "e": e, "dim": v} for i, e, v in self.rows()],
            "lengths": {str(i): self.total_length(i) for i in self.indices},
        }


def homology_dims(
    spec: ComplexSpec,
    degree_cap: int | None = None,
    window: int | None = None,
    p: int = DEFAULT_PRIME,
) -> HomologyTable:
    """Slice-wise homology dimensions for all degrees up to ``degree_cap``.

    An index counts as stable when its last ``window`` slices vanish.
    """
    cap = spec.default_degree_cap() if degree_cap is None else degree_cap
    w = spec.default_window() if window is None else window
    degrees = spec.degree_range(cap)
    step = spec.orientation.step
    dims: dict[tuple[int, int], int] = {}
    for e in degrees:
        ranks = {i: rank(spec.differential(i, e, p)) for i in spec.indices}
        for i in spec.indices:
            incoming = ranks.get(i - step, 0)
            value = spec.slice_dim(i, e) - ranks[i] - incoming
            if value:
                dims[(i, e)] = value
    stable = tuple(
        i
        for i in spec.indices
        if w <= len(degrees) and all(dims.get((i, e), 0) == 0 for e in degrees[-w:])
    )
    table = HomologyTable(dims, spec.indices, degrees.start, cap, w, stable, p)
    if not table.stable:
        logger.warning(
            "%s: indices %s not stable at degree cap %d (window %d)",
            spec.name or "complex",
            sorted(set(spec.indices) - set(stable)),
            cap,
            w,
        )
    return table


def total_length(table: HomologyTable, index: int) -> int | str:
    return table.total_length(index)


def euler_characteristic(
    spec: ComplexSpec,
    degree_cap: int | None = None,
    window: int | None = None,
    p: int = DEFAULT_PRIME,
) -> int | str:
    """Alternating sum of homology lengths, or ``UNSTABLE``."""
    return homology_dims(spec, degree_cap, window, p).euler_characteristic()


def slot_length(spec: ComplexSpec, slot: Slot) -> int:
    """Length of the module sitting in one slot."""
    relations = spec.module.relations
    if spec.quotient:
        if slot.coeff.is_zero:
            if not is_m_primary(relations):
                raise NotFiniteLengthError(f"Slot {slot.label} is M = {spec.module}")
            return artinian_length(relations)
        return artinian_length(ideal_sum(relations, slot.coeff))
    if all(contains(g, relations) for g in slot.coeff.generators):
        return 0
    if is_m_primary(relations):
        return artinian_length(relations) - artinian_length(ideal_sum(relations, slot.coeff))
    return _finite_submodule_length(slot.coeff, relations, spec.name or "complex", slot.label)


def _finite_submodule_length(
    coeff: MonomialIdeal, relations: MonomialIdeal, name: str, label: tuple[int, ...]
) -> int:
    # (J + I)/I is finite iff J lies in the saturation I : m^inf; its monomials outside I
    # then have degree below maxdeg(I : m^inf) + s, where s is the saturation stage.
    saturated, stage = saturation(relations, MonomialIdeal.maximal(relations.nvars))
    if not all(contains(g, saturated) for g in coeff.generators):
        raise NotFiniteLengthError(f"Slot {label} of {name} is infinite")
    bound = saturated.max_generator_degree + stage
    return sum(
        1
        for e in range(bound + 1)
        for mono in std_basis_slice(relations, e)
        if contains(mono, coeff)
    )


def euler_by_terms(spec: ComplexSpec) -> int:
    """Alternating sum of the termwise lengths."""
    return sum(
        (-1) ** i * slot_length(spec, slot)
        for i, slots in spec.components.items()
        for slot in slots
    )


def check_d_squared(
    spec: ComplexSpec, degrees: Iterable[int], p: int = DEFAULT_PRIME
) -> list[tuple[int, int]]:
    """(index, degree) pairs where d o d is nonzero."""
    step = spec.orientation.step
    bad = []
    for e in degrees:
        for i in spec.indices:
            if i + step not in spec.diffs:
                continue
            if multiply(spec.differential(i + step, e, p), spec.differential(i, e, p)).entries:
                bad.append((i, e))
    return bad


def check_d_squared_symbolic(spec: ComplexSpec) -> list[tuple[int, int, int]]:
    """(index, source slot, target slot) where d o d does not cancel as a monomial map.

    Slot maps are multiplications by monomials, so cancellation of the signed
    products covers every degree at once.
    """
    step = spec.orientation.step
    bad = set()
    for i, first in spec.diffs.items():
        second = spec.diffs.get(i + step, ())
        totals: Counter[tuple[int, int, tuple[int, ...]]] = Counter()
        for inner in first:
            for outer in second:
                if outer.source == inner.target:
                    product = inner.multiplier * outer.multiplier
                    totals[(inner.source, outer.target, product.exponents)] += (
                        inner.sign * outer.sign
                    )
        bad.update((i, src, tgt) for (src, tgt, _), total in totals.items() if total)
    return sorted(bad)


def canonical_form(spec: ComplexSpec) -> tuple:
    """Label-keyed description independent of slot order."""
    slots = []
    for i, comp in spec.components.items():
        for s in comp:
            slots.append((i, s.label, s.coeff.generators, s.shift))
    entries = []
    step = spec.orientation.step
    for i, diff in spec.diffs.items():
        for entry in diff:
            src = spec.components[i][entry.source].label
            tgt = spec.components[i + step][entry.target].label
            entries.append((i, src, tgt, entry.sign, entry.multiplier.exponents))
    return (
        spec.orientation.value,
        spec.module,
        spec.quotient,
        tuple(sorted(slots)),
        tuple(sorted(entries)),
    )


def structurally_equal(left: ComplexSpec, right: ComplexSpec) -> bool:
    return canonical_form(left) == canonical_form(right)


def _check_cone_inputs(source: ComplexSpec, target: ComplexSpec) -> None:
    if (source.orientation, source.module, source.quotient) != (
        target.orientation,
        target.module,
        target.quotient,
    ):
        raise ShapeMismatchError("Cone inputs differ in orientation, module or quotient flag")
    if set(source.indices) != set(target.indices):
        raise ShapeMismatchError("Cone inputs live in different indices")
    for i in source.indices:
        a, b = source.components[i], target.components[i]
        if [(s.label, s.shift) for s in a] != [(s.label, s.shift) for s in b]:
            raise ShapeMismatchError(f"Cone inputs differ in slot layout at index {i}")
        if source.diffs.get(i, ()) != target.diffs.get(i, ()):
            raise ShapeMismatchError(f"Cone inputs differ in differential at index {i}")


def mapping_cone(
    factor: Monomial,
    source: ComplexSpec,
    target: ComplexSpec,
    new_label: int,
    name: str = "",
) -> ComplexSpec:
    """Cone of multiplication by ``factor`` between chain complexes.

    C_i = source_{i-1} + target_i with d(x, y) = (d x, d y + (-1)^(i-1) factor x).
    Slots coming from the source get ``new_label`` appended to their labels.
    """
    if source.orientation is not Orientation.CHAIN:
        raise ShapeMismatchError("mapping_cone expects chain complexes; use co_mapping_cone")
    _check_cone_inputs(source, target)
    if source.is_empty:
        return target

    indices = sorted({i + 1 for i in source.indices} | set(target.indices))
    components: dict[int, tuple[Slot, ...]] = {}
    offsets: dict[int, int] = {}
    for i in indices:
        ys = target.components.get(i, ())
        xs = tuple(
            Slot(s.label + (new_label,), s.coeff, s.shift + factor.degree)
            for s in source.components.get(i - 1, ())
        )
        offsets[i] = len(ys)
        components[i] = ys + xs

    diffs: dict[int, tuple[DiffEntry, ...]] = {}
    for i in indices:
        entries = list(target.diffs.get(i, ()))
        for e in source.diffs.get(i - 1, ()):
            entries.append(
                DiffEntry(offsets[i] + e.source, offsets[i - 1] + e.target, e.sign, e.multiplier)
            )
        sign = (-1) ** (i - 1)
        for j, _ in enumerate(source.components.get(i - 1, ())):
            entries.append(DiffEntry(offsets[i] + j, j, sign, factor))
        if entries:
            diffs[i] = tuple(entries)

    return ComplexSpec(
        Orientation.CHAIN,
        target.module,
        components,
        diffs,
        target.quotient,
        name or f"cone({format_monomial(factor)})",
    )


def co_mapping_cone(
    factor: Monomial,
    source: ComplexSpec,
    target: ComplexSpec,
    new_label: int,
    name: str = "",
) -> ComplexSpec:
    """Cone of multiplication by ``factor`` between cochain complexes.

    D^i = source^i + target^(i-1) with d(x, y) = (d x, d y + (-1)^i factor x).
    Slots coming from the target get ``new_label`` appended to their labels.
    """
    if source.orientation is not Orientation.COCHAIN:
        raise ShapeMismatchError("co_mapping_cone expects cochain complexes")
    _check_cone_inputs(source, target)
    if source.is_empty:
        return source

    indices = sorted(set(source.indices) | {i + 1 for i in target.indices})
    components: dict[int, tuple[Slot, ...]] = {}
    offsets: dict[int, int] = {}
    for i in indices:
        xs = source.components.get(i, ())
        ys = tuple(
            Slot(s.label + (new_label,), s.coeff, s.shift + factor.degree)
            for s in target.components.get(i - 1, ())
        )
        offsets[i] = len(xs)
        components[i] = xs + ys

    diffs: dict[int, tuple[DiffEntry, ...]] = {}
    for i in indices:
        entries = list(source.diffs.get(i, ()))
        for e in target.diffs.get(i - 1, ()):
            entries.append(
                DiffEntry(offsets[i] + e.source, offsets[i + 1] + e.target, e.sign, e.multiplier)
            )
        sign = (-1) ** i
        if i + 1 in offsets:
            for j, _ in enumerate(source.components.get(i, ())):
                entries.append(DiffEntry(j, offsets[i + 1] + j, sign, factor))
        if entries:
            diffs[i] = tuple(entries)

    return ComplexSpec(
        Orientation.COCHAIN,
        source.module,
        components,
        diffs,
        source.quotient,
        name or f"cocone({format_monomial(factor)})",
    )


@dataclass
class SESReport:
    """Outcome of checking 0 -> sub -> mid -> quot -> 0 on slices."""

    violations: list[dict] = field(default_factory=list)
    chi: dict[str, int | str] = field(default_factory=dict)
    euler_ok: bool | None = None

    @property
    def success(self) -> bool:
        return not self.violations and self.euler_ok is not False

    def __str__(self) -> str:
        if self.success:
            return f"✓ exact-sequence accounting holds (chi: {self.chi})"
        lines = [f"✗ {len(self.violations)} termwise violations, euler_ok={self.euler_ok}"]
        lines.extend(f"  {v}" for v in self.violations[:20])
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "violations": self.violations,
            "chi": self.chi,
            "euler_ok": self.euler_ok,
        }


def ses_check(
    sub: ComplexSpec,
    mid: ComplexSpec,
    quot: ComplexSpec,
    degree_cap: int | None = None,
    window: int | None = None,
    p: int = DEFAULT_PRIME,
) -> SESReport:
    """Termwise dimension additivity and chi(mid) = chi(sub) + chi(quot)."""
    cap = degree_cap if degree_cap is not None else mid.default_degree_cap()
    report = SESReport()
    indices = sorted(set(sub.indices) | set(mid.indices) | set(quot.indices))
    low = min(spec.degree_range(cap).start for spec in (sub, mid, quot))
    for e in range(low, cap + 1):
        for i in indices:
            a, b, c = sub.slice_dim(i, e), mid.slice_dim(i, e), quot.slice_dim(i, e)
            if a + c != b:
                report.violations.append({"i": i, "e": e, "sub": a, "mid": b, "quot": c})
    chis = {
        name: euler_characteristic(spec, cap, window, p)
        for name, spec in (("sub", sub), ("mid", mid), ("quot", quot))
    }
    report.chi = chis
    if all(v != UNSTABLE for v in chis.values()):
        report.euler_ok = chis["mid"] == int(chis["sub"]) + int(chis["quot"])
    return report


def annihilation_check(
    spec: ComplexSpec,
    factor: Monomial,
    degree_cap: int | None = None,
    p: int = DEFAULT_PRIME,
) -> bool:
    """True iff multiplication by ``factor`` sends every cycle to a boundary, slice-wise."""
    cap = spec.default_degree_cap() if degree_cap is None else degree_cap
    step = spec.orientation.step
    for i in spec.indices:
        for e in spec.degree_range(cap):
            if not spec.slice_dim(i, e):
                continue
            cycles = kernel_basis(spec.differential(i, e, p))
            if not cycles:
                continue
            target_degree = e + factor.degree
            image = multiply(
                spec.multiplication(i, e, factor, p),
                SparseMatrix.from_columns(spec.slice_dim(i, e), cycles, p),
            )
            if not image.entries:
                continue
            boundaries = spec.differential(i - step, target_degree, p)
            if rank_modulo(image, boundaries) if boundaries.cols else rank(image):
                logger.info(
                    "%s: %s does not kill homology at (%d, %d)",
                    spec.name or "complex",
                    format_monomial(factor),
                    i,
                    e,
                )
                return False
    return True
