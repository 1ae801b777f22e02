"""Monomials, monomial ideals and cyclic modules over k[x_1, ..., x_d].

All ideal arithmetic here is combinatorial: an ideal is its set of minimal monomial
generators, a quotient R/I is described by its staircase of standard monomials.
Lengths and colons agree with those over the localization at (x_1, ..., x_d) because
every ideal involved is monomial.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

from koszul_truncation.errors import (
    InRelationsError,
    InstanceError,
    NoStabilizationError,
    NotArtinianError,
)

logger = logging.getLogger(__name__)

ALIASES = ("x", "y", "z")

_TOKEN = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*(?:\^\s*(\d+))?\s*$")


class NegPowerConvention(str, Enum):
    """Meaning of q^j for j <= 0."""

    UNIT = "unit"  # q^j = (1) for j <= 0
    ZERO = "zero"  # q^j = (0) for j < 0, q^0 = (1)


@dataclass(frozen=True, order=True)
class Monomial:
    """A monomial x^e given by its exponent vector."""

    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.exponents):
            raise ValueError(f"Negative exponent in {self.exponents}")

    @classmethod
    def one(cls, nvars: int) -> Monomial:
        return cls((0,) * nvars)

    @classmethod
    def variable(cls, index: int, nvars: int, power: int = 1) -> Monomial:
        exps = [0] * nvars
        exps[index] = power
        return cls(tuple(exps))

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    @cached_property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(v for v, e in enumerate(self.exponents) if e)

    @property
    def is_one(self) -> bool:
        return not any(self.exponents)

    def pure_power_variable(self) -> int | None:
        """Index v if this monomial is x_v^k with k >= 1."""
        support = self.support
        return support[0] if len(support) == 1 else None

    def divides(self, other: Monomial) -> bool:
        return all(a <= b for a, b in zip(self.exponents, other.exponents, strict=True))

    def gcd(self, other: Monomial) -> Monomial:
        return Monomial(tuple(map(min, self.exponents, other.exponents)))

    def lcm(self, other: Monomial) -> Monomial:
        return Monomial(tuple(map(max, self.exponents, other.exponents)))

    def quotient(self, other: Monomial) -> Monomial:
        """self / other; other must divide self."""
        return Monomial(tuple(a - b for a, b in zip(self.exponents, other.exponents, strict=True)))

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents, strict=True)))

    def __pow__(self, k: int) -> Monomial:
        return Monomial(tuple(a * k for a in self.exponents))

    def sort_key(self) -> tuple:
        """Degree first, then x_1 > x_2 > ... lexicographically."""
        return (self.degree, tuple(-e for e in self.exponents))

    def __str__(self) -> str:
        return format_monomial(self)


@dataclass(frozen=True)
class MonomialIdeal:
    """A monomial ideal stored by its minimal generators.

    Build instances with :func:`minimalize` or :meth:`of`; the constructor trusts that
    ``generators`` is already minimal and sorted.
    """

    nvars: int
    generators: tuple[Monomial, ...] = ()

    @classmethod
    def of(cls, nvars: int, gens: Iterable[Monomial]) -> MonomialIdeal:
        return minimalize(gens, nvars)

    @classmethod
    def zero(cls, nvars: int) -> MonomialIdeal:
        return cls(nvars, ())

    @classmethod
    def unit(cls, nvars: int) -> MonomialIdeal:
        return cls(nvars, (Monomial.one(nvars),))

    @classmethod
    def maximal(cls, nvars: int) -> MonomialIdeal:
        return cls(nvars, tuple(Monomial.variable(v, nvars) for v in range(nvars)))

    @property
    def is_zero(self) -> bool:
        return not self.generators

    @property
    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_one

    @cached_property
    def max_generator_degree(self) -> int:
        return max((g.degree for g in self.generators), default=0)

    @cached_property
    def pure_powers(self) -> dict[int, int]:
        """Variable index -> exponent of the pure power generator, where one exists."""
        powers: dict[int, int] = {}
        for g in self.generators:
            v = g.pure_power_variable()
            if v is not None:
                powers[v] = g.exponents[v]
        return powers

    def __contains__(self, f: Monomial) -> bool:
        return contains(f, self)

    def __str__(self) -> str:
        return "[" + ", ".join(format_monomial(g) for g in self.generators) + "]"


@dataclass(frozen=True)
class CyclicModule:
    """M = R/I for a monomial ideal I."""

    relations: MonomialIdeal

    @classmethod
    def free(cls, nvars: int) -> CyclicModule:
        return cls(MonomialIdeal.zero(nvars))

    @property
    def nvars(self) -> int:
        return self.relations.nvars

    @cached_property
    def dimension(self) -> int:
        return module_dimension(self)

    @property
    def is_artinian(self) -> bool:
        return is_m_primary(self.relations)

    def __str__(self) -> str:
        if self.relations.is_zero:
            return "R"
        return f"R/({str(self.relations)[1:-1]})"


def minimalize(gens: Iterable[Monomial], nvars: int | None = None) -> MonomialIdeal:
    """Return the ideal generated by ``gens`` with a divisibility-minimal generator set."""
    candidates = sorted(set(gens), key=Monomial.sort_key)
    if nvars is None:
        if not candidates:
            raise ValueError("Cannot infer the variable count of an empty generator set")
        nvars = candidates[0].nvars
    kept: list[Monomial] = []
    for g in candidates:
        if g.nvars != nvars:
            raise ValueError(f"Monomial {g.exponents} does not live in {nvars} variables")
        if not any(h.divides(g) for h in kept):
            kept.append(g)
    return MonomialIdeal(nvars, tuple(kept))


def contains(f: Monomial, ideal: MonomialIdeal) -> bool:
    """True iff some generator of ``ideal`` divides ``f``."""
    return any(g.divides(f) for g in ideal.generators)


def ideal_sum(left: MonomialIdeal, right: MonomialIdeal) -> MonomialIdeal:
    _check_same_ring(left, right)
    return minimalize(left.generators + right.generators, left.nvars)


def ideal_product(left: MonomialIdeal, right: MonomialIdeal) -> MonomialIdeal:
    _check_same_ring(left, right)
    return minimalize((g * h for g in left.generators for h in right.generators), left.nvars)


def ideal_intersection(left: MonomialIdeal, right: MonomialIdeal) -> MonomialIdeal:
    _check_same_ring(left, right)
    return minimalize((g.lcm(h) for g in left.generators for h in right.generators), left.nvars)


@lru_cache(maxsize=4096)
def _positive_power(ideal: MonomialIdeal, n: int) -> MonomialIdeal:
    if n == 1:
        return ideal
    return ideal_product(_positive_power(ideal, n - 1), ideal)


def ideal_power(
    ideal: MonomialIdeal,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> MonomialIdeal:
    """I^n, with I^n for n <= 0 decided by ``convention``."""
    if n >= 1:
        return _positive_power(ideal, n)
    if n == 0 or NegPowerConvention(convention) is NegPowerConvention.UNIT:
        return MonomialIdeal.unit(ideal.nvars)
    return MonomialIdeal.zero(ideal.nvars)


def colon(ideal: MonomialIdeal, f: Monomial) -> MonomialIdeal:
    """(I : f) for a monomial f."""
    return minimalize((g.quotient(g.gcd(f)) for g in ideal.generators), ideal.nvars)


def colon_ideal(ideal: MonomialIdeal, other: MonomialIdeal) -> MonomialIdeal:
    """(I : J) as the intersection of the colons by the generators of J."""
    _check_same_ring(ideal, other)
    if other.is_zero:
        return MonomialIdeal.unit(ideal.nvars)
    result = colon(ideal, other.generators[0])
    for f in other.generators[1:]:
        result = ideal_intersection(result, colon(ideal, f))
    return result


def saturation(ideal: MonomialIdeal, other: MonomialIdeal) -> tuple[MonomialIdeal, int]:
    """(I : J^infinity) and the first index s with I_s = I_{s+1}.

    The chain I_0 = I, I_{s+1} = I_s : J is ascending, so this terminates.
    """
    if other.is_zero:
        raise ValueError("Saturation with respect to the zero ideal is undefined")
    current, stage = ideal, 0
    while True:
        nxt = colon_ideal(current, other)
        if nxt == current:
            return current, stage
        current, stage = nxt, stage + 1


def radical(ideal: MonomialIdeal) -> MonomialIdeal:
    """Replace each generator by the product of its support variables."""
    return minimalize(
        (Monomial(tuple(1 if e else 0 for e in g.exponents)) for g in ideal.generators),
        ideal.nvars,
    )


def is_m_primary(ideal: MonomialIdeal) -> bool:
    """Every variable has a pure power among the generators (or I is the unit ideal)."""
    if ideal.is_unit:
        return True
    return len(ideal.pure_powers) == ideal.nvars


def module_dimension(module: CyclicModule) -> int:
    """Krull dimension of R/I; -1 for the zero module.

    It is the size of the largest variable set S such that no generator of I is
    supported inside S (the coordinate subspace spanned by S avoids V(I)).
    """
    ideal = module.relations
    if ideal.is_unit:
        return -1
    supports = [frozenset(g.support) for g in ideal.generators]
    best = 0
    for mask in range(1 << ideal.nvars):
        chosen = frozenset(v for v in range(ideal.nvars) if mask >> v & 1)
        if len(chosen) > best and not any(s <= chosen for s in supports):
            best = len(chosen)
    return best


@lru_cache(maxsize=256)
def monomials_of_degree(nvars: int, degree: int) -> tuple[Monomial, ...]:
    """All monomials of the given degree, x_1-heavy first."""
    if degree < 0:
        return ()
    return tuple(Monomial(e) for e in _compositions(nvars, degree))


def _compositions(nvars: int, total: int) -> list[tuple[int, ...]]:
    if nvars == 0:
        return [()] if total == 0 else []
    if nvars == 1:
        return [(total,)]
    out = []
    for first in range(total, -1, -1):
        out.extend((first, *rest) for rest in _compositions(nvars - 1, total - first))
    return out


@lru_cache(maxsize=16384)
def std_basis_slice(ideal: MonomialIdeal, degree: int) -> tuple[Monomial, ...]:
    """All degree-``degree`` monomials outside ``ideal``."""
    return tuple(m for m in monomials_of_degree(ideal.nvars, degree) if not contains(m, ideal))


def standard_monomial_count(ideal: MonomialIdeal) -> int:
    """Number of monomials outside an m-primary ideal, by recursion on the first variable."""
    if not is_m_primary(ideal):
        raise NotArtinianError(f"{ideal} is not m-primary")
    return _count_standard(tuple(g.exponents for g in ideal.generators), ideal.nvars)


@lru_cache(maxsize=65536)
def _count_standard(gens: tuple[tuple[int, ...], ...], nvars: int) -> int:
    if any(not any(g) for g in gens):
        return 0
    if nvars == 0:
        return 1
    breaks = sorted({0} | {g[0] for g in gens})
    total = 0
    for lo, hi in zip(breaks, breaks[1:], strict=False):
        restricted = minimalize(
            (Monomial(g[1:]) for g in gens if g[0] <= lo),
            nvars - 1,
        )
        total += (hi - lo) * _count_standard(
            tuple(g.exponents for g in restricted.generators), nvars - 1
        )
    return total


def artinian_length(ideal: MonomialIdeal) -> int:
    """Length of R/I for m-primary I."""
    if not is_m_primary(ideal):
        raise NotArtinianError(f"R/{ideal} does not have finite length")
    return standard_monomial_count(ideal)


def socle_exponent(ideal: MonomialIdeal) -> int:
    """Least s with m^s contained in ``ideal`` (m-primary ideals only)."""
    if not is_m_primary(ideal):
        raise NotArtinianError(f"{ideal} is not m-primary")
    if ideal.is_unit:
        return 0
    bound = sum(p - 1 for p in ideal.pure_powers.values()) + 1
    s = bound
    while s > 0 and not std_basis_slice(ideal, s - 1):
        s -= 1
    return s


def hilbert_samuel(
    module: CyclicModule,
    q: MonomialIdeal,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> int:
    """l(M / q^n M) = l(R / (I + q^n))."""
    return artinian_length(ideal_sum(module.relations, ideal_power(q, n, convention)))


def initial_degree(
    f: Monomial, q: MonomialIdeal, module: CyclicModule, scan_cap: int | None = None
) -> int | float:
    """Largest n with f in q^n + I; ``math.inf`` when q is the unit ideal.

    For a proper q every q^n lies in m^n, so the answer is at most deg f. The scan
    stops at ``scan_cap`` (default 10 * d * max(deg f, 1)).

    Raises:
        InRelationsError: If f is zero in M
        NoStabilizationError: If f still lies in q^(scan_cap + 1) + I
    """
    if contains(f, module.relations):
        raise InRelationsError(f"{f} is zero in {module}")
    if q.is_unit:
        return math.inf
    cap = 10 * q.nvars * max(f.degree, 1) if scan_cap is None else scan_cap
    for n in range(cap + 1):
        if not contains(f, ideal_sum(ideal_power(q, n + 1), module.relations)):
            return n
    raise NoStabilizationError(f"{f} lies in q^{cap + 1} + I for q = {q}, M = {module}")


def _check_same_ring(left: MonomialIdeal, right: MonomialIdeal) -> None:
    if left.nvars != right.nvars:
        raise ValueError(f"Ideals live in {left.nvars} and {right.nvars} variables")


def variable_names(nvars: int) -> tuple[str, ...]:
    """Default display names: x, y, z for up to three variables, else x1..xd."""
    if nvars <= len(ALIASES):
        return ALIASES[:nvars]
    return tuple(f"x{v + 1}" for v in range(nvars))


def format_monomial(m: Monomial, names: Sequence[str] | None = None) -> str:
    """Render as ``x^2*y``; the empty monomial is ``1``."""
    names = names or variable_names(m.nvars)
    parts = []
    for name, e in zip(names, m.exponents, strict=True):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) or "1"


def parse_monomial(text: str, nvars: int, names: Sequence[str] | None = None) -> Monomial:
    """Parse ``x1^2*x3`` (or ``x^2*z`` when d <= 3, or ``1``).

    Raises:
        InstanceError: If a factor is malformed or names an unknown variable
    """
    lookup = {f"x{v + 1}": v for v in range(nvars)}
    if nvars <= len(ALIASES):
        lookup.update({name: v for v, name in enumerate(ALIASES[:nvars])})
    if names:
        lookup.update({name: v for v, name in enumerate(names)})

    text = str(text).strip()
    if text == "1":
        return Monomial.one(nvars)
    exps = [0] * nvars
    for factor in text.split("*"):
        match = _TOKEN.match(factor)
        if not match:
            raise InstanceError(f"Malformed monomial factor {factor!r} in {text!r}")
        name, power = match.group(1), match.group(2)
        if name not in lookup:
            raise InstanceError(f"Unknown variable {name!r} in {text!r}")
        exps[lookup[name]] += int(power) if power is not None else 1
    return Monomial(tuple(exps))


def parse_ideal(
    spec: str | Sequence[str],
    nvars: int,
    names: Sequence[str] | None = None,
) -> MonomialIdeal:
    """Parse ``[x^2, x*y, y^3]`` or a list of monomial strings; ``[]`` is the zero ideal."""
    if isinstance(spec, str):
        body = spec.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        items = [item for item in body.split(",") if item.strip()]
    else:
        items = list(spec)
    return minimalize((parse_monomial(item, nvars, names) for item in items), nvars)
