"""Seeded random instances and the fixed worked instances."""

from __future__ import annotations

import logging

import numpy as np

from koszul_truncation.builders import WeightedSystem
from koszul_truncation.errors import ConstructionError
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    ideal_power,
    ideal_sum,
    is_m_primary,
    minimalize,
    parse_ideal,
    parse_monomial,
)

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 500

Instance = tuple[str, WeightedSystem, CyclicModule]


def _monomial_of_degree(rng: np.random.Generator, nvars: int, degree: int) -> Monomial:
    exps = [0] * nvars
    for v in rng.integers(0, nvars, size=degree):
        exps[int(v)] += 1
    return Monomial(tuple(exps))


def _random_monomial(rng: np.random.Generator, nvars: int, max_degree: int) -> Monomial:
    return _monomial_of_degree(rng, nvars, int(rng.integers(0, max_degree + 1)))


def random_q(rng: np.random.Generator, nvars: int, max_degree: int = 3) -> MonomialIdeal:
    """An m-primary monomial ideal: pure powers of every variable plus a few mixed terms."""
    gens = [
        Monomial.variable(v, nvars, int(rng.integers(1, max_degree + 1))) for v in range(nvars)
    ]
    for _ in range(int(rng.integers(0, nvars + 1))):
        m = _random_monomial(rng, nvars, max_degree)
        if not m.is_one:
            gens.append(m)
    return minimalize(gens, nvars)


def random_system(
    rng: np.random.Generator,
    nvars: int,
    length: int,
    max_degree: int = 4,
    max_weight: int = 2,
    q: MonomialIdeal | None = None,
) -> WeightedSystem:
    """A random weighted system: each a_i is a generator of q^{c_i} times a small monomial."""
    q = random_q(rng, nvars, max(1, max_degree // 2)) if q is None else q
    elements, weights = [], []
    for _ in range(length):
        c = int(rng.integers(1, max_weight + 1))
        gens = ideal_power(q, c).generators
        g = gens[int(rng.integers(0, len(gens)))]
        extra = _random_monomial(rng, nvars, 1) if rng.random() < 0.3 else Monomial.one(nvars)
        elements.append(g * extra)
        weights.append(c)
    return WeightedSystem(tuple(elements), tuple(weights), q)


def _random_relations(rng: np.random.Generator, nvars: int, max_degree: int) -> MonomialIdeal:
    """Zero about a quarter of the time; otherwise a nilpotent direction plus mixed terms."""
    if rng.random() < 0.25:
        return MonomialIdeal.zero(nvars)
    top = max(2, max_degree)
    gens = []
    if rng.random() < 0.7:
        v = int(rng.integers(0, nvars))
        gens.append(Monomial.variable(v, nvars, int(rng.integers(2, top + 1))))
    for _ in range(int(rng.integers(1, nvars + 1))):
        gens.append(_monomial_of_degree(rng, nvars, int(rng.integers(2, top + 1))))
    return minimalize(gens, nvars)


def random_instance(
    rng: np.random.Generator,
    max_vars: int = 3,
    max_elems: int = 3,
    max_degree: int = 4,
) -> tuple[WeightedSystem, CyclicModule]:
    """A random (ws, M) with t = dim M >= 1 and (a) + I m-primary.

    Raises:
        ConstructionError: If no valid instance turns up within the attempt budget
    """
    for _ in range(MAX_ATTEMPTS):
        nvars = int(rng.integers(1, max_vars + 1))
        module = CyclicModule(_random_relations(rng, nvars, max_degree))
        t = module.dimension
        if t < 1 or t > max_elems:
            continue
        q = random_q(rng, nvars, 2)
        ws = _sop_attempt(rng, module, q, max_degree)
        if ws is not None:
            return ws, module
    raise ConstructionError(f"No valid random instance after {MAX_ATTEMPTS} attempts")


def _sop_attempt(
    rng: np.random.Generator,
    module: CyclicModule,
    q: MonomialIdeal,
    max_degree: int,
) -> WeightedSystem | None:
    """Pure powers of the variables that are not nilpotent on M, in random order.

    A monomial (a) + I is m-primary only if every variable has a pure power in it,
    so a monomial system of parameters consists of pure powers of exactly these
    variables. Exponents may exceed the q^c generator and c may sit below its maximum.
    """
    nvars = module.nvars
    free = [v for v in range(nvars) if v not in module.relations.pure_powers]
    if len(free) != module.dimension:
        return None
    elements, weights = [], []
    for v in rng.permutation(free):
        base = q.pure_powers[int(v)]
        power = base * int(rng.integers(1, 4)) + int(rng.integers(0, base + 1))
        if power > 2 * max_degree:
            return None
        elements.append(Monomial.variable(int(v), nvars, power))
        weights.append(int(rng.integers(1, power // base + 1)))
    ideal = minimalize(elements, nvars)
    if not is_m_primary(ideal_sum(ideal, module.relations)):
        return None
    return WeightedSystem(tuple(elements), tuple(weights), q)


def random_corpus(
    seed: int,
    size: int,
    max_vars: int = 3,
    max_elems: int = 3,
    max_degree: int = 4,
) -> list[Instance]:
    """``size`` instances named r0000, r0001, ...; identical for identical arguments."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(size):
        ws, module = random_instance(rng, max_vars, max_elems, max_degree)
        out.append((f"r{k:04d}", ws, module))
    logger.info("generated %d corpus instances from seed %d", size, seed)
    return out


def _instance(
    name: str, nvars: int, relations: str, q: str, pairs: list[tuple[str, int]]
) -> Instance:
    ideal = parse_ideal(q, nvars)
    ws = WeightedSystem(
        tuple(parse_monomial(a, nvars) for a, _ in pairs), tuple(c for _, c in pairs), ideal
    )
    return name, ws, CyclicModule(parse_ideal(relations, nvars))


def worked_instances() -> list[Instance]:
    """Hand-checked instances with known chi(a, q, M)."""
    return [
        _instance("w1", 2, "[]", "[x, y]", [("x^2", 2), ("y^3", 3)]),
        _instance("w2", 2, "[]", "[x^2, x*y, y^2]", [("x^3", 1), ("y^3", 1)]),
        _instance("w3", 2, "[]", "[x^2, x*y, y^2]", [("x^4", 2), ("y^6", 3)]),
    ]
