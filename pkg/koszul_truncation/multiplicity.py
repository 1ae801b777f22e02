"""Hilbert-Samuel multiplicities and the Euler characteristic identities they satisfy."""

from __future__ import annotations

import logging
import math
import multiprocessing as mp
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from koszul_truncation.builders import WeightedSystem, koszul, quotient_L, sub_koszul
from koszul_truncation.complexes import UNSTABLE, euler_by_terms, euler_characteristic
from koszul_truncation.errors import (
    DisagreementError,
    EngineError,
    NotArtinianError,
    NotSOPError,
    UnstableError,
)
from koszul_truncation.fp_linalg import DEFAULT_PRIME
from koszul_truncation.monomials import (
    CyclicModule,
    Monomial,
    MonomialIdeal,
    NegPowerConvention,
    hilbert_samuel,
    ideal_sum,
    is_m_primary,
    minimalize,
)

logger = logging.getLogger(__name__)

CONFIRM_WINDOW = 4
SCAN_BOUND = 40
CHI_WINDOW = 5


@dataclass
class HilbertSamuelTable:
    """n -> l(M / q^n M) with its finite differences.

    ``stable_from`` is the first n from which the dim-th difference stays constant
    over the confirmation window; ``e0`` is that constant.
    """

    values: dict[int, int]
    dim: int
    e0: int | None
    stable_from: int | None

    def differences(self, order: int) -> list[int]:
        """order-th forward differences, aligned with n = 0, 1, ..."""
        series = np.array([self.values[n] for n in sorted(self.values)], dtype=object)
        return [int(v) for v in np.diff(series, n=order)] if order else list(map(int, series))

    def rows(self) -> list[tuple[int | None, ...]]:
        """(n, l(M/q^nM), first difference, ..., dim-th difference); None past the table end."""
        columns = [self.differences(k) for k in range(self.dim + 1)]
        return [
            (n, *(col[n] if n < len(col) else None for col in columns))
            for n in sorted(self.values)
        ]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "e0": self.e0,
            "stable_from": self.stable_from,
            "values": {str(n): v for n, v in sorted(self.values.items())},
        }


def _check_finite(module: CyclicModule, q: MonomialIdeal) -> None:
    if not is_m_primary(ideal_sum(q, module.relations)):
        raise NotArtinianError(f"M/qM is not of finite length for q = {q}, M = {module}")


def hilbert_samuel_table(
    module: CyclicModule,
    q: MonomialIdeal,
    n_max: int | None = None,
    window: int = CONFIRM_WINDOW,
    scan_bound: int = SCAN_BOUND,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> HilbertSamuelTable:
    """Tabulate l(M / q^n M) until the dim-th difference is constant over ``window`` steps.

    With ``n_max`` set the table covers exactly 0..n_max and ``e0`` may stay ``None``.

    Raises:
        NotArtinianError: If q + I is not m-primary
    """
    _check_finite(module, q)
    d = max(module.dimension, 0)
    values: dict[int, int] = {}
    limit = scan_bound if n_max is None else n_max
    e0 = stable_from = None
    for n in range(limit + 1):
        values[n] = hilbert_samuel(module, q, n, convention)
        diffs = HilbertSamuelTable(values, d, None, None).differences(d)
        if len(diffs) >= window and len(set(diffs[-window:])) == 1:
            if e0 is None:
                e0, stable_from = diffs[-1], len(diffs) - window
            if n_max is None:
                break
        elif n_max is not None:
            e0 = stable_from = None
    return HilbertSamuelTable(values, d, e0, stable_from)


def e0(
    module: CyclicModule,
    q: MonomialIdeal,
    window: int = CONFIRM_WINDOW,
    scan_bound: int = SCAN_BOUND,
) -> int:
    """Hilbert-Samuel multiplicity e_0(q; M) by finite differences.

    Raises:
        NotArtinianError: If q + I is not m-primary
        UnstableError: If the difference does not settle within ``scan_bound``
    """
    table = hilbert_samuel_table(module, q, window=window, scan_bound=scan_bound)
    if table.e0 is None:
        raise UnstableError(
            f"{table.dim}-th difference of l(M/q^nM) not constant by n = {scan_bound}"
        )
    logger.info("e0(%s; %s) = %d (stable from n = %s)", q, module, table.e0, table.stable_from)
    return table.e0


def _check_sop(elements: Sequence[Monomial], module: CyclicModule) -> MonomialIdeal:
    ideal = minimalize(elements, module.nvars)
    if len(elements) != module.dimension:
        raise NotSOPError(
            f"{len(elements)} elements but dim M = {module.dimension} for M = {module}"
        )
    if not is_m_primary(ideal_sum(ideal, module.relations)):
        raise NotSOPError(f"(a) + I is not m-primary for a = {ideal}, M = {module}")
    return ideal


def chi_koszul(
    elements: Sequence[Monomial],
    module: CyclicModule,
    degree_cap: int | None = None,
    window: int | None = None,
    p: int = DEFAULT_PRIME,
) -> int:
    """Euler characteristic of K.(a; M) from its homology.

    Raises:
        NotSOPError: If a is not a system of parameters for M
        UnstableError: If some homology length is not stable at the degree cap
    """
    _check_sop(elements, module)
    chi = euler_characteristic(koszul(elements, module), degree_cap, window, p)
    if chi == UNSTABLE:
        raise UnstableError(f"Koszul homology of {module} not stable at the degree cap")
    return int(chi)


def chi_L(
    ws: WeightedSystem,
    module: CyclicModule,
    n: int,
    convention: NegPowerConvention = NegPowerConvention.UNIT,
) -> int:
    """Alternating sum of l(M / q^{n - sum c_J} M) over all subsets J."""
    _check_finite(module, ws.q)
    return euler_by_terms(quotient_L(ws, module, n, convention))


def chi_K_stable(
    ws: WeightedSystem,
    module: CyclicModule,
    window: int = CHI_WINDOW,
    n_max: int | None = None,
    degree_cap: int | None = None,
    p: int = DEFAULT_PRIME,
) -> tuple[int, int]:
    """Stable value of chi(K.(a, q, M; n)) and the first n of the stable run.

    Each n is computed from the homology of the truncated complex and again as
    chi(K.(a; M)) - chi(L.(a, q, M; n)); the two must agree.

    Raises:
        DisagreementError: If the two routes give different integers
        UnstableError: If the truncated homology is not stable at ``degree_cap``, or
            no run of ``window`` equal values appears by ``n_max``
    """
    chi_full = chi_koszul(ws.elements, module, p=p)
    start = sum(ws.weights)
    stop = start + 4 * window if n_max is None else n_max
    run_value: int | None = None
    run_start = start
    run_length = 0
    for n in range(start, stop + 1):
        direct = euler_characteristic(sub_koszul(ws, module, n), degree_cap, None, p)
        via_quotient = chi_full - chi_L(ws, module, n)
        if direct == UNSTABLE:
            raise UnstableError(
                f"chi(K(n={n})) has no stable homology at degree cap {degree_cap}; "
                f"chi(K) - chi(L) gives {via_quotient}"
            )
        if int(direct) != via_quotient:
            raise DisagreementError(
                f"chi(K(n={n})) = {direct} from homology but {via_quotient} from chi(K) - chi(L)",
                dump={
                    "system": ws.to_dict(),
                    "module": str(module),
                    "n": n,
                    "direct": direct,
                    "chi_koszul": chi_full,
                    "chi_L": chi_full - via_quotient,
                },
            )
        value = int(direct)
        logger.debug("chi(K(n=%d)) = %d", n, value)
        if value == run_value:
            run_length += 1
        else:
            run_value, run_start, run_length = value, n, 1
        if run_length >= window:
            logger.info("chi(K) = %d stable from n = %d", value, run_start)
            return value, run_start
    raise UnstableError(f"chi(K.(a, q, M; n)) not constant over {window} steps by n = {stop}")


@dataclass
class MultiplicityReport:
    """Outcome of one multiplicity identity check."""

    name: str
    success: bool
    numbers: dict[str, int | list[int]]
    message: str = ""

    def __str__(self) -> str:
        mark = "✓" if self.success else "✗"
        details = ", ".join(f"{k}={v}" for k, v in self.numbers.items())
        return f"{mark} {self.name}: {self.message} ({details})"

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "verdict": "PASS" if self.success else "FAIL",
            "message": self.message,
            **self.numbers,
        }


def verify_mult1(
    elements: Sequence[Monomial],
    module: CyclicModule,
    degree_cap: int | None = None,
    p: int = DEFAULT_PRIME,
) -> MultiplicityReport:
    """chi(K.(a; M)) against e_0((a); M)."""
    ideal = _check_sop(elements, module)
    chi = chi_koszul(elements, module, degree_cap, p=p)
    mult = e0(module, ideal)
    return MultiplicityReport(
        "mult1",
        chi == mult,
        {"chi": chi, "e0_a": mult},
        f"{chi} {'=' if chi == mult else '!='} {mult}",
    )


def verify_mult2(
    ws: WeightedSystem,
    module: CyclicModule,
    weights: Sequence[int] | None = None,
    degree_cap: int | None = None,
    p: int = DEFAULT_PRIME,
) -> MultiplicityReport:
    """e_0((a); M) against (c_1 ... c_t) e_0(q; M) + chi(K.(a, q, M; n)) for large n.

    Args:
        ws: The weighted system
        module: M = R/I
        weights: Weights to use in the product instead of ``ws.weights``
        degree_cap: Homology degree cap for the truncated complexes
        p: Prime for the rank computations
    """
    ideal = _check_sop(ws.elements, module)
    c = list(ws.weights if weights is None else weights)
    e0_a = e0(module, ideal)
    e0_q = e0(module, ws.q)
    chi, n_star = chi_K_stable(ws, module, degree_cap=degree_cap, p=p)
    rhs = math.prod(c) * e0_q + chi
    return MultiplicityReport(
        "mult2",
        e0_a == rhs,
        {"e0_a": e0_a, "c": c, "e0_q": e0_q, "chi": chi, "n_star": n_star},
        f"{e0_a} {'=' if e0_a == rhs else '!='} {math.prod(c) * e0_q} + {chi}",
    )


@dataclass
class MonitorRow:
    instance_id: str
    d: int
    t: int
    c: tuple[int, ...]
    e0_a: int | None = None
    e0_q: int | None = None
    chi: int | None = None
    n_star: int | None = None
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "id": self.instance_id,
            "d": self.d,
            "t": self.t,
            "c": list(self.c),
            "e0_a": self.e0_a,
            "e0_q": self.e0_q,
            "chi": self.chi,
            "n_star": self.n_star,
            "status": self.status,
        }


@dataclass
class MonitorReport:
    """Values of chi(a, q, M) over a corpus; negative values are findings."""

    rows: list[MonitorRow] = field(default_factory=list)

    @property
    def values(self) -> list[int]:
        return [r.chi for r in self.rows if r.status == "ok" and r.chi is not None]

    @property
    def findings(self) -> list[MonitorRow]:
        return [r for r in self.rows if r.chi is not None and r.chi < 0]

    @property
    def skipped(self) -> list[MonitorRow]:
        return [r for r in self.rows if r.status != "ok"]

    @property
    def success(self) -> bool:
        return not self.findings

    @property
    def minimum(self) -> int | None:
        return min(self.values, default=None)

    @property
    def maximum(self) -> int | None:
        return max(self.values, default=None)

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.values).items()))

    def __str__(self) -> str:
        if not self.rows:
            return "✓ empty corpus"
        mark = "✓" if self.success else "✗"
        return (
            f"{mark} {len(self.values)} instances, {len(self.skipped)} skipped, "
            f"chi in [{self.minimum}, {self.maximum}], {len(self.findings)} negative"
        )

    def to_dict(self) -> dict:
        return {
            "instances": len(self.rows),
            "skipped": len(self.skipped),
            "min": self.minimum,
            "max": self.maximum,
            "histogram": {str(k): v for k, v in self.histogram().items()},
            "negative": [r.instance_id for r in self.findings],
            "rows": [r.to_dict() for r in self.rows],
        }


def monitor_instance(
    instance_id: str, ws: WeightedSystem, module: CyclicModule
) -> MonitorRow:
    """One corpus row; engine failures become a skipped row."""
    row = MonitorRow(instance_id, module.nvars, ws.length, ws.weights)
    try:
        row.e0_a = e0(module, ws.ideal())
        row.e0_q = e0(module, ws.q)
        row.chi, row.n_star = chi_K_stable(ws, module)
    except EngineError as exc:
        logger.warning("instance %s skipped: %s", instance_id, exc)
        row.status = f"skipped: {type(exc).__name__}"
    return row


def chi_nonneg_monitor(
    instances: Iterable[tuple[str, WeightedSystem, CyclicModule]],
    jobs: int = 1,
) -> MonitorReport:
    """Run chi_K_stable over a corpus, optionally on a process pool."""
    tasks = list(instances)
    if jobs > 1 and len(tasks) > 1:
        with mp.get_context("spawn").Pool(processes=jobs) as pool:
            rows = pool.starmap(monitor_instance, tasks)
    else:
        rows = [monitor_instance(*task) for task in tasks]
    rows.sort(key=lambda r: r.instance_id)
    report = MonitorReport(rows)
    logger.info("%s", report)
    return report
