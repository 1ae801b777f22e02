"""Verification campaigns: named checks over instance files, with a flat YAML report."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from koszul_truncation.builders import build_complex, cone_rebuild
from koszul_truncation.cech import (
    ColimitReport,
    cech_H,
    cech_L,
    les_check,
    local_cohomology,
    saturation_power,
    star_check,
    torsion_H0,
)
from koszul_truncation.complexes import (
    annihilation_check,
    check_d_squared,
    homology_dims,
    structurally_equal,
)
from koszul_truncation.errors import (
    EXIT_FAIL,
    EXIT_INVALID,
    EXIT_PASS,
    EngineError,
    InstanceError,
    exit_code,
)
from koszul_truncation.instance import InstanceFile, load_instance
from koszul_truncation.multiplicity import verify_mult1, verify_mult2

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    """Outcome of one named check on one instance."""

    check: str
    verdict: str
    exit_code: int
    numbers: dict = field(default_factory=dict)
    message: str = ""
    entry: str = ""

    @property
    def success(self) -> bool:
        return self.exit_code == EXIT_PASS

    def __str__(self) -> str:
        mark = "✓" if self.success else "✗"
        text = f"{mark} {self.entry}:{self.check} {self.verdict}"
        return f"{text} ({self.message})" if self.message else text

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "check": self.check,
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "message": self.message,
            "numbers": self.numbers,
        }


def _verdict(ok: bool) -> tuple[str, int]:
    return ("PASS", EXIT_PASS) if ok else ("FAIL", EXIT_FAIL)


def complex_invariants(which: str, inst: InstanceFile) -> dict[str, bool]:
    """d o d = 0, annihilation by every a_i, permutation invariance and the cone rebuild."""
    ws, module, prm = inst.system, inst.module, inst.params
    spec = build_complex(which, ws, module, prm.n, prm.convention)
    cap = prm.max_degree if prm.max_degree is not None else spec.default_degree_cap()
    out: dict[str, bool] = {
        "d_squared": not check_d_squared(spec, spec.degree_range(cap), prm.prime),
        "annihilation": all(annihilation_check(spec, a, cap, prm.prime) for a in ws.elements),
    }
    reverse = ws.permuted(list(reversed(range(ws.length))))
    permuted = build_complex(which, reverse, module, prm.n, prm.convention)
    out["permutation"] = (
        homology_dims(permuted, cap, prm.homology_window, prm.prime).dims
        == homology_dims(spec, cap, prm.homology_window, prm.prime).dims
    )
    out["cone"] = structurally_equal(
        spec, cone_rebuild(which, ws, module, prm.n, prm.convention)
    )
    return out


def _check_mult1(inst: InstanceFile) -> CheckResult:
    report = verify_mult1(inst.elements, inst.module, inst.params.max_degree, inst.params.prime)
    return CheckResult("mult1", *_verdict(report.success), report.numbers, report.message)


def _check_mult2(inst: InstanceFile) -> CheckResult:
    report = verify_mult2(
        inst.system, inst.module, degree_cap=inst.params.max_degree, p=inst.params.prime
    )
    return CheckResult("mult2", *_verdict(report.success), report.numbers, report.message)


def _colimit_result(name: str, report: ColimitReport) -> CheckResult:
    verdict = "PASS" if report.stable else "UNSTABLE"
    numbers = {
        "nonzero": len(report.nonzero()),
        "unstable": len(report.unstable),
        "top_zero": report.all_zero(max(i for i, _ in report.entries)),
    }
    return CheckResult(name, verdict, EXIT_PASS, numbers)


def _check_cech_h(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    report = cech_H(inst.system, inst.module, prm.n, prm.k_max, prm.window, p=prm.prime)
    return _colimit_result("cech-H", report)


def _check_cech_l(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    report = cech_L(inst.system, inst.module, prm.n, prm.k_max, prm.window, p=prm.prime)
    return _colimit_result("cech-L", report)


def _check_local(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    report = local_cohomology(inst.elements, inst.module, prm.k_max, prm.window, p=prm.prime)
    return _colimit_result("local", report)


def _check_star(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    report = star_check(inst.system, inst.module, prm.n_span, prm.l_max, prm.k_max)
    numbers = {v.element: [v.l, v.k] if v.holds else "fails" for v in report.verdicts}
    return CheckResult("star", *_verdict(report.success), numbers)


def _check_sat(inst: InstanceFile) -> CheckResult:
    result = saturation_power(
        inst.module, inst.q, inst.elements[0], inst.weights[0], inst.params.n,
        inst.params.scan_cap,
    )
    return CheckResult("sat", "PASS", EXIT_PASS, result.to_dict(), str(result))


def _check_torsion(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    table = torsion_H0(
        inst.system, inst.module, prm.n, prm.max_degree, True, prm.k_max, prm.window
    )
    return CheckResult("torsion", *_verdict(bool(table.agrees)), table.to_dict())


def _check_les(inst: InstanceFile) -> CheckResult:
    prm = inst.params
    report = les_check(inst.system, inst.module, prm.n, None, prm.k_max, prm.window)
    return CheckResult("les", *_verdict(report.success), report.to_dict(), str(report))


def _complex_check(which: str) -> Callable[[InstanceFile], CheckResult]:
    def run(inst: InstanceFile) -> CheckResult:
        checks = complex_invariants(which, inst)
        ok = all(checks.values())
        return CheckResult(f"complex-{which}", *_verdict(ok), checks)

    return run


CHECKS: dict[str, Callable[[InstanceFile], CheckResult]] = {
    "mult1": _check_mult1,
    "mult2": _check_mult2,
    "cech-H": _check_cech_h,
    "cech-L": _check_cech_l,
    "local": _check_local,
    "star": _check_star,
    "sat": _check_sat,
    "torsion": _check_torsion,
    "les": _check_les,
    **{f"complex-{w}": _complex_check(w) for w in ("K", "L", "coK", "coL")},
}


def run_check(name: str, inst: InstanceFile, entry: str = "") -> CheckResult:
    """Run one check; engine failures become a result with the matching exit code."""
    if name not in CHECKS:
        return CheckResult(
            name, "ERROR", EXIT_INVALID, message=f"Unknown check {name!r}", entry=entry
        )
    try:
        result = CHECKS[name](inst)
    except EngineError as e:
        code = exit_code(e)
        verdict = {EXIT_FAIL: "FAIL", EXIT_INVALID: "INVALID"}.get(code, "UNSTABLE")
        result = CheckResult(name, verdict, code, getattr(e, "dump", {}), str(e))
    result.entry = entry
    logger.info("%s", result)
    return result


@dataclass
class CampaignReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return max((r.exit_code for r in self.results), default=EXIT_PASS)

    def to_dict(self) -> dict:
        return {
            "passed": sum(1 for r in self.results if r.success),
            "failed": sum(1 for r in self.results if not r.success),
            "results": [r.to_dict() for r in self.results],
        }


def _entry_instance(entry: dict, base: Path, index: int) -> InstanceFile:
    source = entry.get("instance")
    if isinstance(source, str):
        inst = load_instance(base / source)
    elif isinstance(source, dict):
        inst = InstanceFile.from_dict(source, f"entries[{index}].instance")
    else:
        raise InstanceError("Expected a path or an inline mapping", f"entries[{index}].instance")
    if entry.get("params"):
        inst = replace(inst, params=inst.params.overlay(entry["params"]))
    return inst


def run_campaign(path: Path) -> CampaignReport:
    """Run every entry of a campaign file.

    The file is a mapping with ``entries``; each entry has ``instance`` (a path relative
    to the campaign file, or an inline instance), ``checks`` and optional ``params``.

    Raises:
        InstanceError: If the campaign file is unreadable or not a mapping
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise InstanceError(str(e), str(path)) from None
    except yaml.YAMLError as e:
        raise InstanceError(f"Not valid YAML/JSON: {e}", str(path)) from None
    if not isinstance(data, dict):
        raise InstanceError("Campaign must be a mapping with 'entries'", str(path))
    report = CampaignReport()
    for index, entry in enumerate(data.get("entries", [])):
        name = str(entry.get("name", f"entry{index}"))
        try:
            inst = _entry_instance(entry, path.parent, index)
        except EngineError as e:
            report.results.append(
                CheckResult("load", "INVALID", EXIT_INVALID, message=str(e), entry=name)
            )
            continue
        for check in entry.get("checks", []):
            report.results.append(run_check(str(check), inst, name))
    return report


def write_report(report: CampaignReport, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        yaml.dump(report.to_dict(), f, default_flow_style=False, sort_keys=False)
