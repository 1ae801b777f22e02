"""Command-line front end: ``koszul-trunc <command> INSTANCE``.

Every table goes to standard output as TSV: a ``#`` line echoing the effective parameters,
a header row, the data rows and ``#`` footer lines. ``--json`` prints the same content as one
JSON document. Diagnostics and logging go to standard error.
"""

from __future__ import annotations

import functools
import json
import logging
import sys
from collections.abc import Callable, Iterable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

import click
import yaml

from koszul_truncation.builders import COMPLEX_KINDS, build_complex
from koszul_truncation.campaign import complex_invariants, run_campaign, write_report
from koszul_truncation.cech import (
    ComparisonReport,
    artin_rees_gap,
    cech_H,
    cech_L,
    les_check,
    local_cohomology,
    nonv_equivalence_check,
    radical_invariance_check,
    saturation_power,
    star_check,
    torsion_H0,
)
from koszul_truncation.complexes import homology_dims
from koszul_truncation.corpus import random_corpus, worked_instances
from koszul_truncation.errors import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_UNSTABLE,
    EngineError,
    InstanceError,
    exit_code,
)
from koszul_truncation.instance import EngineParams, InstanceFile, load_instance
from koszul_truncation.monomials import format_monomial
from koszul_truncation.multiplicity import (
    MultiplicityReport,
    chi_nonneg_monitor,
    e0,
    hilbert_samuel_table,
    verify_mult1,
    verify_mult2,
)

_INSTANCE = click.Path(path_type=Path, dir_okay=False)


def engine_options(f: Callable) -> Callable:
    """Flags shared by every instance command; each overrides the file's ``params`` block."""
    options = [
        click.option("--n", "n", type=int, default=None, help="Truncation level n"),
        click.option("--n-span", type=int, default=None, help="Levels checked per (l, k)"),
        click.option("--max-degree", "-E", type=int, default=None, help="Internal degree cap"),
        click.option(
            "--homology-window", type=int, default=None, help="Zero slices that confirm stability"
        ),
        click.option("--window", "-w", type=int, default=None, help="Colimit window"),
        click.option("--k-max", type=int, default=None, help="Largest power of the system"),
        click.option("--l-max", type=int, default=None, help="Largest l in the colon search"),
        click.option("--prime", "-p", type=int, default=None, help="Prime for the ranks"),
        click.option(
            "--convention",
            type=click.Choice(["unit", "zero"]),
            default=None,
            help="Meaning of q^n for n < 0",
        ),
        click.option("--seed", type=int, default=None, help="Random seed"),
        click.option("--json", "as_json", is_flag=True, help="Print JSON instead of TSV"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def guarded(f: Callable) -> Callable:
    """Turn engine failures into a message on stderr and the matching exit code."""

    @functools.wraps(f)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            f(*args, **kwargs)
        except EngineError as e:
            click.secho(f"✗ {e}", fg="red", err=True)
            raise SystemExit(exit_code(e)) from None

    return wrapper


def _load(path: Path, overrides: dict[str, Any]) -> InstanceFile:
    inst = load_instance(path)
    return replace(inst, params=inst.params.merged(**overrides))


def _cell(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, list | tuple):
        return ",".join(_cell(v) for v in value)
    return str(value)


def _echo_table(
    params: EngineParams,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    footer: dict[str, Any] | None = None,
) -> None:
    click.echo("# " + "\t".join(f"{k}={_cell(v)}" for k, v in params.to_dict().items()))
    click.echo("\t".join(header))
    for row in rows:
        click.echo("\t".join(_cell(v) for v in row))
    for key, value in (footer or {}).items():
        click.echo(f"# {key}\t{_cell(value)}")


def _echo_json(params: EngineParams, payload: dict) -> None:
    click.echo(json.dumps({"params": params.to_dict(), **payload}, indent=2))


def _echo_report(report: MultiplicityReport, params: EngineParams, as_json: bool) -> None:
    if as_json:
        _echo_json(params, report.to_dict())
    else:
        header = [*report.numbers, "verdict"]
        row = [*report.numbers.values(), "PASS" if report.success else "FAIL"]
        _echo_table(params, header, [row], {report.name: report.message})
    if not report.success:
        raise SystemExit(EXIT_FAIL)


@click.group()
@click.version_option(package_name="koszul-truncation")
@click.option("--verbose", "-v", count=True, help="-v for progress, -vv for slice detail")
def main(verbose: int) -> None:
    """Truncated Koszul complexes, multiplicities and their Cech colimits."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        stream=sys.stderr, level=level, format="%(name)s:%(levelname)s:%(message)s"
    )


@main.command()
@click.argument("instance", type=_INSTANCE)
@engine_options
@guarded
def validate(instance: Path, as_json: bool, **engine: Any) -> None:
    """Parse and validate an instance file, then summarize it."""
    inst = _load(instance, engine)
    summary = inst.summary()
    if as_json:
        _echo_json(inst.params, summary)
        return
    _echo_table(inst.params, ["field", "value"], summary.items())
    click.secho(f"✓ {inst.source} is valid", fg="green", err=True)


@main.command()
@click.argument("instance", type=_INSTANCE)
@click.option("--n-max", type=int, default=None, help="Last n to tabulate")
@engine_options
@guarded
def hilbert(instance: Path, n_max: int | None, as_json: bool, **engine: Any) -> None:
    """Tabulate l(M / q^n M) with its differences up to order dim M."""
    inst = _load(instance, engine)
    prm = inst.params
    table = hilbert_samuel_table(
        inst.module, inst.q, n_max, scan_bound=prm.scan_cap, convention=prm.convention
    )
    mult = table.e0 if table.e0 is not None else e0(inst.module, inst.q, scan_bound=prm.scan_cap)
    if as_json:
        _echo_json(prm, {**table.to_dict(), "e0": mult})
        return
    header = ["n", "length", *(f"delta{k}" for k in range(1, table.dim + 1))]
    _echo_table(prm, header, table.rows(), {"e0": mult})


@main.command("verify-mult1")
@click.argument("instance", type=_INSTANCE)
@engine_options
@guarded
def verify_mult1_cmd(instance: Path, as_json: bool, **engine: Any) -> None:
    """Check chi(K.(a; M)) = e_0((a); M)."""
    inst = _load(instance, engine)
    report = verify_mult1(inst.elements, inst.module, inst.params.max_degree, inst.params.prime)
    _echo_report(report, inst.params, as_json)


@main.command("verify-mult2")
@click.argument("instance", type=_INSTANCE)
@click.option("--weights", default=None, help="Comma-separated weights for the product term")
@engine_options
@guarded
def verify_mult2_cmd(instance: Path, weights: str | None, as_json: bool, **engine: Any) -> None:
    """Check e_0((a); M) = (c_1 ... c_t) e_0(q; M) + chi(K.(a, q, M; n)) for large n."""
    inst = _load(instance, engine)
    override = None
    if weights is not None:
        try:
            override = [int(w) for w in weights.split(",")]
        except ValueError:
            raise InstanceError(f"{weights!r} is not a list of integers", "--weights") from None
    report = verify_mult2(
        inst.system, inst.module, override, inst.params.max_degree, inst.params.prime
    )
    _echo_report(report, inst.params, as_json)


@main.command("complex-report")
@click.argument("instance", type=_INSTANCE)
@click.option("--which", type=click.Choice(COMPLEX_KINDS), default="K", show_default=True)
@engine_options
@guarded
def complex_report(instance: Path, which: str, as_json: bool, **engine: Any) -> None:
    """Homology slice dimensions of one truncated complex, with its invariant checks."""
    inst = _load(instance, engine)
    prm = inst.params
    spec = build_complex(which, inst.system, inst.module, prm.n, prm.convention)
    cap = prm.max_degree if prm.max_degree is not None else spec.default_degree_cap()
    table = homology_dims(spec, cap, prm.homology_window, prm.prime)
    checks = complex_invariants(which, inst)
    footer: dict[str, Any] = {
        f"length{i}": table.total_length(i) for i in table.indices
    }
    footer["chi"] = table.euler_characteristic()
    footer["stable"] = table.stable
    footer.update(checks)
    if as_json:
        _echo_json(prm, {"complex": spec.name, **table.to_dict(), "checks": checks})
    else:
        _echo_table(prm, ["i", "e", "dim"], table.rows(), footer)
    if not all(checks.values()):
        raise SystemExit(EXIT_FAIL)
    if not table.stable:
        raise SystemExit(EXIT_UNSTABLE)


def _degrees(prm: EngineParams) -> range | None:
    if prm.max_degree is None:
        return None
    return range(-prm.max_degree, prm.max_degree + 1)


@main.command()
@click.argument("instance", type=_INSTANCE)
@click.option(
    "--kind", type=click.Choice(["H", "L", "local"]), default="H", show_default=True
)
@click.option("--all", "include_zero", is_flag=True, help="Also print stable zero entries")
@engine_options
@guarded
def cech(instance: Path, kind: str, include_zero: bool, as_json: bool, **engine: Any) -> None:
    """Stabilized colimit cohomology; with --max-degree E the degrees -E..E are scanned."""
    inst = _load(instance, engine)
    prm = inst.params
    degrees = _degrees(prm)
    if kind == "local":
        report = local_cohomology(
            inst.elements, inst.module, prm.k_max, prm.window, degrees, prm.prime
        )
    else:
        compute = cech_H if kind == "H" else cech_L
        report = compute(
            inst.system, inst.module, prm.n, prm.k_max, prm.window, degrees, prm.prime
        )
    if as_json:
        _echo_json(prm, report.to_dict(include_zero))
        return
    rows = [(e.index, e.degree, e.dim, e.k_star, e.status) for e in report.rows(include_zero)]
    footer = {
        "degrees": [report.degrees.start, report.degrees.stop - 1],
        "unstable": len(report.unstable),
    }
    _echo_table(prm, ["i", "e", "dim", "k_star", "status"], rows, footer)


@main.command("star-check")
@click.argument("instance", type=_INSTANCE)
@engine_options
@guarded
def star_check_cmd(instance: Path, as_json: bool, **engine: Any) -> None:
    """Search (l, k) for the colon condition on each a_i."""
    inst = _load(instance, engine)
    prm = inst.params
    report = star_check(inst.system, inst.module, prm.n_span, prm.l_max, prm.k_max)
    if as_json:
        _echo_json(prm, report.to_dict())
    else:
        rows = [(v.element, v.holds, v.l, v.k) for v in report.verdicts]
        _echo_table(prm, ["element", "holds", "l", "k"], rows)
    if not report.success:
        raise SystemExit(EXIT_FAIL)


@main.command()
@click.argument("instance", type=_INSTANCE)
@click.option("--nonv", is_flag=True, help="Also compare fullness with the first L-cohomology")
@engine_options
@guarded
def sat(instance: Path, nonv: bool, as_json: bool, **engine: Any) -> None:
    """Saturation (q^n M)^{aA} for each a_i."""
    inst = _load(instance, engine)
    prm = inst.params
    header = ["element", "c", "n", "ideal", "stage", "full"]
    rows, checks = [], []
    for a, c in zip(inst.elements, inst.weights, strict=True):
        result = saturation_power(inst.module, inst.q, a, c, prm.n, prm.scan_cap)
        name = format_monomial(a, inst.names)
        rows.append([name, c, prm.n, str(result.ideal), result.stage, result.full])
        if nonv:
            check = nonv_equivalence_check(
                inst.module, inst.q, a, c, k_max=prm.k_max, window=prm.window
            )
            checks.append(check)
    if as_json:
        payload = {
            "rows": [dict(zip(header, row, strict=True)) for row in rows],
            "nonv": [check.to_dict() for check in checks],
        }
        _echo_json(prm, payload)
    else:
        footer = {f"nonv[{k}]": str(check) for k, check in enumerate(checks)}
        _echo_table(prm, header, rows, footer)
    if not all(check.success for check in checks):
        raise SystemExit(EXIT_FAIL)


@main.command()
@click.argument("instance", type=_INSTANCE)
@click.option("--cross-check", is_flag=True, help="Compare with the colimit at index 0")
@engine_options
@guarded
def torsion(instance: Path, cross_check: bool, as_json: bool, **engine: Any) -> None:
    """Slice dimensions of the a-torsion of M meet q^n M."""
    inst = _load(instance, engine)
    prm = inst.params
    table = torsion_H0(
        inst.system, inst.module, prm.n, prm.max_degree, cross_check, prm.k_max, prm.window
    )
    if as_json:
        _echo_json(prm, table.to_dict())
    else:
        footer = {"torsion": table.torsion, "agrees_with_cech": table.agrees}
        _echo_table(prm, ["e", "dim"], sorted(table.dims.items()), footer)
    if table.agrees is False:
        raise SystemExit(EXIT_FAIL)


@main.command("artin-rees")
@click.argument("instance", type=_INSTANCE)
@click.option("--n-max", type=int, default=8, show_default=True, help="Last n to tabulate")
@engine_options
@guarded
def artin_rees(instance: Path, n_max: int, as_json: bool, **engine: Any) -> None:
    """Length of ((a) + I) meet (q^n + I) over a q^{n-c} + I, per a_i and n >= c."""
    inst = _load(instance, engine)
    prm = inst.params
    rows = []
    for a, c in zip(inst.elements, inst.weights, strict=True):
        name = format_monomial(a, inst.names)
        rows.extend(
            (name, r.n, r.gap)
            for r in artin_rees_gap(a, c, inst.q, inst.module, range(c, n_max + 1))
        )
    if as_json:
        _echo_json(prm, {"rows": [{"element": a, "n": n, "gap": g} for a, n, g in rows]})
        return
    _echo_table(prm, ["element", "n", "gap"], rows)


@main.command("radical-check")
@click.argument("instance", type=_INSTANCE)
@click.argument("other", type=_INSTANCE)
@engine_options
@guarded
def radical_check(instance: Path, other: Path, as_json: bool, **engine: Any) -> None:
    """Compare the L-cohomology of INSTANCE with that of OTHER's system on the same M."""
    inst = _load(instance, engine)
    second = load_instance(other)
    if second.nvars != inst.nvars:
        raise InstanceError(f"{second.nvars} variables, expected {inst.nvars}", str(other))
    prm = inst.params
    report = radical_invariance_check(
        inst.system, second.system, inst.module, prm.n, _degrees(prm), prm.k_max, prm.window
    )
    _echo_comparison(report, prm, as_json)


@main.command("les-check")
@click.argument("instance", type=_INSTANCE)
@engine_options
@guarded
def les_check_cmd(instance: Path, as_json: bool, **engine: Any) -> None:
    """Exactness of the H-hat, local cohomology, L-hat sequence degree by degree."""
    inst = _load(instance, engine)
    prm = inst.params
    report = les_check(inst.system, inst.module, prm.n, _degrees(prm), prm.k_max, prm.window)
    _echo_comparison(report, prm, as_json)


def _echo_comparison(report: ComparisonReport, prm: EngineParams, as_json: bool) -> None:
    if as_json:
        _echo_json(prm, report.to_dict())
    else:
        rows = [(m.get("i", "-"), m["e"], json.dumps(m, sort_keys=True)) for m in report.mismatches]
        footer = {"compared": report.compared, "skipped": report.skipped, "check": str(report)}
        _echo_table(prm, ["i", "e", "mismatch"], rows, footer)
    if not report.success:
        raise SystemExit(EXIT_FAIL)


@main.command()
@click.option("--seed", type=int, default=1, show_default=True, help="Corpus seed")
@click.option("--size", type=int, default=50, show_default=True, help="Random instances")
@click.option("--jobs", "-j", type=int, default=1, show_default=True, help="Worker processes")
@click.option("--max-vars", type=int, default=3, show_default=True)
@click.option("--max-elems", type=int, default=3, show_default=True)
@click.option("--worked", is_flag=True, help="Prepend the hand-checked instances")
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of TSV")
@guarded
def corpus(
    seed: int,
    size: int,
    jobs: int,
    max_vars: int,
    max_elems: int,
    worked: bool,
    as_json: bool,
) -> None:
    """Monitor the sign of chi(a, q, M) over a seeded random corpus."""
    instances = worked_instances() if worked else []
    instances += random_corpus(seed, size, max_vars, max_elems)
    report = chi_nonneg_monitor(instances, jobs)
    prm = EngineParams(seed=seed)
    if as_json:
        _echo_json(prm, report.to_dict())
    else:
        header = ["id", "d", "t", "c", "e0_a", "e0_q", "chi", "n_star", "status"]
        rows = [list(r.to_dict().values()) for r in report.rows]
        footer = {
            "min": report.minimum,
            "max": report.maximum,
            "histogram": [f"{k}:{v}" for k, v in report.histogram().items()],
            "negative": [r.instance_id for r in report.findings],
        }
        _echo_table(prm, header, rows, footer)
    click.secho(str(report), fg="green" if report.success else "red", err=True)
    if not report.success:
        raise SystemExit(EXIT_FAIL)


@main.command()
@click.argument("campaign_file", type=_INSTANCE)
@click.option("--out", "-o", type=click.Path(path_type=Path), default=None, help="Report file")
@guarded
def campaign(campaign_file: Path, out: Path | None) -> None:
    """Run a campaign file and write its flat YAML report."""
    report = run_campaign(campaign_file)
    if out is None:
        click.echo(yaml.dump(report.to_dict(), default_flow_style=False, sort_keys=False), nl=False)
    else:
        write_report(report, out)
        for result in report.results:
            click.secho(str(result), fg="green" if result.success else "red")
        click.echo(f"Report written to {out}")
    if report.exit_code != EXIT_PASS:
        raise SystemExit(report.exit_code)
