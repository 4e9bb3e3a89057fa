"""Command line front end: transform, verify, sweep, curvature, compare-wu.

Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 numerical failure.
A JSON config file (``--config``) supplies defaults per subcommand, e.g.
``{"sweep": {"domain": "ball", "n": 2, "grid": "radial:5"}}``; top-level keys
apply to every subcommand.  Flags given on the command line win.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from . import transform as T
from .domains import DomainError, DomainSpec, UnsupportedError, indicatrix, kobayashi_busemann
from .field import (
    CONVENTIONS,
    NoisyFieldError,
    StageError,
    StepTooLargeError,
    config_hash,
    field_sweep,
    fmt,
    hsc_estimate,
    kappa_at,
    parse_grid,
    parse_point,
)
from .hermitian import DimensionError
from .quadrature import QuadratureRule, default_rule
from .verify import CLAIMS, format_table, run_claims
from .wu import WuConfig, kappa_wu_bounds, wu_sandwich_report

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_ERRORS = (DomainError, UnsupportedError, DimensionError, StepTooLargeError, NoisyFieldError, KeyError, ValueError)
NUMERIC_ERRORS = (ArithmeticError, np.linalg.LinAlgError)


class Failure(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _classify(exc):
    """Exit code for an exception escaping a command."""
    stage = None
    if isinstance(exc, StageError):
        stage, exc = exc.stage, exc.cause
    if isinstance(exc, NUMERIC_ERRORS):
        code = EXIT_NUMERIC
    elif isinstance(exc, CONFIG_ERRORS):
        code = EXIT_CONFIG
    else:
        raise exc
    stage = stage or getattr(exc, "stage", None)
    prefix = f"[{stage}] " if stage else ""
    return code, f"{prefix}{type(exc).__name__}: {exc}"


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs)
        except Failure as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(exc.code)
        except Exception as exc:  # noqa: BLE001 - mapped to exit codes
            code, message = _classify(exc)
            click.echo(f"error: {message}", err=True)
            sys.exit(code)
        sys.exit(code or EXIT_OK)

    return wrapper


def _load_config(ctx, param, value):
    if value is None:
        return None
    try:
        data = json.loads(Path(value).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config {value}: {exc}") from exc
    if not isinstance(data, dict):
        raise click.BadParameter("config must be a JSON object")
    commands = {name for name in main.commands}
    shared = {k.replace("-", "_"): v for k, v in data.items() if k not in commands}
    defaults = {}
    for name in commands:
        section = {k.replace("-", "_"): v for k, v in data.get(name, {}).items()}
        defaults[name] = {**shared, **section}
    ctx.default_map = defaults
    return value


def domain_options(fn):
    for opt in reversed(
        [
            click.option("--domain", default="ball", show_default=True,
                         help="ball, disc, polydisc, ellipsoid, punctured-disc, halfplane, or a JSON domain object"),
            click.option("--n", "n", type=int, default=2, show_default=True, help="complex dimension"),
            click.option("--p", "p", default=None, help="ellipsoid exponents, e.g. 2,1"),
        ]
    ):
        fn = opt(fn)
    return fn


def rule_options(fn):
    for opt in reversed(
        [
            click.option("--quadrature", type=click.Choice(["auto", "mc", "sphere-product"]), default="auto",
                         show_default=True, help="sphere rule; auto = product for n<=2, MC above"),
            click.option("--samples", type=int, default=200_000, show_default=True, help="Monte Carlo samples"),
            click.option("--seed", type=int, default=0, show_default=True, help="root seed"),
        ]
    ):
        fn = opt(fn)
    return fn


def output_option(fn):
    return click.option("--out", type=click.Path(dir_okay=False), default=None, help="output file (stdout if omitted)")(fn)


def make_domain(domain, n, p) -> DomainSpec:
    text = str(domain).strip()
    if text.startswith("{"):
        return DomainSpec.from_json(json.loads(text))
    if text.startswith("@"):
        return DomainSpec.from_json(json.loads(Path(text[1:]).read_text()))
    if text == "ellipsoid":
        if not p:
            raise ValueError("--domain ellipsoid needs --p")
        exps = [float(x) for x in str(p).split(",")] if isinstance(p, str) else [float(x) for x in p]
        return DomainSpec("ellipsoid", p=tuple(exps))
    return DomainSpec(text, n)


def make_rule(spec: DomainSpec, quadrature, samples, seed):
    if quadrature == "auto":
        return default_rule(spec.n, seed=seed, samples=samples)
    if quadrature == "mc":
        return QuadratureRule("monte-carlo", spec.n, samples=samples, seed=seed)
    return QuadratureRule("sphere-product", spec.n, radial=160 if spec.n > 1 else 2, phase=64)


def emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@click.group()
@click.version_option(__version__)
@click.option("--config", type=click.Path(dir_okay=False), callback=_load_config, is_eager=True, expose_value=False,
              help="JSON file of defaults, per subcommand")
def main():
    """Complex Binet-Legendre metrics of model domains."""


@main.command()
@domain_options
@click.option("--point", default=None, help="point, e.g. 0.1+0.2i,0 (default: origin)")
@rule_options
@click.option("--dual/--no-dual", default=True, show_default=True, help="include the dual Gram and volume")
@output_option
@guarded
def transform(domain, n, p, point, quadrature, samples, seed, dual, out):
    """kappa at one point of a domain, as a JSON report."""
    spec = make_domain(domain, n, p)
    z = parse_point(point, spec.n) if point else np.zeros(spec.n, dtype=complex)
    rule = make_rule(spec, quadrature, samples, seed)
    sample = kappa_at(spec, z, rule)
    moment, kappa = sample.moment, sample.kappa
    config = {"command": "transform", "domain": spec.to_json(), "point": [[c.real, c.imag] for c in z], "rule": rule.to_json()}
    report = {
        "version": __version__,
        "config_hash": config_hash(config),
        "config": config,
        "kappa": kappa.to_json(),
        "error_estimate": moment.error_estimate,
    }
    if dual:
        report.update(gram_dual=moment.gram_dual.to_json(), volume=moment.volume, condition=moment.condition)
    emit(dumps(report), out)
    return EXIT_OK


@main.command()
@click.option("--only", multiple=True, help=f"claims to run (repeatable or comma separated): {', '.join(CLAIMS)}")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--inject-fault", multiple=True, hidden=True)
@output_option
@guarded
def verify(only, seed, inject_fault, out):
    """Run the claim suite and print a pass/fail table with margins."""
    names = [x.strip() for item in only for x in item.split(",") if x.strip()]
    unknown = [x for x in names if x not in CLAIMS]
    if unknown:
        raise Failure(EXIT_CONFIG, f"unknown claims {unknown}; available: {', '.join(CLAIMS)}")
    saved = set(T.FAULTS)
    T.FAULTS.update(inject_fault)
    try:
        rows = run_claims(names or None, seed)
    finally:
        T.FAULTS.clear()
        T.FAULTS.update(saved)
    failed = [r for r in rows if not r.passed]
    text = format_table(rows) + f"{len(rows)} rows, {len(failed)} failed\n"
    if out and str(out).endswith(".json"):
        emit(dumps({"version": __version__, "seed": seed,
                    "rows": [{"claim": r.claim, "case": r.case, "measured": r.measured, "bound": r.bound,
                              "sense": r.sense, "passed": r.passed} for r in rows]}), out)
        click.echo(text, nl=False)
    else:
        emit(text, out)
    return EXIT_VERIFY if failed else EXIT_OK


@main.command()
@domain_options
@click.option("--grid", default="origin", show_default=True,
              help="origin | radial:R | radial:RxA | random:N[:seed] | explicit points separated by ;")
@rule_options
@click.option("--wu/--no-wu", default=False, show_default=True, help="also compute Wu forms and kappa/Wu ratios")
@click.option("--workers", type=int, default=1, show_default=True, help="threads for per-point work")
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Wu ellipsoid gap tolerance")
@output_option
@guarded
def sweep(domain, n, p, grid, quadrature, samples, seed, wu, workers, tol, out):
    """kappa over a grid of points; CSV (or JSON when --out ends in .json)."""
    spec = make_domain(domain, n, p)
    points = parse_grid(spec, grid, seed)
    rule = make_rule(spec, quadrature, samples, seed)
    config = {"command": "sweep", "grid": grid, "seed": seed}
    if wu:
        config["tol"] = tol
    table = field_sweep(spec, points, rule, with_wu=wu, workers=workers, config=config, wu_config=WuConfig(tol=tol))
    if all(not r.ok for r in table.rows):
        emit(table.to_csv(), out)
        raise Failure(EXIT_NUMERIC, "every grid point failed")
    emit(dumps(table.to_json()) if out and str(out).endswith(".json") else table.to_csv(), out)
    return EXIT_OK


@main.command()
@domain_options
@click.option("--point", default=None, help="base point (default: origin)")
@click.option("--dir", "direction", default=None, help="direction (default: first axis)")
@click.option("--step", type=float, default=1e-2, show_default=True)
@rule_options
@output_option
@guarded
def curvature(domain, n, p, point, direction, step, quadrature, samples, seed, out):
    """Affine-disc curvature proxy of kappa; one-row CSV."""
    spec = make_domain(domain, n, p)
    z = parse_point(point, spec.n) if point else np.zeros(spec.n, dtype=complex)
    if direction:
        d = parse_point(direction, spec.n)
    else:
        d = np.zeros(spec.n, dtype=complex)
        d[0] = 1.0
    rule = make_rule(spec, quadrature, samples, seed)
    K = hsc_estimate(spec, z, d, step, rule)
    config = {"command": "curvature", "domain": spec.to_json(), "step": step, "rule": rule.to_json()}
    buf = io.StringIO()
    buf.write(f"# curvature proxy K = -Laplacian(log lambda)/(2 lambda), lambda(t) = kappa(p+t d)(d,d); "
              f"version={__version__}; config_hash={config_hash(config)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"p{j}_{s}" for j in range(spec.n) for s in ("re", "im")]
               + [f"d{j}_{s}" for j in range(spec.n) for s in ("re", "im")] + ["step", "K", "status"])
    w.writerow([fmt(x) for c in z for x in (c.real, c.imag)] + [fmt(x) for c in d for x in (c.real, c.imag)]
               + [fmt(step), fmt(K), "ok"])
    emit(buf.getvalue(), out)
    return EXIT_OK


@main.command("compare-wu")
@domain_options
@click.option("--point", default=None, help="point (default: origin)")
@rule_options
@click.option("--directions", type=int, default=1000, show_default=True, help="sampled directions for the sandwich")
@click.option("--tol", type=float, default=1e-7, show_default=True, help="Wu ellipsoid gap tolerance")
@output_option
@guarded
def compare_wu(domain, n, p, point, quadrature, samples, seed, directions, tol, out):
    """kappa against the Wu metric at one point; one-row CSV."""
    spec = make_domain(domain, n, p)
    z = parse_point(point, spec.n) if point else np.zeros(spec.n, dtype=complex)
    indicatrix(spec, z)  # input errors exit 2 here rather than as a failed row
    rule = make_rule(spec, quadrature, samples, seed)
    table = field_sweep(spec, [z], rule, with_wu=True, config={"tol": tol}, wu_config=WuConfig(tol=tol))
    row = table.rows[0]
    if not row.ok:
        raise Failure(EXIT_NUMERIC, row.status)
    rep = wu_sandwich_report(kobayashi_busemann(spec, z), row.wu, directions, seed)
    lo, hi = kappa_wu_bounds(row.kappa, row.wu)
    m = spec.n
    config = {**table.config, "command": "compare-wu", "directions": directions, "seed": seed}
    buf = io.StringIO()
    buf.write(f"{CONVENTIONS}; sqrt_w_over_khat = sqrt(wu(v,v))/k_hat(v) over sampled v; "
              f"version={__version__}; config_hash={config_hash(config)}\n")
    w = csv.writer(buf, lineterminator="\n")
    header = table.header()
    extra = ["wu_gap", "sqrt_w_over_khat_min", "sqrt_w_over_khat_max", "containment_direction_holds",
             "printed_direction_holds", "sqrt_kappa_over_w_min", "sqrt_kappa_over_w_max",
             "comparability_lower", "comparability_upper"]
    w.writerow(header + extra)
    w.writerow(table._row(0, row) + [
        fmt(row.wu_gap), fmt(rep.ratio_low), fmt(rep.ratio_high), str(rep.containment_holds).lower(),
        str(rep.reversed_holds).lower(), fmt(lo), fmt(hi),
        fmt(m ** (-(m + 2) / 2)), fmt(m ** ((m + 1) / 2)),
    ])
    emit(buf.getvalue(), out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    main()
