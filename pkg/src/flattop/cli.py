"""Command-line front end: ``flattop {acf,estimate,simulate,experiment}``.

Exit codes: 0 ok, 2 bad input or spec, 3 degenerate data, 4 simulation
failure, 5 experiment quality gate.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .bandwidth import RuleConfig, threshold
from .config import experiment_from_dict, load_json, model_from_dict, rule_to_dict
from .errors import (
    ConstantSeries,
    EmbeddingFailure,
    ExperimentQualityError,
    FlatTopError,
    InsufficientLags,
    InvalidSeries,
    LagOutOfRange,
)
from .montecarlo import ExperimentResult, run_experiment
from .spectral import FrequencyGrid, clip_nonnegative, estimate_auto
from .synthetic import L_MAX_DEFAULT, make_psd, simulate_gaussian
from .timeseries import TimeSeries, sample_autocovariance_fast

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_SIMULATION, EXIT_QUALITY = 0, 2, 3, 4, 5

# config-file keys; command-line flags of the same name override them
ESTIMATE_KEYS = ("c_thresh", "k_n", "c_break", "max_m", "grid_size", "full_grid", "clip")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_series(path) -> TimeSeries:
    """One numeric column; a non-numeric first line is treated as a header."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_INPUT) from exc
    values = []
    first = True
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            if first:
                first = False
                continue
            raise CliError(f"{path}:{lineno}: not a number: {line!r}", EXIT_INPUT) from None
        first = False
    if not values:
        raise CliError(f"{path}: no numeric data", EXIT_INPUT)
    try:
        return TimeSeries(values)
    except InvalidSeries as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from exc


def _open_out(out):
    if out is None or out == "-":
        return contextlib.nullcontext(sys.stdout)
    return open(out, "w", newline="")


def _merged(args, file_cfg: dict, keys) -> dict:
    out = {}
    for key in keys:
        val = getattr(args, key, None)
        if val is None:
            val = file_cfg.get(key)
        if val is not None:
            out[key] = val
    return out


def _rule(settings: dict) -> RuleConfig:
    return RuleConfig(**{k: settings[k] for k in ("c_thresh", "k_n", "c_break", "max_m") if k in settings})


def cmd_acf(args) -> int:
    file_cfg = load_json(args.config) if args.config else {}
    settings = _merged(args, file_cfg, ("c_thresh", "max_lag"))
    series = read_series(args.input)
    try:
        acf = sample_autocovariance_fast(series, settings.get("max_lag"))
    except LagOutOfRange as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    thr = threshold(series.n, settings.get("c_thresh", RuleConfig.c_thresh))
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lag", "gamma", "rho", "threshold"])
        for k, (g, r) in enumerate(zip(acf.gamma, acf.rho)):
            w.writerow([k, fmt(g), fmt(r), fmt(thr)])
    return EXIT_OK


def cmd_estimate(args) -> int:
    file_cfg = load_json(args.config) if args.config else {}
    settings = _merged(args, file_cfg, ESTIMATE_KEYS)
    rule = _rule(settings)
    grid = FrequencyGrid.default(int(settings.get("grid_size", 512)), bool(settings.get("full_grid", False)))
    series = read_series(args.input)
    try:
        sel, est = estimate_auto(series, rule, grid)
    except InsufficientLags as exc:
        raise CliError(str(exc), EXIT_INPUT) from exc
    if settings.get("clip"):
        est = clip_nonnegative(est)
    header = {
        "N": series.n,
        "m_hat": sel.m_hat,
        "M_hat": sel.M_hat,
        "threshold": sel.threshold,
        "c_thresh": rule.c_thresh,
        "k_n": rule.k_n,
        "c_break": rule.c_break,
        "capped": sel.capped,
        "clipped": bool(est.meta.get("clipped")),
    }
    with _open_out(args.out) as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "f_hat"])
        for om, f in zip(est.omegas, est.values):
            w.writerow([fmt(om), fmt(f)])
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = load_json(args.spec)
    L_max = int(spec.get("L_max", L_MAX_DEFAULT))
    model = model_from_dict(spec)
    if args.n < 2:
        raise CliError(f"--n must be >= 2, got {args.n}", EXIT_INPUT)
    acf = make_psd(model, L_max)
    series = simulate_gaussian(acf, args.n, args.seed)
    with _open_out(args.out) as fh:
        fh.writelines(fmt(v) + "\n" for v in series.values)
    return EXIT_OK


def write_experiment(result: ExperimentResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "replicates.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "replicate", "seed", "m_hat", "M_hat", "capped", "error"])
        for r in result.replicates:
            w.writerow([r.n, r.index, r.seed, "" if r.m_hat is None else r.m_hat,
                        "" if r.M_hat is None else r.M_hat, int(r.capped), r.error or ""])
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "median_M_hat", "median_m_hat", "m_hat_det", "M_hat_det", "capped_fraction", "failed"])
        for c in result.cells:
            w.writerow([c.n, c.median_M_hat, c.median_m_hat, c.m_hat_det, c.M_hat_det,
                        fmt(c.capped_fraction), c.failed])
    cfg = result.config
    fit = result.fit
    doc = {
        "law": cfg.law,
        "n_values": list(cfg.n_values),
        "replicates": cfg.replicates,
        "seed_base": cfg.seed_base,
        "rule": rule_to_dict(cfg.rule),
        "diagnostics": result.diagnostics,
    }
    if fit is not None:
        doc.update(
            slope=fit.slope,
            intercept=fit.intercept,
            residuals=list(fit.residuals),
            r_squared=fit.r_squared,
        )
        if cfg.law == "exponential_rate":
            doc["A2_fitted"] = fit.constant
            doc["A2_reference"] = fit.A2_ref
        else:
            doc["A1_fitted"] = fit.constant
            doc["exponent_reference"] = fit.exponent_ref
    (out_dir / "fit.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def cmd_experiment(args) -> int:
    cfg = experiment_from_dict(load_json(args.spec))
    if len(cfg.n_values) < 3:
        raise CliError(f"rate fit needs at least 3 N values, got {len(cfg.n_values)}", EXIT_INPUT)
    out_dir = Path(args.out_dir)
    try:
        result = run_experiment(cfg)
    except ExperimentQualityError as exc:
        if exc.result is not None:
            write_experiment(exc.result, out_dir)
        raise CliError(str(exc), EXIT_QUALITY) from exc
    write_experiment(result, out_dir)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flattop", description="Flat-top lag-window spectral estimation.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def rule_flags(sp):
        sp.add_argument("--c-thresh", dest="c_thresh", type=float)
        sp.add_argument("--k-n", dest="k_n", type=int)
        sp.add_argument("--c-break", dest="c_break", type=float)
        sp.add_argument("--max-m", dest="max_m", type=int)

    sp = sub.add_parser("acf", help="sample autocovariance / autocorrelation table")
    sp.add_argument("input")
    sp.add_argument("--max-lag", dest="max_lag", type=int)
    sp.add_argument("--c-thresh", dest="c_thresh", type=float)
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_acf)

    sp = sub.add_parser("estimate", help="automatic flat-top spectral estimate")
    sp.add_argument("input")
    rule_flags(sp)
    sp.add_argument("--grid", dest="grid_size", type=int)
    sp.add_argument("--full-grid", dest="full_grid", action="store_true", default=None)
    sp.add_argument("--clip", action="store_true", default=None)
    sp.add_argument("--config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("simulate", help="simulate a stationary Gaussian series from a model spec")
    sp.add_argument("spec")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("experiment", help="Monte Carlo rate experiment from a spec file")
    sp.add_argument("spec")
    sp.add_argument("--out-dir", dest="out_dir", required=True)
    sp.set_defaults(func=cmd_experiment)
    return p


def _code_for(exc: Exception) -> int:
    for kind, code in ((ConstantSeries, EXIT_DEGENERATE), (EmbeddingFailure, EXIT_SIMULATION),
                       (ExperimentQualityError, EXIT_QUALITY)):
        if isinstance(exc, kind):
            return code
    return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"flattop: error: {exc}", file=sys.stderr)
        return exc.code
    except FlatTopError as exc:
        print(f"flattop: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
