"""Command-line front end.

Subcommands ``toa``, ``bias`` and ``aoa`` tabulate the analytic laws,
``simulate`` runs the Monte Carlo oracle and compares it with the matching
analytic curve, and ``fit`` reports moment-matched surrogate families for the
bias with their KL divergences.

Exit status: 0 on success, 1 for invalid input, 2 when a numerical routine
fails to converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod
from ._quadrature import QuadratureError
from .analytic import ToaDistribution, bias_from_toa
from .approx import (
    MOMENT_COVERAGE,
    Family,
    FittedFamily,
    MomentMatching,
    bias_moments,
    exponential_bias_rate,
    fit_family,
    kl_divergence,
)
from .aoa import aoa_bin_probabilities, aoa_support, marginal_aoa_pdf
from .curves import empirical_cdf, ks_distance
from .montecarlo import BlockingMode, SimulationConfig, simulate_first_arrival

log = logging.getLogger("firstarrival")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_CONVERGENCE = 2


def fmt(x) -> str:
    """17 significant digits, enough for an exact float round trip."""
    return format(float(x), ".17g")


def write_csv(path: Path, header, columns) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([v if isinstance(v, (int, np.integer)) else fmt(v) for v in row])


def read_csv(path) -> dict:
    """Columns of a CSV written by this tool, as float arrays keyed by header."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")


def _sidecar(cfg: cfgmod.RunConfig, command: str, **extra) -> dict:
    return {"tool": "firstarrival", "version": __version__, "command": command, "config": cfg.echo(), **extra}


def _toa_summary(toa: ToaDistribution) -> dict:
    no_reflection = math.exp(-toa.lambda_inf) if toa.blocking else 0.0
    return {
        "blocking": toa.blocking,
        "lambda_hat_inf": toa.lambda_inf if math.isfinite(toa.lambda_inf) else None,
        "no_reflection_probability": no_reflection,
        "tail_error_bound": toa.tail_error_bound,
    }


def cmd_toa(cfg, out: Path, blocking: bool = True) -> dict:
    toa = ToaDistribution(cfg.model, cfg.link, blocking=blocking)
    curve = toa.curve(points=cfg.grid_points)
    write_csv(out / "toa.csv", ("x", "pdf", "cdf"), (curve.grid, curve.pdf, curve.cdf))
    meta = _sidecar(cfg, "toa", quantity="path_length_m", **_toa_summary(toa))
    write_json(out / "toa.json", meta)
    return meta


def cmd_bias(cfg, out: Path, blocking: bool = True) -> dict:
    toa = ToaDistribution(cfg.model, cfg.link, blocking=blocking)
    curve = bias_from_toa(toa.curve(points=cfg.grid_points), cfg.link)
    write_csv(out / "bias.csv", ("x", "pdf", "cdf"), (curve.grid, curve.pdf, curve.cdf))
    meta = _sidecar(cfg, "bias", quantity="bias_m", **_toa_summary(toa))
    write_json(out / "bias.json", meta)
    return meta


def cmd_aoa(cfg, out: Path) -> dict:
    model, link = cfg.model, cfg.link
    toa = ToaDistribution(model, link, blocking=True)
    alpha = np.linspace(0.0, 2 * math.pi, cfg.grid_points + 1)[:-1]
    pdf = marginal_aoa_pdf(alpha, model, link, toa)
    write_csv(out / "aoa.csv", ("alpha_rad", "pdf"), (alpha, pdf))
    support = aoa_support(model)
    total = float(aoa_bin_probabilities(np.array([0.0, 2 * math.pi]), model, link, toa)[0])
    meta = _sidecar(
        cfg,
        "aoa",
        quantity="arrival_angle_rad",
        support_rad=[[iv.lo, iv.hi, iv.lo_closed, iv.hi_closed] for iv in support.intervals],
        support_deg=support.in_degrees(),
        total_probability=total,
        **_toa_summary(toa),
    )
    write_json(out / "aoa.json", meta)
    return meta


def cmd_simulate(cfg, out: Path) -> dict:
    mode = cfg.mode
    sim = cfg.simulation
    scfg = SimulationConfig(
        cfg.model, cfg.link, mode, sim.realizations, sim.seed, sim.s_window, n_jobs=sim.n_jobs
    )
    reference = ToaDistribution(cfg.model, cfg.link, blocking=mode is not BlockingMode.NONE)
    result = simulate_first_arrival(scfg, reference)
    write_csv(
        out / "samples.csv",
        ("s", "alpha_rad", "quadrant", "theta_rad"),
        (result.s, result.alpha, [int(q) for q in result.quadrant], result.theta),
    )
    comparison = _sidecar(cfg, "simulate", status=result.status, diagnostics=result.diagnostics)
    if len(result):
        ecdf = empirical_cdf(result.s)
        write_csv(out / "ecdf.csv", ("x", "cdf"), (ecdf.grid, ecdf.cdf))
        analytic = reference.curve(points=max(cfg.grid_points, 400))
        comparison.update(
            reference=analytic.meta["source"],
            ks=ks_distance(ecdf, analytic),
            **_toa_summary(reference),
        )
    write_json(out / "comparison.json", comparison)
    return comparison


def cmd_fit(cfg, out: Path) -> dict:
    model, link = cfg.model, cfg.link
    toa = ToaDistribution(model, link, blocking=True)
    bias = bias_from_toa(toa.curve(points=max(cfg.grid_points, 400), coverage=MOMENT_COVERAGE), link)
    moments = bias_moments(bias)
    matching = MomentMatching(cfg.fit.matching)
    fits = {fam: fit_family(fam, moments, matching) for fam in Family}
    if cfg.fit.method == "analytic-exp":
        fits[Family.EXPONENTIAL] = FittedFamily(Family.EXPONENTIAL, (exponential_bias_rate(model),), matching)
    families = {}
    for fam, fitted in fits.items():
        kl = kl_divergence(fitted, bias, full_output=True)
        families[fam.value] = {
            "params": list(fitted.params),
            "kl_nats": kl.value,
            "kl_truncation": kl.truncation,
        }
    report = _sidecar(
        cfg,
        "fit",
        moments={"m1": moments.m1, "m2": moments.m2, "variance": moments.variance},
        families=families,
        best=min(families, key=lambda k: families[k]["kl_nats"]),
        **_toa_summary(toa),
    )
    write_json(out / "fit.json", report)
    return report


COMMANDS = {
    "toa": cmd_toa,
    "bias": cmd_bias,
    "aoa": cmd_aoa,
    "simulate": cmd_simulate,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firstarrival", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path, help="YAML run configuration")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (created if missing)")
        p.add_argument("--seed", type=int, help="override simulation.seed")
        p.add_argument("--realizations", type=int, help="override simulation.realizations")
        p.add_argument("--mode", help="override simulation.mode")
        p.add_argument("--grid-points", type=int, help="override grid.points")
        p.add_argument("-v", "--verbose", action="store_true")
        if name in ("toa", "bias"):
            p.add_argument("--no-blocking", action="store_true", help="tabulate the law without blocking")
        if name == "fit":
            p.add_argument("--method", choices=cfgmod.FIT_METHODS, help="override fit.method")
            p.add_argument("--matching", choices=("first", "second"), help="override fit.matching")
    return parser


def _apply_overrides(cfg: cfgmod.RunConfig, args) -> cfgmod.RunConfig:
    sim = cfg.simulation
    if args.seed is not None:
        sim = replace(sim, seed=args.seed)
    if args.realizations is not None:
        sim = replace(sim, realizations=args.realizations)
    if args.mode is not None:
        sim = replace(sim, mode=cfgmod.parse_mode(args.mode).value)
    cfg = replace(cfg, simulation=sim)
    if args.grid_points is not None:
        cfg = replace(cfg, grid_points=args.grid_points)
    if getattr(args, "method", None):
        cfg = replace(cfg, fit=replace(cfg.fit, method=args.method))
    if getattr(args, "matching", None):
        cfg = replace(cfg, fit=replace(cfg.fit, matching=args.matching))
    return cfgmod.validate(cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _apply_overrides(cfgmod.load(args.config), args)
        args.out.mkdir(parents=True, exist_ok=True)
        kwargs = {"blocking": not args.no_blocking} if args.command in ("toa", "bias") else {}
        summary = COMMANDS[args.command](cfg, args.out, **kwargs)
    except (QuadratureError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ValueError, OSError) as exc:
        # config errors, domain errors and rejected parameters all land here
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    log.info("wrote %s output to %s", args.command, args.out)
    if args.command == "simulate" and summary.get("status") == "empty":
        print("warning: no realization had a visible reflection", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
