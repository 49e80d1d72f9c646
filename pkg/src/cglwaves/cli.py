"""Command-line interface.

    cglwaves --config run.toml eigen [--count N] [--output FILE]
    cglwaves --config run.toml continue
    cglwaves --config run.toml pipeline
    cglwaves verify FIELD.csv [--output FILE] [--theta ... --gamma ... --omega ... --alpha ...]
    cglwaves evolve FIELD.csv [--T 1.0] [--dt 1e-3] [--checkpoints 10] [...]

Global flags: --config PATH (TOML run configuration), --out DIR (overrides
[output] dir), --jobs K (parallel eigen-index jobs). The environment variable
CGLW_LOG sets the log level (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import load_config
from .domain import load_field, make_domain
from .eigen import check_simple, eigenpairs
from .errors import CglError, DegenerateEigenvalue
from .evolution import verify_standing_wave
from .params import Params
from .pipeline import run_pipeline
from .postprocess import StandingWave, identity_report, residual_scale, strong_residual


def _setup_logging():
    level = os.environ.get("CGLW_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


def _require_config(args):
    if args.config is None:
        raise CglError("this subcommand needs --config PATH")
    return load_config(args.config)


def _cmd_eigen(args):
    config = _require_config(args)
    domain = make_domain(config.domain_kind, config.dim, config.lengths, config.modes)
    pairs = eigenpairs(domain, args.count)
    lines = ["index,lambda,gap,simple"]
    for pair in pairs:
        try:
            check_simple(domain, pair)
            simple = "true"
        except DegenerateEigenvalue:
            simple = "false"
        lines.append(f"{pair.index},{pair.lam!r},{pair.gap!r},{simple}")
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_continue(args):
    config = _require_config(args)
    out_dir = Path(args.out if args.out else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    # branch only: reuse the pipeline with checks but without evolution
    config.evolve = False
    result = run_pipeline(config, out_dir=out_dir, jobs=args.jobs)
    return result.exit_code


def _cmd_pipeline(args):
    config = _require_config(args)
    out_dir = args.out if args.out else None
    result = run_pipeline(config, out_dir=out_dir, jobs=args.jobs)
    return result.exit_code


def _load_wave(args):
    domain, values, meta = load_field(args.field)
    meta = meta or {}
    def pick(name, flag):
        if flag is not None:
            return float(flag)
        if name in meta:
            return float(meta[name])
        raise CglError(f"{name} not in the field sidecar; pass --{name}")
    theta = pick("theta", args.theta)
    gamma = pick("gamma", args.gamma)
    omega = pick("omega", args.omega)
    alpha = pick("alpha", args.alpha)
    params = Params(theta, gamma)
    res = strong_residual(domain, params, alpha, omega, values)
    rinf = domain.norm_inf(res)
    rel = rinf / residual_scale(domain, params, alpha, omega, values)
    return StandingWave(values, omega, alpha, params, domain, rinf, rel)


def _emit_json(payload, output):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args):
    wave = _load_wave(args)
    _emit_json(identity_report(wave), args.output)
    return 0


def _cmd_evolve(args):
    wave = _load_wave(args)
    report = verify_standing_wave(
        wave, T=args.T, dt=args.dt, checkpoints=args.checkpoints
    )
    _emit_json(report.as_dict(), args.output)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cglwaves",
        description="Standing waves of the complex Ginzburg-Landau equation: "
                    "continuation, verification and time evolution.",
    )
    parser.add_argument("--config", help="TOML run configuration")
    parser.add_argument("--out", help="output directory (overrides [output] dir)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel eigen-index jobs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="print the small end of the spectrum as CSV")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("continue", help="run the branch continuation and export it")
    p.set_defaults(func=_cmd_continue)

    p = sub.add_parser("pipeline", help="full run: branches, checks, artifacts")
    p.set_defaults(func=_cmd_pipeline)

    for name, func, helptext in (
        ("verify", _cmd_verify, "integral-identity report for a field dump"),
        ("evolve", _cmd_evolve, "time-evolution report for a field dump"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("field", help="field dump CSV (JSON sidecar alongside)")
        p.add_argument("--output")
        p.add_argument("--theta", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--omega", type=float)
        p.add_argument("--alpha", type=float)
        if name == "evolve":
            p.add_argument("--T", type=float, default=1.0)
            p.add_argument("--dt", type=float, default=1e-3)
            p.add_argument("--checkpoints", type=int, default=10)
        p.set_defaults(func=func)
    return parser


def main(argv=None):
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CglError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
