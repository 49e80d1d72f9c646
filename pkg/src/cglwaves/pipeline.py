"""Pipeline orchestration: run branches, check them, write artifacts.

Artifacts per branch (suffix _k<index> when several eigen indices run):

    branch.csv     one row per accepted point, columns in BRANCH_COLUMNS order
    meta.json      params, domain, lambda, seed values, tolerances, stop reason
    omega_vs_alpha.csv, lognorm_vs_alpha.csv     plot data
    evolution.json (when [verify] evolve = true)
    failures.json  machine-readable manifest when any check fails

Floats are written with repr (shortest round-trip), so identical
configurations produce byte-identical CSV output.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .continuation import continue_branch
from .domain import dump_field, make_domain
from .eigen import check_simple, eigenpairs
from .errors import CglError
from .evolution import verify_standing_wave
from .postprocess import log_l2_norm, scale_to_standing_wave

logger = logging.getLogger("cglwaves.pipeline")

BRANCH_COLUMNS = [
    "alpha", "mu", "omega", "l2_norm_v", "l2_norm_u", "h1_norm_u",
    "residual_inf", "identity_real_err", "identity_imag_err", "newton_iters",
]


def _fmt(x):
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def branch_row(point, domain):
    """One CSV row for an accepted point; u-norms are nan at alpha = 0."""
    if point.alpha > 0:
        factor = point.mu ** (1.0 / point.alpha)
        l2_u = factor * point.l2_norm_v
        grad_sq = domain.grad_norm_sq(point.v)
        h1_u = factor * math.sqrt(point.l2_norm_v**2 + grad_sq)
    else:
        l2_u = math.nan
        h1_u = math.nan
    return [
        point.alpha, point.mu, point.omega, point.l2_norm_v, l2_u, h1_u,
        point.residual_inf, point.identity_real_err, point.identity_imag_err,
        point.newton_iters,
    ]


def write_branch_csv(path, table):
    lines = [",".join(BRANCH_COLUMNS)]
    for point in table.points:
        lines.append(",".join(_fmt(x) for x in branch_row(point, table.domain)))
    Path(path).write_text("\n".join(lines) + "\n")


def write_branch_meta(path, table, config):
    meta = {
        "params": {"theta": table.params.theta, "gamma": table.params.gamma},
        "domain": table.domain.descriptor(),
        "lambda": table.lam,
        "eigen_index": table.eigen_index,
        "seed": {"mu0": table.mu0, "omega0": table.omega0},
        "tolerances": {
            "newton_tol": config.newton_tol,
            "residual_tol": config.residual_tol,
            "identity_tol": config.identity_tol,
            "min_step": config.min_step,
        },
        "alpha_reached": table.alpha_reached,
        "stop_reason": table.stop_reason,
    }
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _write_plot_data(out_dir, suffix, table):
    omega_lines = ["alpha,omega"]
    norm_lines = ["alpha,log_l2_norm_u"]
    for p in table.points:
        omega_lines.append(f"{_fmt(p.alpha)},{_fmt(p.omega)}")
        if p.alpha > 0:
            norm_lines.append(f"{_fmt(p.alpha)},{_fmt(log_l2_norm(p, table.domain))}")
    (out_dir / f"omega_vs_alpha{suffix}.csv").write_text("\n".join(omega_lines) + "\n")
    (out_dir / f"lognorm_vs_alpha{suffix}.csv").write_text("\n".join(norm_lines) + "\n")


@dataclass
class PipelineResult:
    exit_code: int
    failures: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)


def _run_branch(config, out_dir, index):
    """One (config, eigen index) job; returns (artifact paths, failures, table)."""
    failures = []
    artifacts = []
    domain = make_domain(config.domain_kind, config.dim, config.lengths, config.modes)
    pairs = eigenpairs(domain, max(config.eigen_indices))
    pair = pairs[index - 1]
    check_simple(domain, pair)
    table = continue_branch(
        domain, config.params, pair, config.alpha_grid(),
        newton_tol=config.newton_tol, max_newton=25, min_step=config.min_step,
        solver=config.solver, alpha_max=config.alpha_max, eigen_index=index,
    )
    suffix = f"_k{index}" if len(config.eigen_indices) > 1 else ""
    csv_path = out_dir / f"branch{suffix}.csv"
    meta_path = out_dir / f"meta{suffix}.json"
    write_branch_csv(csv_path, table)
    write_branch_meta(meta_path, table, config)
    _write_plot_data(out_dir, suffix, table)
    artifacts += [csv_path, meta_path]

    if table.stop_reason != "completed":
        failures.append({
            "check": "branch_completed", "eigen_index": index,
            "value": table.alpha_reached, "limit": config.alpha_max,
            "detail": table.stop_reason,
        })
    for p in table.points:
        if p.residual_inf > config.residual_tol:
            failures.append({
                "check": "residual", "eigen_index": index, "alpha": p.alpha,
                "value": p.residual_inf, "limit": config.residual_tol,
            })
        if max(p.identity_real_err, p.identity_imag_err) > config.identity_tol:
            failures.append({
                "check": "identity", "eigen_index": index, "alpha": p.alpha,
                "value": max(p.identity_real_err, p.identity_imag_err),
                "limit": config.identity_tol,
            })

    if config.dump_every > 0:
        for i, p in enumerate(table.points):
            if p.alpha > 0 and i % config.dump_every == 0:
                wave = scale_to_standing_wave(p, domain, config.params)
                dump_path = out_dir / f"wave{suffix}_{i:03d}.csv"
                dump_field(dump_path, domain, wave.u, wave={
                    "omega": wave.omega, "alpha": wave.alpha,
                    "theta": config.params.theta, "gamma": config.params.gamma,
                })
                artifacts.append(dump_path)

    if config.evolve:
        last = next((p for p in reversed(table.points) if p.alpha > 0), None)
        if last is not None:
            wave = scale_to_standing_wave(last, domain, config.params)
            report = verify_standing_wave(
                wave, T=config.evolve_T, dt=config.evolve_dt,
                checkpoints=config.evolve_checkpoints,
            )
            rep_path = out_dir / f"evolution{suffix}.json"
            rep_path.write_text(
                json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"
            )
            artifacts.append(rep_path)
            if report.orbit_err > config.orbit_tol:
                failures.append({
                    "check": "evolution_orbit", "eigen_index": index,
                    "alpha": last.alpha, "value": report.orbit_err,
                    "limit": config.orbit_tol,
                })
    return artifacts, failures, table


def run_pipeline(config, out_dir=None, jobs=1):
    """Run every configured eigen index end to end.

    Exit code 0 means every accepted point passed the residual and identity
    checks (and the evolution check when enabled); any failure writes
    failures.json and returns 1.
    """
    out_dir = Path(out_dir if out_dir is not None else config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = PipelineResult(exit_code=0)

    def job(index):
        try:
            return index, _run_branch(config, out_dir, index)
        except CglError as exc:
            logger.error("branch %d failed: %s", index, exc)
            failure = {"check": "branch_error", "eigen_index": index,
                       "detail": str(exc)}
            return index, ([], [failure], None)

    indices = list(config.eigen_indices)
    if jobs > 1 and len(indices) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(job, indices))
    else:
        outcomes = [job(i) for i in indices]

    for index, (artifacts, failures, table) in outcomes:
        result.artifacts += artifacts
        result.failures += failures
        if table is not None:
            result.tables[index] = table

    if result.failures:
        manifest = out_dir / "failures.json"
        manifest.write_text(json.dumps(result.failures, indent=2, sort_keys=True) + "\n")
        result.artifacts.append(manifest)
        result.exit_code = 1
        logger.warning("pipeline finished with %d failed checks", len(result.failures))
    else:
        logger.info("pipeline finished clean: %d branch(es)", len(indices))
    return result
