"""Run configuration: TOML parsing, defaults and invariant checks.

Sections and keys (defaults in parentheses; theta and gamma are required):

    [params]        theta, gamma                    angles in radians
    [domain]        kind ("box"), dim (1),
                    lengths ([pi] per axis), modes (128)
    [continuation]  eigen_index (1, int or list), alpha_max (0.5),
                    alpha_step (0.025), newton_tol (1e-10),
                    residual_tol (1e-9), identity_tol (1e-6),
                    min_step (1e-5), solver ("dense")
    [verify]        evolve (false), T (1.0), dt (1e-3),
                    checkpoints (10), orbit_tol (1e-5)
    [output]        dir ("out"), dump_every (0 = no field dumps)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .nonlinearity import alpha_cap
from .params import Params

_SECTIONS = {"params", "domain", "continuation", "verify", "output"}


@dataclass
class RunConfig:
    params: Params
    domain_kind: str = "box"
    dim: int = 1
    lengths: tuple = (math.pi,)
    modes: int = 128
    eigen_indices: tuple = (1,)
    alpha_max: float = 0.5
    alpha_step: float = 0.025
    newton_tol: float = 1e-10
    residual_tol: float = 1e-9
    identity_tol: float = 1e-6
    min_step: float = 1e-5
    solver: str = "dense"
    evolve: bool = False
    evolve_T: float = 1.0
    evolve_dt: float = 1e-3
    evolve_checkpoints: int = 10
    orbit_tol: float = 1e-5
    out_dir: str = "out"
    dump_every: int = 0
    extra: dict = field(default_factory=dict)

    def alpha_grid(self):
        """The target grid 0, step, 2 step, ..., alpha_max."""
        steps = int(round(self.alpha_max / self.alpha_step))
        grid = [i * self.alpha_step for i in range(steps + 1)]
        if abs(grid[-1] - self.alpha_max) > 1e-12:
            if grid[-1] > self.alpha_max:
                grid.pop()
            grid.append(self.alpha_max)
        return grid


def _get(section, key, default, types, errors):
    value = section.pop(key, default)
    if value is not None and not isinstance(value, types):
        errors.append(f"{key}: expected {types}, got {type(value).__name__}")
        return default
    return value


def parse_config(text):
    """Parse TOML text into a validated RunConfig.

    Raises ConfigError with the parser's line/column on malformed input, or
    with the violated invariant spelled out.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    unknown = set(data) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    errors = []
    sec_params = dict(data.get("params", {}))
    theta = sec_params.pop("theta", None)
    gamma = sec_params.pop("gamma", None)
    if theta is None or gamma is None:
        raise ConfigError("theta and gamma are required in [params]")
    try:
        params = Params(float(theta), float(gamma))
    except ValueError as exc:
        raise ConfigError(f"invalid angles: {exc}") from exc

    dom = dict(data.get("domain", {}))
    kind = _get(dom, "kind", "box", str, errors)
    dim = _get(dom, "dim", 1, int, errors)
    lengths = dom.pop("lengths", None)
    modes = _get(dom, "modes", 128, int, errors)
    if lengths is None:
        lengths = [1.0] if kind == "ball" else [math.pi] * dim
    lengths = tuple(float(l) for l in lengths)

    cont = dict(data.get("continuation", {}))
    idx = cont.pop("eigen_index", 1)
    if isinstance(idx, int):
        indices = (idx,)
    elif isinstance(idx, list) and all(isinstance(i, int) for i in idx):
        indices = tuple(idx)
    else:
        raise ConfigError("eigen_index must be an integer or a list of integers")
    alpha_max = float(_get(cont, "alpha_max", 0.5, (int, float), errors))
    alpha_step = float(_get(cont, "alpha_step", 0.025, (int, float), errors))
    newton_tol = float(_get(cont, "newton_tol", 1e-10, (int, float), errors))
    residual_tol = float(_get(cont, "residual_tol", 1e-9, (int, float), errors))
    identity_tol = float(_get(cont, "identity_tol", 1e-6, (int, float), errors))
    min_step = float(_get(cont, "min_step", 1e-5, (int, float), errors))
    solver = _get(cont, "solver", "dense", str, errors)

    ver = dict(data.get("verify", {}))
    evolve = bool(_get(ver, "evolve", False, bool, errors))
    evolve_T = float(_get(ver, "T", 1.0, (int, float), errors))
    evolve_dt = float(_get(ver, "dt", 1e-3, (int, float), errors))
    evolve_checkpoints = int(_get(ver, "checkpoints", 10, int, errors))
    orbit_tol = float(_get(ver, "orbit_tol", 1e-5, (int, float), errors))

    out = dict(data.get("output", {}))
    out_dir = _get(out, "dir", "out", str, errors)
    dump_every = int(_get(out, "dump_every", 0, int, errors))

    for name, leftover in (("params", sec_params), ("domain", dom),
                           ("continuation", cont), ("verify", ver), ("output", out)):
        if leftover:
            errors.append(f"unknown keys in [{name}]: {sorted(leftover)}")
    if errors:
        raise ConfigError("; ".join(errors))

    cfg = RunConfig(
        params=params, domain_kind=kind, dim=dim, lengths=lengths, modes=modes,
        eigen_indices=indices, alpha_max=alpha_max, alpha_step=alpha_step,
        newton_tol=newton_tol, residual_tol=residual_tol, identity_tol=identity_tol,
        min_step=min_step, solver=solver, evolve=evolve, evolve_T=evolve_T,
        evolve_dt=evolve_dt, evolve_checkpoints=evolve_checkpoints,
        orbit_tol=orbit_tol, out_dir=out_dir, dump_every=dump_every,
    )
    _validate(cfg)
    return cfg


def _validate(cfg):
    cap = alpha_cap(cfg.dim if cfg.domain_kind == "ball" else min(cfg.dim, 2))
    if cfg.alpha_max > cap:
        raise ConfigError(
            f"alpha_max = {cfg.alpha_max} violates (N-2)*alpha <= 2 for N = {cfg.dim}"
        )
    for name in ("alpha_max", "alpha_step", "newton_tol", "residual_tol",
                 "identity_tol", "min_step", "evolve_T", "evolve_dt", "orbit_tol"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    if cfg.alpha_step > cfg.alpha_max:
        raise ConfigError("alpha_step cannot exceed alpha_max")
    if any(i < 1 for i in cfg.eigen_indices):
        raise ConfigError("eigen_index entries must be >= 1")
    if len(set(cfg.eigen_indices)) != len(cfg.eigen_indices):
        raise ConfigError("eigen_index entries must be distinct")
    if max(cfg.eigen_indices) > cfg.modes // 4:
        raise ConfigError(
            f"eigen_index {max(cfg.eigen_indices)} exceeds modes/4 = {cfg.modes // 4}"
        )
    if cfg.evolve and cfg.domain_kind == "ball":
        raise ConfigError("evolution verification needs a spectral domain (box/torus)")
    if cfg.modes < 8:
        raise ConfigError("modes must be at least 8")
    if cfg.solver not in ("dense", "iterative"):
        raise ConfigError(f"unknown solver {cfg.solver!r}")
    if cfg.evolve_checkpoints < 1:
        raise ConfigError("checkpoints must be >= 1")
    if cfg.dump_every < 0:
        raise ConfigError("dump_every must be >= 0")


def load_config(path):
    return parse_config(Path(path).read_text())
