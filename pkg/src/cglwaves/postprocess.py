"""From continuation output to standing waves: scaling, extension, rescaling,
and the integral-identity diagnostics.

A standing wave profile u with frequency omega satisfies the strong form

    e^{i theta} Lap u + e^{i gamma} |u|^alpha u = i omega u.

Pairing the equation with conj(u) gives two scalar identities:

    real:  cos(theta) * I# |grad u|^2 = cos(gamma) * I# |u|^(alpha+2)
    imag:  sin(theta) * I# |grad u|^2 - sin(gamma) * I# |u|^(alpha+2)
           + omega * I# |u|^2 = 0

(I# denotes the domain quadrature). Both are reported as relative errors
against the largest participating term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import BoxDomain, Domain, TorusDomain, make_domain
from .errors import AlphaZero, CglError, GridTooCoarse
from .nonlinearity import nonlinear_term
from .params import Params

NONTRIVIAL_L2 = 1e-6
RESIDUAL_REL_TOL = 1e-8


def strong_residual(domain, params, alpha, omega, u):
    """e^{i theta} Lap u + e^{i gamma} |u|^alpha u - i omega u on the grid."""
    u = np.asarray(u, dtype=complex)
    nl = nonlinear_term(alpha, u, alpha_max=math.inf)
    return (
        params.phase_theta * domain.laplacian(u)
        + params.phase_gamma * nl
        - 1j * omega * u
    )


def residual_scale(domain, params, alpha, omega, u):
    """Magnitude of the largest term in the strong form; the residual is
    meaningful only relative to this (large-amplitude waves scale every term)."""
    u = np.asarray(u, dtype=complex)
    lap = domain.norm_inf(domain.laplacian(u))
    amp = domain.norm_inf(u)
    return max(lap, amp ** (alpha + 1.0) if amp > 0 else 0.0, abs(omega) * amp, 1e-300)


@dataclass(frozen=True)
class StandingWave:
    u: np.ndarray
    omega: float
    alpha: float
    params: Params
    domain: Domain
    residual_inf: float
    residual_rel: float

    @property
    def l2_norm(self):
        return self.domain.norm_l2(self.u)


def _make_wave(domain, params, alpha, omega, u, rel_tol=RESIDUAL_REL_TOL):
    res = strong_residual(domain, params, alpha, omega, u)
    rinf = domain.norm_inf(res)
    rel = rinf / residual_scale(domain, params, alpha, omega, u)
    if rel > rel_tol:
        raise CglError(
            f"standing-wave residual {rinf:.3g} is {rel:.3g} relative to the "
            f"equation scale, beyond the tolerance {rel_tol:.3g}"
        )
    return StandingWave(u, float(omega), float(alpha), params, domain, rinf, rel)


def scale_to_standing_wave(point, domain, params, rel_tol=RESIDUAL_REL_TOL):
    """Turn a continuation point (alpha, mu, omega, v) into the wave u = mu^(1/alpha) v.

    Undefined at alpha = 0; use log_l2_norm for norm trends near alpha = 0.
    """
    if point.alpha <= 0.0:
        raise AlphaZero(
            "mu^(1/alpha) is undefined at alpha = 0; "
            "log_l2_norm(point, domain) gives the norm trend instead"
        )
    if point.mu <= 0.0:
        raise CglError(f"mu = {point.mu} must be positive for the amplitude scaling")
    factor = point.mu ** (1.0 / point.alpha)
    if not math.isfinite(factor):
        raise CglError(
            f"amplitude factor mu^(1/alpha) overflows at mu={point.mu}, alpha={point.alpha}"
        )
    u = factor * np.asarray(point.v, dtype=complex)
    return _make_wave(domain, params, point.alpha, point.omega, u, rel_tol)


def log_l2_norm(point, domain):
    """log ||u||_L2 = (1/alpha) log mu + log ||v||_L2, stable for tiny alpha."""
    if point.alpha <= 0.0:
        raise AlphaZero("the log-norm trend needs alpha > 0")
    return math.log(point.mu) / point.alpha + math.log(domain.norm_l2(point.v))


def extend_to_torus(wave, rel_tol=RESIDUAL_REL_TOL):
    """Odd-reflect a Dirichlet box wave onto the torus with periods 2 l_a.

    The box midpoint nodes and their reflections tile the torus midpoint grid
    exactly, so the extension is a pure index flip with a sign, equivalently
    the same sine series read as a periodic function. The frequency omega is
    unchanged.
    """
    box = wave.domain
    if not isinstance(box, BoxDomain):
        raise CglError("only box waves extend to the torus")
    torus = make_domain("torus", box.dim, box.lengths, 2 * box.modes)
    u = np.asarray(wave.u, dtype=complex)
    for ax in range(box.dim):
        u = np.concatenate([u, -np.flip(u, axis=ax)], axis=ax)
    return _make_wave(torus, wave.params, wave.alpha, wave.omega, u, rel_tol)


def rescale_family(wave, n, modes=None, rel_tol=RESIDUAL_REL_TOL):
    """The n-th member of the rescaling family: u_n(x) = n^(2/alpha) u(n x),
    a wave with frequency n^2 omega.

    Implemented by index mapping in coefficient space (mode m -> mode n*m with
    amplitude n^(2/alpha)), exact on the grid. The default output grid is n
    times finer so the mapped lattice still samples the original collocation
    points; a coarser `modes` may be forced but must hold the mapped band.
    """
    torus = wave.domain
    if not isinstance(torus, TorusDomain):
        raise CglError("rescaling acts on torus waves; extend_to_torus first")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return StandingWave(
            wave.u.copy(), wave.omega, wave.alpha, wave.params, torus,
            wave.residual_inf, wave.residual_rel,
        )
    if wave.alpha <= 0.0:
        raise AlphaZero("the rescaling amplitude n^(2/alpha) needs alpha > 0")
    coefs = torus.to_modes(wave.u)
    support = np.abs(coefs) > 1e-14 * np.max(np.abs(coefs))
    wn = torus.wavenumbers
    if torus.dim == 1:
        k_max = int(np.max(np.abs(wn[support]))) if support.any() else 0
    else:
        k1 = np.abs(wn)[:, None] * np.ones_like(wn)[None, :]
        k2 = np.ones_like(wn)[:, None] * np.abs(wn)[None, :]
        k_max = int(max(np.max(k1[support]), np.max(k2[support]))) if support.any() else 0
    out_modes = int(modes) if modes is not None else n * torus.modes
    if n * k_max > out_modes // 2:
        raise GridTooCoarse(
            f"modes {out_modes} cannot hold wavenumbers up to {n * k_max}; "
            f"need at least {2 * n * k_max}"
        )
    fine = make_domain("torus", torus.dim, torus.lengths, out_modes)
    amp = n ** (2.0 / wave.alpha)
    new_coefs = np.zeros(fine.field_shape, dtype=complex)
    if torus.dim == 1:
        target = (n * wn) % out_modes
        np.add.at(new_coefs, target, amp * coefs)
    else:
        target = (n * wn) % out_modes
        idx0 = np.repeat(target, torus.modes)
        idx1 = np.tile(target, torus.modes)
        np.add.at(new_coefs, (idx0, idx1), amp * coefs.ravel())
    u_n = fine.from_modes(new_coefs)
    return _make_wave(fine, wave.params, wave.alpha, n * n * wave.omega, u_n, rel_tol)


def identity_errors(domain, params, alpha, mu, omega, v):
    """Relative errors of the two scalar identities for the mu-weighted form

        e^{i theta} Lap v + mu e^{i gamma} |v|^alpha v = i omega v.

    With mu = 1 this is the standing-wave form. Returns
    (real_err, imag_err, grad_sq, power_integral, mass).
    """
    v = np.asarray(v, dtype=complex)
    grad_sq = domain.grad_norm_sq(v)
    power = float(np.real(domain.integrate(np.abs(v) ** (alpha + 2.0))))
    mass = float(np.real(domain.integrate(np.abs(v) ** 2)))
    scale = max(grad_sq, mu * power, abs(omega) * mass, 1e-300)
    real_err = abs(math.cos(params.theta) * grad_sq - mu * math.cos(params.gamma) * power)
    imag_err = abs(
        math.sin(params.theta) * grad_sq
        - mu * math.sin(params.gamma) * power
        + omega * mass
    )
    return real_err / scale, imag_err / scale, grad_sq, power, mass


def identity_report(wave):
    """Diagnostics dict for a standing wave: identity errors, the three
    integrals behind them, and a nontriviality flag."""
    real_err, imag_err, grad_sq, power, mass = identity_errors(
        wave.domain, wave.params, wave.alpha, 1.0, wave.omega, wave.u
    )
    l2 = math.sqrt(max(mass, 0.0))
    return {
        "identity_real_err": real_err,
        "identity_imag_err": imag_err,
        "grad_norm_sq": grad_sq,
        "power_integral": power,
        "mass": mass,
        "l2_norm": l2,
        "omega": wave.omega,
        "alpha": wave.alpha,
        "theta": wave.params.theta,
        "gamma": wave.params.gamma,
        "residual_inf": wave.residual_inf,
        "nontrivial": bool(l2 >= NONTRIVIAL_L2),
    }
