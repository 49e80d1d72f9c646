"""The regularized power nonlinearity and its pointwise real-linear derivative.

nonlinear_term(alpha, v) is |v|^alpha * v for alpha > 0 and v itself for
alpha <= 0, applied nodewise. Its derivative in the direction u is

    |v|^alpha u + alpha |v|^(alpha-2) v Re(conj(v) u)      alpha > 0, v != 0
    0                                                      alpha > 0, v == 0
    u                                                      alpha <= 0

which is linear over the reals but not over the complexes (the Re term).
The singular factor is evaluated as |v|^alpha (v/|v|) Re((conj(v)/|v|) u),
algebraically identical but safe near v = 0; moduli below 1e-300 map to 0.
"""

from __future__ import annotations

import math

import numpy as np

TINY_MODULUS = 1e-300

# (N - 2) * alpha_max <= 2 holds up to N = 3 with this default
DEFAULT_ALPHA_MAX = 2.0


def alpha_cap(dim):
    """Largest admissible exponent for dimension `dim` (Sobolev bound)."""
    if dim <= 2:
        return math.inf
    return 2.0 / (dim - 2)


def check_alpha(alpha, alpha_max):
    if alpha > alpha_max:
        raise ValueError(f"alpha = {alpha} exceeds the cap {alpha_max}")


def nonlinear_term(alpha, values, alpha_max=DEFAULT_ALPHA_MAX):
    """Nodewise |v|^alpha v (v unchanged for alpha <= 0)."""
    check_alpha(alpha, alpha_max)
    values = np.asarray(values, dtype=complex)
    if alpha <= 0:
        return values.copy()
    return np.abs(values) ** alpha * values


def nonlinear_term_derivative(alpha, v, u, alpha_max=DEFAULT_ALPHA_MAX):
    """Directional derivative of nonlinear_term at v in direction u, nodewise."""
    check_alpha(alpha, alpha_max)
    u = np.asarray(u, dtype=complex)
    if alpha <= 0:
        return u.copy()
    v = np.asarray(v, dtype=complex)
    m = np.abs(v)
    safe = m > TINY_MODULUS
    phase = np.where(safe, v / np.where(safe, m, 1.0), 0.0)
    ma = np.where(safe, m**alpha, 0.0)
    return ma * u + alpha * ma * phase * np.real(np.conj(phase) * u)
