"""Eigenpairs of -Laplacian on a domain, with simplicity certificates.

Box and torus eigenpairs are taken analytically from the basis, never from a
numerical eigensolver: eigenvalues are exact and eigenvectors are sampled
basis modes. Ball eigenpairs come from a symmetric tridiagonal eigensolve of
the weighted radial stencil. Eigenvectors are real, normalized to unit L2
norm, and sign-fixed so the entry of largest magnitude is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .domain import BallDomain, BoxDomain, TorusDomain
from .errors import DegenerateEigenvalue, EigensolverError

SIMPLE_REL_GAP = 1e-8


@dataclass(frozen=True)
class EigenPair:
    lam: float
    phi: np.ndarray          # real nodal values, unit L2 norm
    index: int               # 1-based position in the ascending spectrum
    gap: float               # distance to the nearest other eigenvalue

    def __repr__(self):
        return f"EigenPair(index={self.index}, lam={self.lam:.12g}, gap={self.gap:.3g})"


@dataclass(frozen=True)
class SimplicityCertificate:
    lam: float
    gap: float
    rel_gap: float
    threshold: float


def _fix_sign(phi):
    flat = phi.ravel()
    if flat[np.argmax(np.abs(flat))] < 0:
        phi = -phi
    return phi


def _box_spectrum(domain):
    m = domain.modes
    if domain.dim == 1:
        k = np.arange(1, m + 1)
        lams = (k * math.pi / domain.lengths[0]) ** 2
        tuples = [(lams[i], (i + 1,)) for i in range(m)]
    else:
        k1 = np.arange(1, m + 1)
        l1 = (k1 * math.pi / domain.lengths[0]) ** 2
        l2 = (k1 * math.pi / domain.lengths[1]) ** 2
        tuples = [
            (l1[i] + l2[j], (i + 1, j + 1))
            for i in range(m)
            for j in range(m)
        ]
    tuples.sort(key=lambda t: (t[0], t[1]))
    return tuples


def _box_mode(domain, ks):
    axes = []
    for ax, k in enumerate(ks):
        l = domain.lengths[ax]
        x = domain.nodes()[ax]
        axes.append(math.sqrt(2.0 / l) * np.sin(k * math.pi * x / l))
    if domain.dim == 1:
        return axes[0]
    return np.multiply.outer(axes[0], axes[1])


def _torus_spectrum(domain):
    m = domain.modes
    wn = np.sort(domain.wavenumbers)
    entries = []
    if domain.dim == 1:
        for w in wn:
            lam = (2.0 * math.pi * w / domain.periods[0]) ** 2
            entries.append((lam, (int(w),)))
    else:
        for w1 in wn:
            for w2 in wn:
                lam = (2.0 * math.pi * w1 / domain.periods[0]) ** 2 + (
                    2.0 * math.pi * w2 / domain.periods[1]
                ) ** 2
                entries.append((lam, (int(w1), int(w2))))
    entries.sort(key=lambda t: (t[0], t[1]))
    return entries


def _torus_mode(domain, ws):
    grids = domain.grids()
    phase = sum(
        2.0 * math.pi * w * g / p for w, g, p in zip(ws, grids, domain.periods)
    )
    vol = domain.volume
    if all(w == 0 for w in ws):
        return np.full(domain.field_shape, 1.0 / math.sqrt(vol))
    # one real combination per wavenumber tuple; the conjugate pair shows up
    # as the mirrored tuple, so cos for the first of the pair and sin after
    if ws > tuple(-w for w in ws):
        return math.sqrt(2.0 / vol) * np.cos(phase)
    return math.sqrt(2.0 / vol) * np.sin(phase)


def _gaps(sorted_lams, pos):
    lam = sorted_lams[pos]
    gap = math.inf
    if pos > 0:
        gap = min(gap, lam - sorted_lams[pos - 1])
    if pos + 1 < len(sorted_lams):
        gap = min(gap, sorted_lams[pos + 1] - lam)
    return float(gap)


def eigenpairs(domain, count):
    """The `count` smallest eigenpairs of -Laplacian, ascending.

    count must satisfy 1 <= count <= modes/4; the fraction keeps the
    discretization honest for every pair returned.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be at least 1")
    if count > domain.modes // 4:
        raise ValueError(
            f"count = {count} exceeds modes/4 = {domain.modes // 4} for this domain"
        )
    if isinstance(domain, BoxDomain):
        spectrum = _box_spectrum(domain)
        lams = [s[0] for s in spectrum]
        pairs = []
        for i in range(count):
            lam, ks = spectrum[i]
            phi = _fix_sign(_box_mode(domain, ks))
            phi = phi / domain.norm_l2(phi)
            pairs.append(EigenPair(float(lam), phi, i + 1, _gaps(lams, i)))
        return pairs
    if isinstance(domain, TorusDomain):
        spectrum = _torus_spectrum(domain)
        lams = [s[0] for s in spectrum]
        pairs = []
        for i in range(count):
            lam, ws = spectrum[i]
            phi = _fix_sign(_torus_mode(domain, ws))
            phi = phi / domain.norm_l2(phi)
            pairs.append(EigenPair(float(lam), phi, i + 1, _gaps(lams, i)))
        return pairs
    if isinstance(domain, BallDomain):
        return _ball_eigenpairs(domain, count)
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def _ball_eigenpairs(domain, count):
    # symmetrize the stencil with the cell volumes: S = D^{1/2} (-L) D^{-1/2}
    d = -domain.laplacian_diag
    vols = domain.cell_volumes
    e = -domain.laplacian_upper * np.sqrt(vols[:-1] / vols[1:])
    try:
        lams, vecs = eigh_tridiagonal(
            d, e, select="i", select_range=(0, count), lapack_driver="stebz"
        )
    except LinAlgError as exc:
        raise EigensolverError(f"radial eigensolve failed: {exc}") from exc
    lams = lams.tolist()
    pairs = []
    sqrt_q = np.sqrt(domain.quad_weights)
    for i in range(count):
        phi = vecs[:, i] / sqrt_q
        phi = _fix_sign(phi)
        phi = phi / domain.norm_l2(phi)
        pairs.append(EigenPair(float(lams[i]), phi, i + 1, _gaps(lams, i)))
    return pairs


def check_simple(domain, pair, rel_gap=SIMPLE_REL_GAP):
    """Certify that pair.lam is simple, or raise DegenerateEigenvalue.

    Simplicity here means no other eigenvalue within relative distance
    `rel_gap`; a degenerate seed invalidates the continuation.
    """
    ratio = pair.gap / pair.lam if pair.lam > 0 else 0.0
    if not (ratio >= rel_gap):
        raise DegenerateEigenvalue(
            f"eigenvalue {pair.lam:.12g} (index {pair.index}) has relative gap "
            f"{ratio:.3g} below the simplicity threshold {rel_gap:.3g}"
        )
    return SimplicityCertificate(pair.lam, pair.gap, float(ratio), float(rel_gap))
