"""Discrete geometries: spectral box and torus grids and a radial ball grid.

Fields are complex numpy arrays of nodal values in physical space, shaped
(M,) in one dimension and (M, M) in two. Conventions:

* Box (0, l_1) x ... x (0, l_N), homogeneous Dirichlet. Midpoint collocation
  nodes x_j = (j + 1/2) l/M per axis with a sine basis sin(k pi x / l),
  k = 1..M (DST-II). The Laplacian is diagonal with exact eigenvalues
  sum_a (k_a pi / l_a)^2, and the midpoint quadrature h * sum integrates
  constants and products of two basis modes exactly.

* Torus of periods 2 l_1, ..., 2 l_N. Midpoint nodes x_j = (j + 1/2) L/M
  with a Fourier basis e^{2 pi i m x / L}. The midpoint offset matches the
  box convention, so the odd reflection of a box field lands exactly on
  torus nodes.

* Ball of radius l_1 in N = 1, 2 or 3 dimensions, radial reduction.
  Conservative second-order finite differences on cell centers
  r_i = (i + 1/2) h: zero flux through r = 0 (regularity) and a ghost node
  enforcing u = 0 at the boundary face. Quadrature weights are exact cell
  volumes, so the volume is reproduced to round-off and the discrete
  Laplacian is self-adjoint in the weighted inner product.

The real L2 inner product used throughout is (u, v) = Re integral(u * conj(v)).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.fft import dst, idst, fftn, ifftn, fftfreq

from .errors import GridMismatch

_SPHERE_SURFACE = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


def _axis_shape(vec, ax, ndim):
    shape = [1] * ndim
    shape[ax] = -1
    return vec.reshape(shape)


class Domain:
    """Common interface for the discrete geometries."""

    kind = "abstract"

    def __init__(self, dim, lengths, modes):
        self.dim = int(dim)
        self.lengths = tuple(float(l) for l in lengths)
        self.modes = int(modes)

    # -- field bookkeeping -------------------------------------------------

    @property
    def field_shape(self):
        raise NotImplementedError

    @property
    def size(self):
        return int(np.prod(self.field_shape))

    def check_field(self, values):
        values = np.asarray(values)
        if values.shape != self.field_shape:
            raise GridMismatch(
                f"field shape {values.shape} does not match domain shape {self.field_shape}"
            )
        return values

    def zeros(self):
        return np.zeros(self.field_shape, dtype=complex)

    # -- quadrature ---------------------------------------------------------

    def integrate(self, values):
        """Quadrature of a nodal field; complex scalar."""
        values = self.check_field(values)
        return complex(np.sum(self.quad_weights * values))

    def inner(self, u, v):
        """Real inner product Re integral(u * conj(v))."""
        u = self.check_field(u)
        v = self.check_field(v)
        return float(np.sum(self.quad_weights * np.real(u * np.conj(v))))

    def norm_l2(self, values):
        return math.sqrt(max(self.inner(values, values), 0.0))

    def norm_inf(self, values):
        values = self.check_field(values)
        return float(np.max(np.abs(values))) if values.size else 0.0

    # -- operators ----------------------------------------------------------

    def laplacian(self, values):
        raise NotImplementedError

    def grad_norm_sq(self, values):
        raise NotImplementedError

    def laplacian_matrix(self):
        """Dense real matrix of the Laplacian acting on flattened nodal values."""
        raise NotImplementedError

    def descriptor(self):
        """JSON-serializable description, the sidecar schema of field dumps."""
        return {
            "kind": self.kind,
            "N": self.dim,
            "lengths": list(self.lengths),
            "M": self.modes,
        }

    def __repr__(self):
        return (
            f"{type(self).__name__}(dim={self.dim}, lengths={list(self.lengths)}, "
            f"modes={self.modes})"
        )


class _SpectralDomain(Domain):
    """Shared machinery for the transform-based domains (box, torus)."""

    has_modes = True

    def to_modes(self, values):
        raise NotImplementedError

    def from_modes(self, coefs):
        raise NotImplementedError

    def laplacian(self, values):
        values = self.check_field(np.asarray(values, dtype=complex))
        return self.from_modes(-self.laplacian_eigenvalues * self.to_modes(values))

    def grad_norm_sq(self, values):
        """sum_k lambda_k |c_k|^2 with the discrete Parseval weights.

        Equals -(u, laplacian(u)) to round-off by construction.
        """
        values = self.check_field(np.asarray(values, dtype=complex))
        c = self.to_modes(values)
        return float(
            np.sum(self.parseval_weights * self.laplacian_eigenvalues * np.abs(c) ** 2)
        )

    def laplacian_matrix(self):
        if getattr(self, "_lap_matrix", None) is None:
            mats = []
            for ax in range(self.dim):
                mats.append(self._axis_laplacian_matrix(ax))
            if self.dim == 1:
                full = mats[0]
            else:
                eye0 = np.eye(mats[0].shape[0])
                eye1 = np.eye(mats[1].shape[0])
                full = np.kron(mats[0], eye1) + np.kron(eye0, mats[1])
            full.flags.writeable = False
            self._lap_matrix = full
        return self._lap_matrix

    def _axis_laplacian_matrix(self, ax):
        raise NotImplementedError


class BoxDomain(_SpectralDomain):
    kind = "box"

    def __init__(self, dim, lengths, modes):
        super().__init__(dim, lengths, modes)
        m = self.modes
        self._h = [l / m for l in self.lengths]
        self._nodes1d = [(np.arange(m) + 0.5) * h for h in self._h]
        # DST-II: dst(sin(k pi x / l))[k-1] = M for k < M and 2M for k = M
        scale = np.full(m, 1.0 / m)
        scale[-1] = 0.5 / m
        self._scale = scale
        lam1, pw1 = [], []
        for l in self.lengths:
            k = np.arange(1, m + 1)
            lam1.append((k * math.pi / l) ** 2)
            pw = np.full(m, l / 2.0)
            pw[-1] = l
            pw1.append(pw)
        if dim == 1:
            self.laplacian_eigenvalues = lam1[0].copy()
            self.parseval_weights = pw1[0].copy()
        else:
            self.laplacian_eigenvalues = lam1[0][:, None] + lam1[1][None, :]
            self.parseval_weights = pw1[0][:, None] * pw1[1][None, :]
        w = float(np.prod(self._h))
        self.quad_weights = np.full(self.field_shape, w)
        self.volume = float(np.prod(self.lengths))
        for arr in (self.laplacian_eigenvalues, self.parseval_weights, self.quad_weights):
            arr.flags.writeable = False
        self._lap_matrix = None

    @property
    def field_shape(self):
        return (self.modes,) * self.dim

    def nodes(self):
        return tuple(self._nodes1d)

    def grids(self):
        if self.dim == 1:
            return (self._nodes1d[0],)
        return tuple(np.meshgrid(*self._nodes1d, indexing="ij"))

    def to_modes(self, values):
        c = np.asarray(values, dtype=complex)
        for ax in range(self.dim):
            c = dst(c, type=2, axis=ax) * _axis_shape(self._scale, ax, self.dim)
        return c

    def from_modes(self, coefs):
        v = np.asarray(coefs, dtype=complex)
        for ax in range(self.dim):
            v = idst(v / _axis_shape(self._scale, ax, self.dim), type=2, axis=ax)
        return v

    def _axis_laplacian_matrix(self, ax):
        m = self.modes
        lam = (np.arange(1, m + 1) * math.pi / self.lengths[ax]) ** 2
        eye = np.eye(m)
        c = dst(eye, type=2, axis=0) * self._scale[:, None]
        return np.real(idst((-lam[:, None] * c) / self._scale[:, None], type=2, axis=0))


class TorusDomain(_SpectralDomain):
    """Periodic domain with periods 2 l_a; `lengths` stores the half periods."""

    kind = "torus"

    def __init__(self, dim, lengths, modes):
        super().__init__(dim, lengths, modes)
        m = self.modes
        self.periods = tuple(2.0 * l for l in self.lengths)
        self._h = [p / m for p in self.periods]
        self._nodes1d = [(np.arange(m) + 0.5) * h for h in self._h]
        wavenum = np.rint(fftfreq(m) * m).astype(int)
        self.wavenumbers = wavenum
        # midpoint sampling twist: e^{2 pi i m (j + 1/2)/M} = e^{2 pi i m j/M} e^{i pi m/M}
        self._twist = np.exp(1j * math.pi * wavenum / m)
        lam1 = [(2.0 * math.pi * wavenum / p) ** 2 for p in self.periods]
        pw1 = [np.full(m, p) for p in self.periods]
        if dim == 1:
            self.laplacian_eigenvalues = lam1[0].copy()
            self.parseval_weights = pw1[0].copy()
        else:
            self.laplacian_eigenvalues = lam1[0][:, None] + lam1[1][None, :]
            self.parseval_weights = pw1[0][:, None] * pw1[1][None, :]
        w = float(np.prod(self._h))
        self.quad_weights = np.full(self.field_shape, w)
        self.volume = float(np.prod(self.periods))
        for arr in (self.laplacian_eigenvalues, self.parseval_weights, self.quad_weights):
            arr.flags.writeable = False
        self._lap_matrix = None

    @property
    def field_shape(self):
        return (self.modes,) * self.dim

    def nodes(self):
        return tuple(self._nodes1d)

    def grids(self):
        if self.dim == 1:
            return (self._nodes1d[0],)
        return tuple(np.meshgrid(*self._nodes1d, indexing="ij"))

    def to_modes(self, values):
        c = fftn(np.asarray(values, dtype=complex), axes=range(self.dim))
        c /= self.modes ** self.dim
        for ax in range(self.dim):
            c = c * np.conj(_axis_shape(self._twist, ax, self.dim))
        return c

    def from_modes(self, coefs):
        c = np.asarray(coefs, dtype=complex)
        for ax in range(self.dim):
            c = c * _axis_shape(self._twist, ax, self.dim)
        return ifftn(c, axes=range(self.dim)) * self.modes ** self.dim

    def _axis_laplacian_matrix(self, ax):
        m = self.modes
        lam = (2.0 * math.pi * self.wavenumbers / self.periods[ax]) ** 2
        eye = np.eye(m, dtype=complex)
        c = fftn(eye, axes=(0,)) / m * np.conj(self._twist)[:, None]
        out = ifftn((-lam[:, None] * c) * self._twist[:, None], axes=(0,)) * m
        return np.real(out)


class BallDomain(Domain):
    """Radial grid on the ball of radius l_1; fields are functions of r only."""

    kind = "ball"
    has_modes = False

    def __init__(self, dim, lengths, modes):
        super().__init__(dim, lengths, modes)
        m = self.modes
        radius = self.lengths[0]
        h = radius / m
        self._h = h
        faces = np.arange(m + 1) * h
        self._faces = faces
        self._nodes = (np.arange(m) + 0.5) * h
        surf = _SPHERE_SURFACE[self.dim]
        cellvol = (faces[1:] ** self.dim - faces[:-1] ** self.dim) / self.dim
        self.cell_volumes = cellvol
        self.quad_weights = surf * cellvol
        self.volume = surf * radius ** self.dim / self.dim
        # conservative flux stencil; flux through r=0 vanishes (regularity),
        # ghost value -u_{M-1} enforces u = 0 at the boundary face
        face_coef = faces ** (self.dim - 1) / h
        face_coef[0] = 0.0
        face_coef[-1] *= 2.0
        lower = face_coef[:-1] / cellvol  # coefficient of u_{i-1}, entry 0 unused
        upper = face_coef[1:-1] / cellvol[:-1]  # coefficient of u_{i+1}
        self.laplacian_diag = -(face_coef[1:] + face_coef[:-1]) / cellvol
        self.laplacian_lower = lower
        self.laplacian_upper = upper
        self._face_coef = face_coef
        for arr in (self.quad_weights, self.laplacian_diag, self.laplacian_lower,
                    self.laplacian_upper, self.cell_volumes):
            arr.flags.writeable = False
        self._lap_matrix = None

    @property
    def field_shape(self):
        return (self.modes,)

    def nodes(self):
        return (self._nodes,)

    def grids(self):
        return (self._nodes,)

    def laplacian(self, values):
        values = self.check_field(np.asarray(values, dtype=complex))
        out = self.laplacian_diag * values
        out[:-1] += self.laplacian_upper * values[1:]
        out[1:] += self.laplacian_lower[1:] * values[:-1]
        return out

    def grad_norm_sq(self, values):
        """Discrete Dirichlet form; equals -(u, laplacian(u)) exactly."""
        values = self.check_field(np.asarray(values, dtype=complex))
        surf = _SPHERE_SURFACE[self.dim]
        jumps = np.abs(np.diff(values)) ** 2
        interior = np.sum(self._face_coef[1:-1] * jumps)
        boundary = self._face_coef[-1] * abs(values[-1]) ** 2
        return float(surf * (interior + boundary))

    def laplacian_matrix(self):
        if self._lap_matrix is None:
            mat = np.diag(self.laplacian_diag)
            mat += np.diag(self.laplacian_upper, 1)
            mat += np.diag(self.laplacian_lower[1:], -1)
            mat.flags.writeable = False
            self._lap_matrix = mat
        return self._lap_matrix


def make_domain(kind, dim, lengths, modes):
    """Build a discrete domain.

    kind   -- "box", "ball" or "torus"
    dim    -- 1 or 2 for box/torus, 1..3 for ball
    lengths-- side lengths (box), half periods (torus) or [radius] (ball)
    modes  -- nodes (and modes) per axis, at least 8
    """
    dim = int(dim)
    modes = int(modes)
    lengths = [float(l) for l in np.atleast_1d(lengths)]
    if modes < 8:
        raise ValueError(f"modes = {modes} is below the minimum of 8")
    if any(l <= 0 for l in lengths):
        raise ValueError(f"lengths must be positive, got {lengths}")
    if kind in ("box", "torus"):
        if dim not in (1, 2):
            raise ValueError(f"{kind} domains support dim 1 or 2, got {dim}")
        if len(lengths) != dim:
            raise ValueError(f"expected {dim} lengths, got {len(lengths)}")
        cls = BoxDomain if kind == "box" else TorusDomain
        return cls(dim, lengths, modes)
    if kind == "ball":
        if dim not in (1, 2, 3):
            raise ValueError(f"ball domains support dim 1, 2 or 3, got {dim}")
        if len(lengths) != 1:
            raise ValueError(f"ball takes a single radius, got {lengths}")
        return BallDomain(dim, lengths, modes)
    raise ValueError(f"unknown domain kind {kind!r}")


# -- functional front ends ----------------------------------------------------


def laplacian_apply(domain, values):
    """Apply the Laplacian of `domain` to a nodal field."""
    return domain.laplacian(values)


def inner_product(domain, u, v):
    """Real L2 inner product Re integral(u * conj(v)) on `domain`."""
    return domain.inner(u, v)


def gradient_norm_sq(domain, values):
    """integral |grad u|^2, computed so that it equals -(u, Lap u) exactly."""
    return domain.grad_norm_sq(values)


# -- field dumps ----------------------------------------------------------------


def dump_field(path, domain, values, wave=None):
    """Write a nodal field as CSV (columns x[,y],re,im) plus a JSON sidecar.

    The sidecar holds the domain descriptor {kind, N, lengths, M}; optional
    wave metadata (omega, alpha, theta, gamma, ...) goes under a "wave" key.
    """
    path = Path(path)
    values = domain.check_field(np.asarray(values, dtype=complex))
    grids = domain.grids()
    cols = [g.ravel() for g in grids]
    flat = values.ravel()
    header = (["x", "y"][: len(cols)]) + ["re", "im"]
    lines = [",".join(header)]
    for i in range(flat.size):
        coords = [repr(float(c[i])) for c in cols]
        lines.append(",".join(coords + [repr(float(flat[i].real)), repr(float(flat[i].imag))]))
    path.write_text("\n".join(lines) + "\n")
    meta = domain.descriptor()
    if wave is not None:
        meta["wave"] = dict(wave)
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_field(path):
    """Read a field dump; returns (domain, values, wave_metadata_or_None)."""
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    domain = make_domain(meta["kind"], meta["N"], meta["lengths"], meta["M"])
    rows = path.read_text().strip().splitlines()
    data = np.array([[float(x) for x in line.split(",")] for line in rows[1:]])
    values = (data[:, -2] + 1j * data[:, -1]).reshape(domain.field_shape)
    return domain, values, meta.get("wave")
