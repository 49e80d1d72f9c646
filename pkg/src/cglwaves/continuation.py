"""Branch continuation in the exponent alpha from the linear eigenvalue seed.

The unknown is the triple (mu, omega, vperp) with v = phi + vperp, vperp
orthogonal to phi and i*phi in the real L2 product, solving

    F(alpha, mu, omega, vperp)
        = Lap v + mu e^{i(gamma-theta)} |v|^alpha v - i omega e^{-i theta} v = 0.

At alpha = 0 the seed (mu0, omega0, 0) is exact: mu0 and omega0 are the
unique real pair with mu0 e^{i(gamma-theta)} - i omega0 e^{-i theta} = lam,
so F reduces to Lap phi + lam phi = 0.

The derivative of F is real-linear only (the direction term carries
Re(conj(v) w)), so all linear algebra runs over stacked real and imaginary
parts: dimension 2n for n nodes, plus the two parameter columns (a, b) for
(mu, omega) and two constraint rows <w, phi> = <w, i phi> = 0. The square
(2n+2) bordered system is solved by dense LU; a matrix-free LGMRES mode is
available behind the same interface for spectral domains.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Domain
from .errors import NoConvergence, SingularBordered
from .nonlinearity import alpha_cap, check_alpha, nonlinear_term, nonlinear_term_derivative
from .params import Params
from .postprocess import identity_errors

logger = logging.getLogger("cglwaves.continuation")

DEFAULT_NEWTON_TOL = 1e-10
DEFAULT_MAX_NEWTON = 25
DEFAULT_MIN_STEP = 1e-5
EASY_ITERS = 4        # a correction this cheap counts toward step doubling
EASY_STREAK = 3


def initial_point(params, lam):
    """Seed multiplier and frequency for eigenvalue lam: the unique real pair
    with mu0 e^{i(gamma-theta)} - i omega0 e^{-i theta} = lam."""
    if lam <= 0:
        raise ValueError(f"lam = {lam} must be positive")
    mu0 = lam * math.cos(params.theta) / math.cos(params.gamma)
    omega0 = lam * math.sin(params.gamma - params.theta) / math.cos(params.gamma)
    return mu0, omega0


@dataclass(frozen=True)
class BranchPoint:
    alpha: float
    mu: float
    omega: float
    v: np.ndarray
    residual_inf: float
    newton_iters: int
    l2_norm_v: float
    identity_real_err: float
    identity_imag_err: float
    # orthogonality of v - phi against {phi, i phi}: plain L2 and the
    # H-product variant (L2 plus Laplacian pairing); with an exact discrete
    # eigenfunction the two are proportional by 1 + lam^2
    constraint_l2: tuple
    constraint_h: tuple


@dataclass
class BranchTable:
    params: Params
    domain: Domain
    eigen_index: int
    lam: float
    mu0: float
    omega0: float
    points: list = field(default_factory=list)
    stop_reason: str = "completed"
    newton_tol: float = DEFAULT_NEWTON_TOL

    def alphas(self):
        return np.array([p.alpha for p in self.points])

    def point_at(self, alpha, atol=1e-12):
        for p in self.points:
            if abs(p.alpha - alpha) <= atol:
                return p
        raise KeyError(f"no accepted point at alpha = {alpha}")

    @property
    def alpha_reached(self):
        return self.points[-1].alpha if self.points else None


class ContinuationProblem:
    """Residual, Jacobian action and bordered Newton corrector for one branch
    (fixed domain, angles and eigenpair)."""

    def __init__(self, domain, params, eigenpair, alpha_max=None, solver="dense"):
        self.domain = domain
        self.params = params
        self.lam = float(eigenpair.lam)
        self.phi = np.asarray(eigenpair.phi, dtype=complex)
        cap = alpha_cap(domain.dim)
        self.alpha_max = float(alpha_max) if alpha_max is not None else min(2.0, cap)
        if self.alpha_max > cap:
            raise ValueError(
                f"alpha_max = {self.alpha_max} violates (N-2)*alpha <= 2 for N = {domain.dim}"
            )
        if solver not in ("dense", "iterative"):
            raise ValueError(f"unknown solver {solver!r}")
        if solver == "iterative" and not getattr(domain, "has_modes", False):
            raise ValueError("the iterative solver needs a spectral domain (box/torus)")
        self.solver = solver
        norm = domain.norm_l2(self.phi)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"eigenvector is not normalized (L2 norm {norm})")
        self._q = domain.quad_weights.ravel()
        self._phi_flat = self.phi.ravel()
        self._lap = domain.laplacian_matrix() if solver == "dense" else None

    # -- projections ---------------------------------------------------------

    def orthogonalize(self, v):
        """Project v - phi onto the orthogonal complement of {phi, i phi}."""
        vperp = v - self.phi
        c1 = self.domain.inner(vperp, self.phi)
        c2 = self.domain.inner(vperp, 1j * self.phi)
        return self.phi + vperp - c1 * self.phi - c2 * (1j * self.phi)

    def constraint_values(self, v):
        vperp = v - self.phi
        return (
            self.domain.inner(vperp, self.phi),
            self.domain.inner(vperp, 1j * self.phi),
        )

    def constraint_values_h(self, v):
        """Constraint residuals in the H product (u, w) + (Lap u, Lap w)."""
        vperp = v - self.phi
        lap_vp = self.domain.laplacian(vperp)
        lap_phi = self.domain.laplacian(self.phi)
        return (
            self.domain.inner(vperp, self.phi) + self.domain.inner(lap_vp, lap_phi),
            self.domain.inner(vperp, 1j * self.phi)
            + self.domain.inner(lap_vp, 1j * lap_phi),
        )

    # -- residual and Jacobian -------------------------------------------------

    def residual(self, alpha, mu, omega, v):
        """F = Lap v + mu e^{i(gamma-theta)} |v|^alpha v - i omega e^{-i theta} v."""
        check_alpha(alpha, self.alpha_max)
        p = self.params
        return (
            self.domain.laplacian(v)
            + mu * p.phase_delta * nonlinear_term(alpha, v, self.alpha_max)
            - 1j * omega * np.exp(-1j * p.theta) * v
        )

    def jacobian_apply(self, alpha, mu, omega, v, a, b, w):
        """Action of the derivative of F on (a, b, w):

        a * e^{i(gamma-theta)} |v|^alpha v  +  b * (-i e^{-i theta} v)
          + Lap w + mu e^{i(gamma-theta)} D|v|^alpha v [w] - i omega e^{-i theta} w.
        """
        check_alpha(alpha, self.alpha_max)
        p = self.params
        emt = np.exp(-1j * p.theta)
        out = (
            self.domain.laplacian(w)
            + mu * p.phase_delta * nonlinear_term_derivative(alpha, v, w, self.alpha_max)
            - 1j * omega * emt * w
        )
        if a != 0.0:
            out = out + a * p.phase_delta * nonlinear_term(alpha, v, self.alpha_max)
        if b != 0.0:
            out = out + b * (-1j * emt * v)
        return out

    # -- bordered linear algebra ------------------------------------------------

    def bordered_matrix(self, alpha, mu, omega, v):
        """Dense real (2n+2) bordered matrix at the given state.

        Unknown layout [Re w, Im w, a, b]; the last two rows are the
        constraints <w, phi> = 0 and <w, i phi> = 0 in the quadrature product.
        """
        n = self.domain.size
        p = self.params
        v_flat = np.asarray(v, dtype=complex).ravel()
        vr, vi = v_flat.real, v_flat.imag
        mat = np.zeros((2 * n + 2, 2 * n + 2))
        lap = self._lap if self._lap is not None else self.domain.laplacian_matrix()
        mat[:n, :n] = lap
        mat[n:2 * n, n:2 * n] = lap

        # nodewise derivative of the power term, a symmetric 2x2 block per node
        if alpha > 0:
            m = np.abs(v_flat)
            safe = m > 1e-300
            minv = np.where(safe, m, 1.0)
            ma = np.where(safe, m**alpha, 0.0)
            t = alpha * ma / (minv * minv)
            h_rr = ma + t * vr * vr
            h_ri = t * vr * vi
            h_ii = ma + t * vi * vi
        else:
            h_rr = np.ones(n)
            h_ri = np.zeros(n)
            h_ii = np.ones(n)
        s = mu * p.phase_delta              # rotation-scaling multiplier
        r = -1j * omega * np.exp(-1j * p.theta)
        b_rr = s.real * h_rr - s.imag * h_ri + r.real
        b_ri = s.real * h_ri - s.imag * h_ii - r.imag
        b_ir = s.imag * h_rr + s.real * h_ri + r.imag
        b_ii = s.imag * h_ri + s.real * h_ii + r.real
        idx = np.arange(n)
        mat[idx, idx] += b_rr
        mat[idx, n + idx] += b_ri
        mat[n + idx, idx] += b_ir
        mat[n + idx, n + idx] += b_ii

        col_a = (self.params.phase_delta
                 * nonlinear_term(alpha, v, self.alpha_max)).ravel()
        col_b = (-1j * np.exp(-1j * p.theta) * v_flat)
        mat[:n, 2 * n] = col_a.real
        mat[n:2 * n, 2 * n] = col_a.imag
        mat[:n, 2 * n + 1] = col_b.real
        mat[n:2 * n, 2 * n + 1] = col_b.imag

        q = self._q
        pr, pi = self._phi_flat.real, self._phi_flat.imag
        mat[2 * n, :n] = q * pr
        mat[2 * n, n:2 * n] = q * pi
        mat[2 * n + 1, :n] = -q * pi
        mat[2 * n + 1, n:2 * n] = q * pr
        return mat

    def solve_bordered(self, alpha, mu, omega, v, rhs_field, rhs_c=(0.0, 0.0)):
        """Solve the bordered system for (a, b, w) with field right-hand side
        rhs_field and constraint right-hand sides rhs_c."""
        n = self.domain.size
        rhs = np.empty(2 * n + 2)
        flat = np.asarray(rhs_field, dtype=complex).ravel()
        rhs[:n] = flat.real
        rhs[n:2 * n] = flat.imag
        rhs[2 * n] = rhs_c[0]
        rhs[2 * n + 1] = rhs_c[1]
        if self.solver == "dense":
            mat = self.bordered_matrix(alpha, mu, omega, v)
            try:
                sol = np.linalg.solve(mat, rhs)
            except np.linalg.LinAlgError as exc:
                raise SingularBordered(f"bordered solve failed: {exc}") from exc
        else:
            sol = self._solve_iterative(alpha, mu, omega, v, rhs)
        if not np.all(np.isfinite(sol)):
            raise SingularBordered("bordered solve produced non-finite values")
        w = (sol[:n] + 1j * sol[n:2 * n]).reshape(self.domain.field_shape)
        return sol[2 * n], sol[2 * n + 1], w

    def _solve_iterative(self, alpha, mu, omega, v, rhs):
        from scipy.sparse.linalg import LinearOperator, lgmres

        n = self.domain.size
        shape = self.domain.field_shape
        dom = self.domain

        def matvec(z):
            w = (z[:n] + 1j * z[n:2 * n]).reshape(shape)
            jw = self.jacobian_apply(alpha, mu, omega, v, z[2 * n], z[2 * n + 1], w)
            flat = jw.ravel()
            c1 = float(np.sum(self._q * np.real(w.ravel() * np.conj(self._phi_flat))))
            c2 = float(np.sum(self._q * np.imag(w.ravel() * np.conj(self._phi_flat))))
            return np.concatenate([flat.real, flat.imag, [c1, c2]])

        shift = 1.0 + abs(omega) + abs(mu) + self.lam
        lam_grid = dom.laplacian_eigenvalues

        def precond(z):
            w = (z[:n] + 1j * z[n:2 * n]).reshape(shape)
            w = dom.from_modes(dom.to_modes(w) / -(lam_grid + shift))
            flat = w.ravel()
            return np.concatenate([flat.real, flat.imag, z[2 * n:]])

        op = LinearOperator((2 * n + 2, 2 * n + 2), matvec=matvec)
        pre = LinearOperator((2 * n + 2, 2 * n + 2), matvec=precond)
        sol, info = lgmres(op, rhs, M=pre, rtol=1e-12, atol=1e-14, maxiter=400)
        if info != 0:
            raise SingularBordered(f"LGMRES did not converge (info = {info})")
        return sol

    # -- Newton corrector ----------------------------------------------------------

    def newton_correct(self, alpha, mu, omega, v, tol=DEFAULT_NEWTON_TOL,
                       max_iters=DEFAULT_MAX_NEWTON):
        """Correct an approximate state at fixed alpha to residual_inf <= tol.

        Re-orthogonalizes v - phi after every update so the two constraints
        hold to round-off; raises NoConvergence or SingularBordered.
        """
        v = self.orthogonalize(np.asarray(v, dtype=complex))
        iters = 0
        while True:
            res = self.residual(alpha, mu, omega, v)
            rinf = self.domain.norm_inf(res)
            if not math.isfinite(rinf):
                raise NoConvergence(
                    f"residual became non-finite at alpha = {alpha}",
                    iterations=iters, residual=rinf,
                )
            if rinf <= tol:
                if mu <= 0.0:
                    raise NoConvergence(
                        f"converged to non-positive mu = {mu} at alpha = {alpha}",
                        iterations=iters, residual=rinf,
                    )
                return self._accept(alpha, mu, omega, v, rinf, iters)
            if iters >= max_iters:
                raise NoConvergence(
                    f"Newton stalled at residual {rinf:.3g} after {iters} iterations "
                    f"(alpha = {alpha}, tol = {tol:.3g})",
                    iterations=iters, residual=rinf,
                )
            a, b, w = self.solve_bordered(alpha, mu, omega, v, -res)
            mu += a
            omega += b
            v = self.orthogonalize(v + w)
            iters += 1
            logger.debug(
                "newton alpha=%.6g iter=%d |F|=%.3e dmu=%.2e domega=%.2e",
                alpha, iters, rinf, a, b,
            )

    def _accept(self, alpha, mu, omega, v, rinf, iters):
        c_l2 = self.constraint_values(v)
        c_h = self.constraint_values_h(v)
        real_err, imag_err, _, _, mass = identity_errors(
            self.domain, self.params, alpha, mu, omega, v
        )
        return BranchPoint(
            alpha=float(alpha), mu=float(mu), omega=float(omega), v=v,
            residual_inf=float(rinf), newton_iters=iters,
            l2_norm_v=math.sqrt(max(mass, 0.0)),
            identity_real_err=float(real_err), identity_imag_err=float(imag_err),
            constraint_l2=(float(c_l2[0]), float(c_l2[1])),
            constraint_h=(float(c_h[0]), float(c_h[1])),
        )

    def seed_point(self, tol=DEFAULT_NEWTON_TOL, max_iters=DEFAULT_MAX_NEWTON):
        mu0, omega0 = initial_point(self.params, self.lam)
        return self.newton_correct(0.0, mu0, omega0, self.phi.copy(),
                                   tol=tol, max_iters=max_iters)


def _validate_grid(alpha_grid, cap):
    grid = [float(a) for a in alpha_grid]
    if not grid or grid[0] != 0.0:
        raise ValueError("alpha_grid must start at 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha_grid must be strictly increasing")
    if grid[-1] > cap:
        raise ValueError(f"alpha_grid exceeds the admissible cap {cap}")
    return grid


def continue_branch(domain, params, eigenpair, alpha_grid, *,
                    newton_tol=DEFAULT_NEWTON_TOL, max_newton=DEFAULT_MAX_NEWTON,
                    min_step=DEFAULT_MIN_STEP, solver="dense", alpha_max=None,
                    eigen_index=None):
    """Track the branch seeded at `eigenpair` over the given alpha grid.

    Predictor: the previous point, upgraded to a secant extrapolation once two
    points exist. Step control: between grid targets the step halves on a
    failed correction and doubles after three easy successes, capped by the
    grid spacing; the run stops early (with the reason recorded) once the step
    falls below `min_step`. Every accepted point satisfies the constraints and
    the residual tolerance; intermediate points are kept in the table.
    """
    problem = ContinuationProblem(domain, params, eigenpair,
                                  alpha_max=alpha_max, solver=solver)
    grid = _validate_grid(alpha_grid, problem.alpha_max)
    mu0, omega0 = initial_point(params, problem.lam)
    table = BranchTable(
        params=params, domain=domain,
        eigen_index=eigen_index if eigen_index is not None else eigenpair.index,
        lam=problem.lam, mu0=mu0, omega0=omega0, newton_tol=newton_tol,
    )
    current = problem.seed_point(tol=newton_tol, max_iters=max_newton)
    table.points.append(current)
    if len(grid) == 1:
        return table

    max_step = max(b - a for a, b in zip(grid, grid[1:]))
    step = grid[1] - grid[0]
    previous = None
    streak = 0
    for target in grid[1:]:
        while current.alpha < target - 1e-14:
            da = min(step, target - current.alpha)
            alpha_try = current.alpha + da
            if target - alpha_try < 1e-12:
                alpha_try = target
            mu_p, omega_p, v_p = current.mu, current.omega, current.v
            if previous is not None and current.alpha > previous.alpha:
                # secant predictor
                slope = (alpha_try - current.alpha) / (current.alpha - previous.alpha)
                mu_p = current.mu + slope * (current.mu - previous.mu)
                omega_p = current.omega + slope * (current.omega - previous.omega)
                v_p = current.v + slope * (current.v - previous.v)
            try:
                accepted = problem.newton_correct(
                    alpha_try, mu_p, omega_p, v_p, tol=newton_tol, max_iters=max_newton
                )
            except (NoConvergence, SingularBordered) as exc:
                step /= 2.0
                streak = 0
                logger.info("halving step to %.3g after failure at alpha=%.6g: %s",
                            step, alpha_try, exc)
                if step < min_step:
                    table.stop_reason = (
                        f"newton failed at alpha = {alpha_try:.6g} with step below "
                        f"{min_step:g}: {exc}"
                    )
                    return table
                continue
            previous, current = current, accepted
            table.points.append(current)
            streak = streak + 1 if current.newton_iters <= EASY_ITERS else 0
            if streak >= EASY_STREAK:
                step = min(step * 2.0, max_step)
                streak = 0
    return table
