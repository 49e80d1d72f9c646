import math

import numpy as np
import pytest

from cglwaves.continuation import continue_branch, initial_point
from cglwaves.domain import make_domain
from cglwaves.eigen import eigenpairs
from cglwaves.errors import Blowup, CglError
from cglwaves.evolution import CglIntegrator, step_cgl, verify_standing_wave
from cglwaves.params import Params
from cglwaves.postprocess import scale_to_standing_wave


@pytest.fixture(scope="module")
def box():
    return make_domain("box", 1, [math.pi], 64)


@pytest.fixture(scope="module")
def phi1(box):
    return eigenpairs(box, 1)[0].phi.astype(complex)


def integrate(domain, params, alpha, u0, dt, T, nonlinear_scale=1.0):
    stepper = CglIntegrator(domain, params, alpha, dt, nonlinear_scale)
    coefs = domain.to_modes(u0)
    for s in range(round(T / dt)):
        coefs = stepper.step_modes(coefs, time=s * dt)
    return domain.from_modes(coefs)


class TestLinearClosedForm:
    def test_balanced_angles_constant_solution(self, box, phi1):
        # alpha = 0, theta = gamma = 0, lam = 1: the exact solution
        # e^{(-lam e^{i theta} + e^{i gamma}) t} phi is constant
        params = Params(0.0, 0.0)
        out = integrate(box, params, 0.0, phi1, 1e-3, 1.0)
        assert np.max(np.abs(out - phi1)) <= 1e-8

    def test_general_angles_order_two(self, box, phi1):
        params = Params(0.3, -0.2)
        sigma = -np.exp(1j * 0.3) + np.exp(-1j * 0.2)
        exact = np.exp(sigma * 1.0) * phi1
        errs = []
        for dt in (2e-3, 1e-3):
            out = integrate(box, params, 0.0, phi1, dt, 1.0)
            errs.append(np.max(np.abs(out - exact)))
        assert 3.5 <= errs[0] / errs[1] <= 4.5

    def test_one_step_local_order_three(self, box, phi1):
        params = Params(0.3, -0.2)
        sigma = -np.exp(1j * 0.3) + np.exp(-1j * 0.2)
        errs = []
        for dt in (2e-3, 1e-3):
            out = step_cgl(box, phi1, dt, params, 0.0)
            errs.append(np.max(np.abs(out - np.exp(sigma * dt) * phi1)))
        assert 7.0 <= errs[0] / errs[1] <= 9.0

    def test_real_data_stays_real(self, box, phi1):
        params = Params(0.0, 0.0)
        out = integrate(box, params, 0.0, phi1, 1e-3, 0.1)
        assert np.max(np.abs(out.imag)) <= 1e-12

    def test_seed_pair_rotates_with_constant_modulus(self, box, phi1):
        # absorbing mu0 into the nonlinear coefficient makes e^{i omega0 t} phi
        # an exact orbit; the modulus must stay constant
        params = Params(0.3, -0.2)
        mu0, omega0 = initial_point(params, 1.0)
        out = integrate(box, params, 0.0, phi1, 5e-4, 1.0, nonlinear_scale=mu0)
        assert np.max(np.abs(np.abs(out) - np.abs(phi1))) <= 1e-8
        assert np.max(np.abs(out - np.exp(1j * omega0) * phi1)) <= 1e-7


class TestStepper:
    def test_rejects_ball_domain(self):
        ball = make_domain("ball", 2, [1.0], 64)
        with pytest.raises(CglError):
            CglIntegrator(ball, Params(0.0, 0.0), 0.2, 1e-3)

    def test_blowup_detected_with_time(self, box, phi1):
        # alpha = 0 with a large nonlinear gain grows like e^{4t}; a tight
        # threshold must trip and report when
        params = Params(0.0, 0.0)
        stepper = CglIntegrator(box, params, 0.0, 1e-2, nonlinear_scale=5.0,
                                blowup_threshold=4.0 * np.max(np.abs(phi1)))
        coefs = box.to_modes(phi1)
        with pytest.raises(Blowup) as info:
            for s in range(200):
                coefs = stepper.step_modes(coefs, time=s * 1e-2)
        assert info.value.time is not None
        assert 0.2 <= info.value.time <= 0.6

    def test_step_matches_class(self, box, phi1):
        params = Params(0.3, -0.2)
        a = step_cgl(box, phi1, 1e-3, params, 0.2)
        b = CglIntegrator(box, params, 0.2, 1e-3).step(phi1)
        assert np.array_equal(a, b)


@pytest.fixture(scope="module")
def wave(box):
    params = Params(0.3, -0.2)
    pair = eigenpairs(box, 1)[0]
    table = continue_branch(box, params, pair, [0.0, 0.05, 0.1, 0.15, 0.2])
    return scale_to_standing_wave(table.point_at(0.2), box, params)


class TestVerifyStandingWave:
    def test_orbit_error_small(self, wave):
        report = verify_standing_wave(wave, T=1.0, dt=1e-3, checkpoints=10)
        assert report.orbit_err <= 1e-5
        assert len(report.checkpoint_times) == 10
        assert report.checkpoint_times[-1] == pytest.approx(1.0)
        assert all(math.isfinite(e) for e in report.orbit_errors)

    def test_modulus_drift_below_orbit_error(self, wave):
        report = verify_standing_wave(wave, T=1.0, dt=1e-3, checkpoints=10)
        assert report.modulus_drift <= report.orbit_err + 1e-12

    def test_wrong_frequency_is_caught(self, wave):
        report = verify_standing_wave(wave, T=1.0, dt=1e-3, checkpoints=10,
                                      omega=wave.omega + 0.1)
        assert report.orbit_err >= 1e-2

    def test_zero_field_rejected(self, box):
        from cglwaves.postprocess import StandingWave
        wave = StandingWave(np.zeros(64, complex), 0.0, 0.2, Params(0.3, -0.2),
                            box, 0.0, 0.0)
        with pytest.raises(CglError):
            verify_standing_wave(wave)
