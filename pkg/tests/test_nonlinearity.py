import numpy as np
import pytest

from cglwaves.nonlinearity import (
    alpha_cap,
    nonlinear_term,
    nonlinear_term_derivative,
)


def random_pair(rng, n=256, floor=0.5):
    """Random field bounded away from zero plus a random direction."""
    angle = rng.uniform(0, 2 * np.pi, n)
    radius = floor + rng.uniform(0, 1.5, n)
    v = radius * np.exp(1j * angle)
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v, u


class TestNonlinearTerm:
    def test_half_power_of_constant(self):
        v = np.full(8, 4.0 + 0.0j)
        assert np.allclose(nonlinear_term(0.5, v), 8.0)

    def test_negative_alpha_is_identity(self, rng):
        v = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        out = nonlinear_term(-0.3, v)
        assert np.array_equal(out, v)
        out[0] = 0  # returned copy, not a view
        assert v[0] != 0

    def test_cubic_point(self):
        out = nonlinear_term(1.0, np.array([3.0 + 4.0j]))
        assert out[0] == pytest.approx(15.0 + 20.0j, rel=1e-15)

    def test_zero_maps_to_zero(self):
        v = np.array([0.0 + 0.0j, 1.0 + 0.0j])
        out = nonlinear_term(0.3, v)
        assert out[0] == 0.0
        assert np.isfinite(out).all()

    def test_alpha_above_cap_rejected(self):
        with pytest.raises(ValueError):
            nonlinear_term(2.5, np.ones(4, complex), alpha_max=2.0)
        with pytest.raises(ValueError):
            nonlinear_term_derivative(2.5, np.ones(4, complex), np.ones(4, complex),
                                      alpha_max=2.0)

    def test_cap_values(self):
        assert alpha_cap(1) == np.inf
        assert alpha_cap(2) == np.inf
        assert alpha_cap(3) == 2.0


class TestDerivative:
    def test_zero_node_gives_zero(self):
        v = np.array([0.0 + 0.0j, 2.0 + 0.0j])
        u = np.array([5.0 + 1.0j, 1.0 + 0.0j])
        out = nonlinear_term_derivative(0.7, v, u)
        assert out[0] == 0.0

    def test_unit_base_imaginary_direction(self):
        # at v=1 the Re(conj(v) u) term vanishes for u = i
        out = nonlinear_term_derivative(1.0, np.array([1.0 + 0.0j]),
                                        np.array([1j]))
        assert out[0] == pytest.approx(1j, rel=1e-15)

    def test_cubic_derivative_along_v(self, rng):
        v, _ = random_pair(rng, 64)
        out = nonlinear_term_derivative(2.0, v, v)
        assert np.allclose(out, 3.0 * np.abs(v) ** 2 * v, rtol=1e-13)

    def test_negative_alpha_identity(self, rng):
        v, u = random_pair(rng, 32)
        assert np.array_equal(nonlinear_term_derivative(-1.0, v, u), u)

    def test_real_linearity(self, rng):
        v, u1 = random_pair(rng, 64)
        _, u2 = random_pair(rng, 64)
        a, b = 1.7, -0.4
        lhs = nonlinear_term_derivative(0.6, v, a * u1 + b * u2)
        rhs = (a * nonlinear_term_derivative(0.6, v, u1)
               + b * nonlinear_term_derivative(0.6, v, u2))
        assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-14)
        # not complex-linear: multiplying the direction by i is not the same
        lhs_i = nonlinear_term_derivative(0.6, v, 1j * u1)
        rhs_i = 1j * nonlinear_term_derivative(0.6, v, u1)
        assert np.max(np.abs(lhs_i - rhs_i)) > 1e-3

    def test_pointwise_bound(self, rng):
        for alpha in (0.2, 0.7, 1.5):
            v, u = random_pair(rng, 512, floor=0.0)
            out = nonlinear_term_derivative(alpha, v, u)
            bound = (alpha + 1.0) * np.abs(v) ** alpha * np.abs(u)
            assert np.all(np.abs(out) <= bound * (1 + 1e-12) + 1e-300)


class TestDifferentiability:
    def test_superlinear_remainder_decay(self, rng):
        alpha = 0.4
        for _ in range(5):
            v, u = random_pair(rng)
            r = []
            for h in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
                diff = (nonlinear_term(alpha, v + h * u) - nonlinear_term(alpha, v)
                        - h * nonlinear_term_derivative(alpha, v, u))
                r.append(np.linalg.norm(diff))
            for big, small in zip(r, r[1:]):
                assert small <= 0.3 * big

    def test_continuity_at_alpha_zero(self, rng):
        # H(alpha, v, u) -> u as alpha -> 0+ for v nonvanishing
        v, u = random_pair(rng)
        dist = []
        for alpha in (0.1, 0.05, 0.025):
            out = nonlinear_term_derivative(alpha, v, u)
            dist.append(np.linalg.norm(out - u))
        assert dist[0] > dist[1] > dist[2]
        assert dist[2] < 0.1 * np.linalg.norm(u)
