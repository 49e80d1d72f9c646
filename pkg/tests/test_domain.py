import math

import numpy as np
import pytest

from cglwaves.domain import (
    dump_field,
    gradient_norm_sq,
    inner_product,
    laplacian_apply,
    load_field,
    make_domain,
)
from cglwaves.errors import GridMismatch

from conftest import bessel_j0, bessel_j0_first_root


class TestMakeDomain:
    def test_box_eigenvalues_on_unit_pi(self):
        d = make_domain("box", 1, [math.pi], 128)
        lam = np.sort(np.asarray(d.laplacian_eigenvalues))
        assert np.allclose(lam[:4], [1.0, 4.0, 9.0, 16.0], rtol=1e-14)

    def test_box_2d_eigenvalues_begin_2_5_5_8(self):
        d = make_domain("box", 2, [math.pi, math.pi], 32)
        lam = np.sort(np.asarray(d.laplacian_eigenvalues).ravel())
        assert np.allclose(lam[:4], [2.0, 5.0, 5.0, 8.0], rtol=1e-14)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            make_domain("box", 3, [1, 1, 1], 16)
        with pytest.raises(ValueError):
            make_domain("torus", 3, [1, 1, 1], 16)
        with pytest.raises(ValueError):
            make_domain("box", 1, [-1.0], 16)
        with pytest.raises(ValueError):
            make_domain("box", 1, [1.0], 7)
        with pytest.raises(ValueError):
            make_domain("ball", 4, [1.0], 64)
        with pytest.raises(ValueError):
            make_domain("mobius", 1, [1.0], 16)

    @pytest.mark.parametrize("kind,dim,lengths,modes,vol", [
        ("box", 1, [math.pi], 64, math.pi),
        ("box", 2, [math.pi, 2.0], 16, 2 * math.pi),
        ("torus", 1, [math.pi], 64, 2 * math.pi),
        ("torus", 2, [1.0, 1.5], 16, 4 * 1.5),
        ("ball", 1, [1.0], 100, 2.0),
        ("ball", 2, [1.0], 100, math.pi),
        ("ball", 3, [1.0], 100, 4 * math.pi / 3),
    ])
    def test_quadrature_reproduces_volume(self, kind, dim, lengths, modes, vol):
        d = make_domain(kind, dim, lengths, modes)
        ones = np.ones(d.field_shape, dtype=complex)
        got = d.integrate(ones).real
        tol = 1e-8 if kind == "ball" else 1e-12
        assert abs(got - vol) <= tol * vol
        assert abs(d.volume - vol) <= 1e-12 * vol


class TestLaplacian:
    def test_box_sine_eigenfunction(self):
        d = make_domain("box", 1, [math.pi], 128)
        f = np.sin(d.nodes()[0]).astype(complex)
        assert np.max(np.abs(laplacian_apply(d, f) + f)) < 1e-10

    def test_torus_fourier_mode(self):
        d = make_domain("torus", 1, [math.pi], 64)
        f = np.exp(1j * d.nodes()[0])
        assert np.max(np.abs(laplacian_apply(d, f) + f)) < 1e-12

    def test_ball_bessel_mode(self):
        # j01 from the series oracle; the boundary cell is excluded because
        # its conservative ghost flux is only first order there
        root = bessel_j0_first_root()
        assert abs(root - 2.404826) < 1e-6
        d = make_domain("ball", 2, [1.0], 2000)
        f = bessel_j0(root * d.nodes()[0]).astype(complex)
        res = laplacian_apply(d, f) + root**2 * f
        rel = np.linalg.norm(res[:-1]) / np.linalg.norm(root**2 * f)
        assert rel <= 1e-3

    def test_dimension_mismatch(self):
        d = make_domain("box", 1, [math.pi], 64)
        with pytest.raises(GridMismatch):
            laplacian_apply(d, np.zeros(32, dtype=complex))

    @pytest.mark.parametrize("kind,modes", [("box", 64), ("torus", 64)])
    def test_dense_matrix_matches_transform(self, kind, modes, rng):
        d = make_domain(kind, 1, [math.pi], modes)
        mat = d.laplacian_matrix()
        f = rng.standard_normal(modes) + 1j * rng.standard_normal(modes)
        direct = mat @ f.real + 1j * (mat @ f.imag)
        assert np.max(np.abs(direct - laplacian_apply(d, f))) < 1e-9


class TestInnerProduct:
    def test_normalized_mode(self):
        d = make_domain("box", 1, [math.pi], 64)
        phi = math.sqrt(2 / math.pi) * np.sin(d.nodes()[0])
        assert abs(inner_product(d, phi, phi) - 1.0) < 1e-12

    def test_real_product_kills_i_phi(self):
        d = make_domain("box", 1, [math.pi], 64)
        phi = math.sqrt(2 / math.pi) * np.sin(d.nodes()[0]).astype(complex)
        assert abs(inner_product(d, phi, 1j * phi)) < 1e-12

    def test_mode_orthogonality(self):
        d = make_domain("box", 1, [math.pi], 64)
        x = d.nodes()[0]
        assert abs(inner_product(d, np.sin(x), np.sin(2 * x))) < 1e-12

    def test_symmetric_bilinear(self, rng):
        d = make_domain("box", 1, [math.pi], 32)
        u = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        v = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert inner_product(d, u, v) == pytest.approx(inner_product(d, v, u), abs=1e-14)
        assert inner_product(d, u, u) >= 0
        assert inner_product(d, 2.0 * u + v, v) == pytest.approx(
            2.0 * inner_product(d, u, v) + inner_product(d, v, v), rel=1e-12
        )


class TestGradNorm:
    def test_sine_on_pi(self):
        d = make_domain("box", 1, [math.pi], 64)
        f = np.sin(d.nodes()[0]).astype(complex)
        assert gradient_norm_sq(d, f) == pytest.approx(math.pi / 2, rel=1e-12)

    def test_eigenfunction_gives_lambda(self):
        d = make_domain("box", 1, [math.pi], 64)
        phi = math.sqrt(2 / math.pi) * np.sin(3 * d.nodes()[0])
        assert gradient_norm_sq(d, phi) == pytest.approx(9.0, rel=1e-12)

    def test_zero_field(self):
        d = make_domain("box", 1, [math.pi], 64)
        assert gradient_norm_sq(d, np.zeros(64, complex)) == 0.0

    @pytest.mark.parametrize("kind", ["box", "torus", "ball"])
    def test_integration_by_parts(self, kind, rng):
        d = make_domain(kind, 1 if kind != "ball" else 2,
                        [math.pi] if kind != "ball" else [1.0], 64)
        for _ in range(20):
            u = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            lhs = inner_product(d, u, laplacian_apply(d, u))
            rhs = -gradient_norm_sq(d, u)
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestTransforms:
    @pytest.mark.parametrize("kind", ["box", "torus"])
    def test_roundtrip_100_random_fields(self, kind, rng):
        d = make_domain(kind, 1, [math.pi], 64)
        for _ in range(100):
            f = rng.standard_normal(64) + 1j * rng.standard_normal(64)
            back = d.from_modes(d.to_modes(f))
            assert np.max(np.abs(back - f)) <= 1e-12 * max(1.0, np.max(np.abs(f)))

    def test_roundtrip_2d(self, rng):
        for kind in ("box", "torus"):
            d = make_domain(kind, 2, [math.pi, 1.0], 16)
            f = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
            assert np.max(np.abs(d.from_modes(d.to_modes(f)) - f)) < 1e-12

    def test_parseval_matches_quadrature(self, rng):
        for kind in ("box", "torus"):
            d = make_domain(kind, 1, [math.pi], 32)
            f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
            g = rng.standard_normal(32) + 1j * rng.standard_normal(32)
            phys = complex(np.sum(d.quad_weights * f * np.conj(g)))
            cf, cg = d.to_modes(f), d.to_modes(g)
            spec = complex(np.sum(d.parseval_weights * cf * np.conj(cg)))
            assert abs(phys - spec) < 1e-12 * max(1.0, abs(phys))


class TestQuadrature:
    def test_sin_fourth_power(self):
        d = make_domain("box", 1, [math.pi], 64)
        f = np.sin(d.nodes()[0]) ** 4
        assert d.integrate(f.astype(complex)).real == pytest.approx(
            3 * math.pi / 8, abs=1e-10
        )


class TestFieldDump:
    def test_roundtrip_1d(self, tmp_path, rng):
        d = make_domain("box", 1, [math.pi], 32)
        f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        path = tmp_path / "field.csv"
        dump_field(path, d, f, wave={"omega": -0.5, "alpha": 0.2,
                                     "theta": 0.3, "gamma": -0.2})
        d2, f2, wave = load_field(path)
        assert d2.descriptor() == d.descriptor()
        assert np.max(np.abs(f2 - f)) == 0.0
        assert wave["omega"] == -0.5

    def test_roundtrip_2d(self, tmp_path, rng):
        d = make_domain("box", 2, [math.pi, 1.0], 8)
        f = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        path = tmp_path / "field2.csv"
        dump_field(path, d, f)
        d2, f2, wave = load_field(path)
        assert wave is None
        assert np.max(np.abs(f2 - f)) == 0.0
        header = path.read_text().splitlines()[0]
        assert header == "x,y,re,im"
