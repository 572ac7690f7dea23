import math

import numpy as np
import pytest
from scipy import integrate

from tfmotion.errors import PoleError
from tfmotion.gaussian import (SampleGrid, SpectralTable,
                               build_cov_matrix, covariance_tfbm2,
                               matern_cov_integral, simulate_gaussian_paths,
                               tfgn1_spectral_density, tfgn2_spectral_density,
                               tfgn2_acvf, variance_fbm_limit, variance_tfbm2)
import oracles

TWO_PI = 2.0 * math.pi


class TestVariance:
    def test_brownian_case(self):
        for lam in (0.05, 1.0):
            for t in (0.3, 1.0, 7.0):
                assert variance_tfbm2(0.5, lam, t) == t

    def test_zero_time(self):
        assert variance_tfbm2(0.7, 0.15, 0.0) == 0.0

    def test_spectral_oracle_frozen(self):
        assert variance_tfbm2(0.7, 0.15, 1.0) == pytest.approx(
            0.9103973944185911, rel=1e-8)

    def test_spectral_oracle_live(self):
        for H in (0.3, 0.7, 1.2):
            for lam in (0.15, 1.0):
                for t in (0.5, 5.0):
                    ref = oracles.spectral_variance(H, lam, t)
                    assert variance_tfbm2(H, lam, t) == pytest.approx(
                        ref, rel=1e-8), (H, lam, t)

    def test_negative_time_symmetry(self):
        assert variance_tfbm2(0.7, 0.15, -2.0) == variance_tfbm2(0.7, 0.15, 2.0)

    def test_integer_H_pole(self):
        with pytest.raises(PoleError):
            variance_tfbm2(1.0, 0.5, 1.0)

    def test_scaling_law(self):
        for b in (0.5, 2.0, 10.0):
            for (H, lam, t) in [(0.3, 0.15, 1.0), (0.7, 1.0, 0.5), (1.2, 0.5, 2.0)]:
                lhs = variance_tfbm2(H, lam, b * t)
                rhs = b ** (2.0 * H) * variance_tfbm2(H, b * lam, t)
                assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_lambda_to_zero_monotone_approach(self):
        for H in (0.3, 0.7):
            lim = variance_fbm_limit(H, 1.0)
            gaps = [abs(variance_tfbm2(H, lam, 1.0) - lim) / lim
                    for lam in (1e-2, 1e-3, 1e-4)]
            assert gaps[0] > gaps[1] > gaps[2]
            assert gaps[2] < 0.01


class TestFbmLimit:
    def test_brownian(self):
        assert variance_fbm_limit(0.5, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_zero_time(self):
        assert variance_fbm_limit(0.7, 0.0) == 0.0

    def test_time_domain_oracle(self):
        assert variance_fbm_limit(0.7, 2.0) == pytest.approx(
            2.6260533344828447, rel=1e-9)
        assert variance_fbm_limit(0.3, 1.0) == pytest.approx(
            oracles.fbm_variance_timedomain(0.3, 1.0), rel=1e-9)

    def test_domain(self):
        with pytest.raises(ValueError):
            variance_fbm_limit(1.2, 1.0)


class TestCovariance:
    def test_diagonal(self):
        assert covariance_tfbm2(0.7, 0.15, 2.0, 2.0) == pytest.approx(
            variance_tfbm2(0.7, 0.15, 2.0), rel=1e-14)

    def test_zero_time(self):
        assert covariance_tfbm2(0.7, 0.15, 0.0, 2.0) == 0.0

    def test_symmetry(self):
        assert covariance_tfbm2(0.75, 0.5, 1.0, 2.0) == covariance_tfbm2(
            0.75, 0.5, 2.0, 1.0)


class TestMatern:
    def test_zero_range(self):
        assert matern_cov_integral(0.75, 0.5, 0.0, 2.0) == 0.0
        assert matern_cov_integral(0.75, 0.5, 1.0, 0.0) == 0.0

    def test_symmetry(self):
        a = matern_cov_integral(0.75, 0.5, 1.0, 2.0)
        b = matern_cov_integral(0.75, 0.5, 2.0, 1.0)
        assert a == pytest.approx(b, rel=1e-12)

    @pytest.mark.parametrize("H", [0.75, 1.25])
    @pytest.mark.parametrize("lam", [0.5, 1.0])
    @pytest.mark.parametrize("st", [(1.0, 1.0), (1.0, 2.0)])
    def test_matches_closed_form(self, H, lam, st):
        s, t = st
        m = matern_cov_integral(H, lam, s, t)
        c = covariance_tfbm2(H, lam, s, t)
        assert m == pytest.approx(c, rel=1e-6)

    def test_domain(self):
        with pytest.raises(ValueError):
            matern_cov_integral(0.4, 0.5, 1.0, 1.0)


class TestAcvf:
    def test_white_noise(self):
        for lam in (0.15, 1.0):
            assert tfgn2_acvf(0.5, lam, 0) == pytest.approx(1.0, rel=1e-10)

    def test_symmetry_in_lag(self):
        assert tfgn2_acvf(0.7, 0.15, -3) == tfgn2_acvf(0.7, 0.15, 3)

    def test_second_difference_identity(self):
        c2 = lambda x: variance_tfbm2(0.7, 0.15, x) if x != 0 else 0.0
        for j in range(0, 21, 4):
            ref = 0.5 * (c2(j + 1) - 2.0 * c2(j) + c2(abs(j - 1)))
            assert tfgn2_acvf(0.7, 0.15, j) == pytest.approx(ref, rel=1e-7), j


def _acvf_table(H, lam, jmax):
    return [tfgn2_acvf(H, lam, j) for j in range(jmax + 1)]


def _fourier_sum_density(r, omega):
    # (1/2pi) sum_j r(j) e^{-i omega j}; the omitted tail is below
    # e^{-lam jmax} * poly and negligible at jmax = 200, lam = 0.15
    s = r[0] + 2.0 * sum(rj * math.cos(omega * j) for j, rj in enumerate(r) if j > 0)
    return s / TWO_PI


class TestSpectralDensities:
    def test_second_kind_origin_exact(self):
        v, e = tfgn2_spectral_density(0.7, 0.15, 0.0)
        assert abs(v - 0.15 ** (-0.4) / TWO_PI) + e <= 1e-10
        assert e == 0.0

    def test_white_noise_flat(self):
        for w in (-3.0, -0.5, 0.4, 1.0, math.pi):
            v, e = tfgn2_spectral_density(0.5, 0.9, w)
            assert v == pytest.approx(1.0 / TWO_PI, rel=1e-13)
            assert v - e > 0.0

    def test_fourier_inversion_oracle(self):
        r = _acvf_table(0.7, 0.15, 200)
        for w in (math.pi, 1.0):
            v, _ = tfgn2_spectral_density(0.7, 0.15, w, tol=1e-11)
            ref = _fourier_sum_density(r, w)
            assert v == pytest.approx(ref, rel=3e-6), w

    def test_brute_lattice_sum(self):
        for (H, lam, w) in [(0.7, 0.15, 2.0), (4.0 / 3.0, 0.1, 1.0), (1.2, 1.0, 3.1)]:
            v, bound = tfgn2_spectral_density(H, lam, w, tol=1e-12)
            ref, ref_tail = oracles.lattice_density_brute(H, lam, w, True)
            assert abs(v - ref) <= ref_tail + bound + 1e-12 * abs(ref), (H, lam, w)

    def test_first_kind_origin(self):
        v, e = tfgn1_spectral_density(0.7, 0.15, 0.0)
        assert v == 0.0 and e == 0.0

    def test_first_kind_positive_off_origin(self):
        for w in (0.05, 0.5, 2.0, math.pi):
            v, e = tfgn1_spectral_density(0.3, 0.15, w)
            assert v > 0.0 and v - e > 0.0

    def test_first_kind_brute(self):
        for (H, lam, w) in [(0.3, 0.15, 0.5), (0.7, 0.15, 2.0), (4.0 / 3.0, 0.1, 1.0)]:
            v, bound = tfgn1_spectral_density(H, lam, w, tol=1e-12)
            ref, ref_tail = oracles.lattice_density_brute(H, lam, w, False)
            assert abs(v - ref) <= ref_tail + bound + 1e-12 * abs(ref), (H, lam, w)

    def test_lattice_refinement_self_consistency(self):
        a, ea = tfgn1_spectral_density(0.3, 0.15, 0.5, tol=1e-8)
        b, eb = tfgn1_spectral_density(0.3, 0.15, 0.5, tol=1e-14)
        assert abs(a - b) <= ea + eb
        assert eb < ea

    def test_low_frequency_contrast(self):
        # second kind plateaus at lam^{1-2H}/2pi, first kind dies at 0
        h2_0, _ = tfgn2_spectral_density(0.7, 0.15, 0.0)
        assert h2_0 > 0.0
        small = [tfgn1_spectral_density(0.7, 0.15, w)[0] for w in (0.1, 0.01, 0.001)]
        assert small[0] > small[1] > small[2]
        assert small[2] < 1e-4

    def test_parseval(self):
        val, _ = integrate.quad(
            lambda w: tfgn2_spectral_density(0.7, 0.15, w, 1e-11)[0],
            -math.pi, math.pi, limit=200)
        assert val == pytest.approx(tfgn2_acvf(0.7, 0.15, 0), rel=1e-5)

    def test_domain(self):
        with pytest.raises(ValueError):
            tfgn2_spectral_density(0.7, 0.15, 4.0)
        with pytest.raises(ValueError):
            tfgn1_spectral_density(0.7, 0.15, -4.0)


class TestSpectralTable:
    def test_validation(self):
        SpectralTable(omega=np.array([0.5]), value=np.array([1.0]),
                      err_bound=np.array([1e-12]))
        with pytest.raises(ValueError):
            SpectralTable(omega=np.array([0.5]), value=np.array([1.0]),
                          err_bound=np.array([-1e-12]))
        with pytest.raises(ValueError):
            SpectralTable(omega=np.array([0.5]), value=np.array([1e-13]),
                          err_bound=np.array([1.0]))


class TestSampleGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            SampleGrid(np.array([1.0, 1.0, 2.0]))
        with pytest.raises(ValueError):
            SampleGrid(np.array([[1.0, 2.0]]))

    def test_uniform_detection(self):
        g = SampleGrid.regular(2.0, 5)
        assert g.uniform and g.dt == pytest.approx(0.5)
        g2 = SampleGrid(np.array([0.0, 0.1, 0.5]))
        assert not g2.uniform and g2.dt is None


class TestCovMatrix:
    def test_single_point_brownian(self):
        m = build_cov_matrix(0.5, 0.7, SampleGrid(np.array([1.0])))
        assert m.values == pytest.approx(np.array([[1.0]]))

    def test_increment_toeplitz_on_uniform_grid(self):
        grid = SampleGrid.regular(2.0, 9)
        m = build_cov_matrix(0.7, 0.15, grid)
        d = np.diff(np.diff(m.values, axis=0), axis=1)  # increment covariances
        for k in range(d.shape[0]):
            diag = np.diagonal(d, offset=k)
            assert np.max(np.abs(diag - diag[0])) < 1e-12

    def test_positive_semidefinite(self):
        grid = SampleGrid.regular(2.0, 8)
        m = build_cov_matrix(0.7, 0.15, grid)
        w = np.linalg.eigvalsh(m.values)
        assert w.min() >= -1e-10 * np.trace(m.values)

    def test_cholesky_reproduces_matrix(self):
        grid = SampleGrid.regular(1.0, 6)  # includes t = 0
        m = build_cov_matrix(0.7, 0.15, grid)
        L = m.cholesky()
        assert np.allclose(L @ L.T, m.values, atol=1e-9)


class TestSimulation:
    def test_deterministic_and_zero_start(self):
        grid = SampleGrid.regular(1.0, 5)
        a = simulate_gaussian_paths(0.7, 0.15, grid, 3, seed=42)
        b = simulate_gaussian_paths(0.7, 0.15, grid, 3, seed=42)
        assert np.array_equal(a.paths, b.paths)
        assert np.all(a.paths[:, 0] == 0.0)

    def test_worker_count_invariance(self):
        grid = SampleGrid.regular(1.0, 4)
        a = simulate_gaussian_paths(0.7, 0.15, grid, 16, seed=1, n_workers=1)
        b = simulate_gaussian_paths(0.7, 0.15, grid, 16, seed=1, n_workers=4)
        assert np.array_equal(a.paths, b.paths)

    def test_brownian_sample_variance(self):
        n = 20000
        ens = simulate_gaussian_paths(0.5, 0.3, SampleGrid(np.array([1.0])), n, seed=2)
        sv = float(ens.paths[:, 0].var())
        assert abs(sv - 1.0) <= 4.0 * math.sqrt(2.0 / n)

    def test_tempered_sample_variance(self):
        n = 20000
        ens = simulate_gaussian_paths(0.7, 0.15, SampleGrid(np.array([1.0])), n, seed=3)
        sv = float(ens.paths[:, 0].var())
        tv = variance_tfbm2(0.7, 0.15, 1.0)
        assert abs(sv - tv) <= 4.0 * tv * math.sqrt(2.0 / n)
