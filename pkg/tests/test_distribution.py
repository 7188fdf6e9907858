"""Distribution tests: closed-form density vs the mixture-integral oracle,
normalization, pole behavior, scale family, spherical symmetry, and the
scale-mixture sampler (marginal and radial agreement with quadrature CDFs).
"""

import math

import numpy as np
import pytest
from scipy import special as sp

from ghs.distribution import (
    GhsDistribution,
    density,
    density_quadrature_oracle,
    log_density,
    normalization_integral,
    origin_ball_mass,
    radial_log_density,
    sample,
    sample_arrays,
)
from ghs.errors import DimensionError, DomainError

# Frozen from density_quadrature_oracle(2, (1, 1)).
DENSITY_D2_AT_ONES = 0.021741521332476726


def unit_vector(d, r, seed=0):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d)
    return r * v / np.linalg.norm(v)


class TestDensity:
    def test_univariate_closed_form_value(self):
        # p(x) = (2 pi^3)^(-1/2) e^(x^2/2) E_1(x^2/2) at x = 1
        from ghs.specfun import gen_exp_integral

        expected = (2.0 * math.pi**3) ** -0.5 * math.e**0.5 * gen_exp_integral(1, 0.5)
        assert density(GhsDistribution(1), [1.0]) == pytest.approx(expected, rel=1e-12)

    def test_bivariate_against_mixture_oracle(self):
        assert density(GhsDistribution(2), [1.0, 1.0]) == pytest.approx(
            DENSITY_D2_AT_ONES, rel=1e-10
        )

    def test_closed_form_equals_oracle_on_grid(self):
        for d in [1, 2, 3, 5, 10]:
            for r in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0]:
                x = unit_vector(d, r, seed=d)
                assert density(GhsDistribution(d), x) == pytest.approx(
                    density_quadrature_oracle(d, x), rel=1e-8
                ), (d, r)

    def test_pole_at_origin(self):
        for d in [1, 2, 5]:
            assert log_density(GhsDistribution(d), np.zeros(d)) == math.inf

    def test_pole_rate_constant(self):
        # density * r^(d-1) -> K_d * 2/(d-1) as r -> 0, for d >= 2
        for d in [2, 3, 5]:
            k_d = math.exp(
                sp.gammaln(0.5 * (d + 1))
                - 0.5 * (math.log(2.0) + (d + 2) * math.log(math.pi))
            )
            val = math.exp(radial_log_density(d, 1e-4)) * (1e-4) ** (d - 1)
            assert val == pytest.approx(k_d * 2.0 / (d - 1), rel=1e-2)

    def test_monotone_increase_toward_origin(self):
        for d in [1, 2, 3]:
            vals = [radial_log_density(d, r) for r in [1.0, 0.1, 0.01, 0.001]]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_scale_family_exact(self):
        dist = GhsDistribution(3, 2.5)
        x = np.array([0.3, -1.2, 0.7])
        expected = log_density(GhsDistribution(3), x / 2.5) - 3 * math.log(2.5)
        assert log_density(dist, x) == expected

    def test_spherical_symmetry_under_rotation(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(4)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        dist = GhsDistribution(4)
        assert log_density(dist, q @ x) == pytest.approx(
            log_density(dist, x), rel=1e-14
        )

    def test_near_pole_oracle_agreement(self):
        x = unit_vector(2, 0.01, seed=9)
        assert density(GhsDistribution(2), x) == pytest.approx(
            density_quadrature_oracle(2, x), rel=1e-7
        )

    def test_mid_radius_five_dimensional_point(self):
        x = unit_vector(5, 3.0, seed=55)
        assert density(GhsDistribution(5), x) == pytest.approx(
            density_quadrature_oracle(5, x), rel=1e-9
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            log_density(GhsDistribution(3), [1.0, 2.0])

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            GhsDistribution(0)
        with pytest.raises(DomainError):
            GhsDistribution(2, -1.0)

    def test_oracle_rejects_origin(self):
        with pytest.raises(DomainError):
            density_quadrature_oracle(2, np.zeros(2))


class TestNormalization:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_density_integrates_to_one(self, d):
        assert normalization_integral(d) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_ball_mass_saturates(self, d):
        assert origin_ball_mass(d, 1e7) == pytest.approx(1.0, abs=1e-6)


class TestSampler:
    def test_deterministic_for_fixed_seed(self):
        a = sample(GhsDistribution(2), 50, seed=123)
        b = sample(GhsDistribution(2), 50, seed=123)
        assert all(
            da.lam == db.lam and np.array_equal(da.x, db.x) for da, db in zip(a, b)
        )

    def test_different_seeds_differ(self):
        lam_a, _ = sample_arrays(GhsDistribution(2), 10, seed=1)
        lam_b, _ = sample_arrays(GhsDistribution(2), 10, seed=2)
        assert not np.array_equal(lam_a, lam_b)

    def test_coordinate_means_near_zero(self):
        _, xs = sample_arrays(GhsDistribution(3), 100_000, seed=42)
        se = xs.std(axis=0) / math.sqrt(xs.shape[0])
        assert np.all(np.abs(xs.mean(axis=0)) < 4.0 * se)

    def test_local_scales_positive(self):
        lam, _ = sample_arrays(GhsDistribution(1), 1000, seed=3)
        assert np.all(lam > 0)

    def test_scale_parameter_multiplies_draws(self):
        lam1, x1 = sample_arrays(GhsDistribution(2, 1.0), 100, seed=6)
        lam2, x2 = sample_arrays(GhsDistribution(2, 3.0), 100, seed=6)
        assert np.array_equal(lam1, lam2)
        assert np.allclose(x2, 3.0 * x1)

    def test_coordinate_marginal_matches_univariate_density(self):
        # each coordinate of a d=3 draw is marginally univariate horseshoe;
        # compare empirical CDF to the quadrature CDF of the d=1 density
        _, xs = sample_arrays(GhsDistribution(3), 100_000, seed=42)
        coord = np.sort(xs[:, 0])
        grid = np.linspace(-8.0, 8.0, 81)
        theo = np.array(
            [
                0.5 + 0.5 * math.copysign(origin_ball_mass(1, abs(g)), g)
                if g != 0.0
                else 0.5
                for g in grid
            ]
        )
        emp = np.searchsorted(coord, grid, side="right") / coord.size
        band = 1.95 / math.sqrt(coord.size)  # ~ alpha = 0.001 KS band
        assert np.max(np.abs(emp - theo)) < band

    def test_radial_cdf_matches_quadrature(self):
        _, xs = sample_arrays(GhsDistribution(2), 100_000, seed=7)
        radii = np.sort(np.linalg.norm(xs, axis=1))
        grid = np.linspace(0.05, 10.0, 60)
        theo = np.array([origin_ball_mass(2, g) for g in grid])
        emp = np.searchsorted(radii, grid, side="right") / radii.size
        assert np.max(np.abs(emp - theo)) < 1.95 / math.sqrt(radii.size)

    def test_rejects_bad_count(self):
        with pytest.raises(DomainError):
            sample(GhsDistribution(1), 0, seed=1)
