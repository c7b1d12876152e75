import math

import numpy as np
import pytest

from polybalance.cheb_core import ChebPoly, cheb_basis, eval_trig, random_unit_poly
from polybalance.grids import extrema_grid, roots_grid
from polybalance.sup_norm import (
    NINE_POINT_FACTOR,
    SupCertificate,
    certified_sup,
    dense_sup_estimate,
    grid_max,
    grid_factor,
)


class TestGridMax:
    def test_t1_extrema(self):
        assert grid_max(cheb_basis(1), extrema_grid(1, 9)) == 1.0

    def test_t1_on_its_root(self):
        assert grid_max(cheb_basis(1), roots_grid(1)) < 1e-16

    def test_t9_aliases(self):
        assert grid_max(cheb_basis(9), extrema_grid(1, 9)) == pytest.approx(1.0, abs=1e-15)


class TestCertifiedSup:
    def test_t5(self):
        cert = certified_sup(cheb_basis(5), 5, extrema_grid(5, 9))
        assert cert.grid_max <= 1.0 + 1e-15
        assert cert.certified_bound <= 5 / 3 + 1e-15
        assert cert.dense_estimate == pytest.approx(1.0, abs=1e-12)

    def test_zero_polynomial(self):
        assert certified_sup(ChebPoly([0.0]), 3, extrema_grid(3, 9)).certified_bound == 0.0

    def test_nine_point_factor(self):
        cert = certified_sup(cheb_basis(2), 4, extrema_grid(4, 9))
        assert cert.factor == 5 / 3
        assert cert.certified_bound == cert.grid_max * cert.factor

    def test_rounded_factor_dominates_sharp_one(self):
        assert NINE_POINT_FACTOR >= 1 / (1 - math.pi / 9)
        assert 1 / (1 - math.pi / 9) == pytest.approx(1.5362, abs=1e-4)

    @pytest.mark.parametrize("M", [4, 5, 7, 12, 30])
    def test_general_factor(self, M):
        assert grid_factor(3, extrema_grid(3, M)) == pytest.approx(1 / (1 - math.pi / M), rel=1e-15)

    def test_roots_grid_accepted(self):
        # offset pi/(18n) lies inside [0, spacing]
        assert grid_factor(4, roots_grid(36, 9)) == 5 / 3

    def test_degree_above_bound_rejected(self):
        with pytest.raises(ValueError):
            certified_sup(cheb_basis(6), 5, extrema_grid(5, 9))

    def test_too_coarse_grid_rejected(self):
        # 9 nodes cannot certify degree 3 (ratio 3 < pi)
        with pytest.raises(ValueError):
            certified_sup(cheb_basis(3), 3, extrema_grid(1, 9))

    def test_soundness_degree_40(self):
        g = extrema_grid(40, 9)
        for seed in range(100):
            p = ChebPoly(np.random.default_rng(seed).standard_normal(41))
            cert = certified_sup(p, 40, g)
            assert cert.dense_estimate <= cert.certified_bound

    @pytest.mark.parametrize("M", [4, 5, 6])
    def test_soundness_small_multipliers(self, M):
        # the non-rounded factor has less slack; still sound
        g = extrema_grid(12, M)
        for seed in range(50):
            p = ChebPoly(np.random.default_rng(seed).standard_normal(13))
            cert = certified_sup(p, 12, g)
            assert cert.dense_estimate <= cert.certified_bound

    def test_tightness_ordering(self):
        for seed in range(30):
            p = random_unit_poly(20, seed)
            cert = certified_sup(p, 20, extrema_grid(20, 9))
            assert cert.grid_max <= cert.dense_estimate * (1 + 1e-12) or cert.grid_max <= cert.dense_estimate + 1e-15
            assert 1 <= cert.certified_bound / cert.dense_estimate <= cert.factor * (1 + 1e-6)

    def test_json_round_trip(self):
        cert = certified_sup(cheb_basis(3), 3, extrema_grid(3, 9))
        assert SupCertificate.from_json(cert.to_json()) == cert


class TestDenseSupEstimate:
    def test_t3(self):
        v = dense_sup_estimate(cheb_basis(3), 10_000)
        assert 1 - 1e-6 <= v <= 1

    @pytest.mark.parametrize("points", [2, 17, 1000])
    def test_constant(self, points):
        assert dense_sup_estimate(ChebPoly([2.0]), points) == 2.0

    def test_refinement(self):
        for seed in range(20):
            p = ChebPoly(np.random.default_rng(seed).standard_normal(21))
            assert dense_sup_estimate(p, 100_000) >= dense_sup_estimate(p, 1_000)

    def test_matches_direct_evaluation(self, rng):
        p = ChebPoly(rng.standard_normal(30))
        t = np.arange(5001) * math.pi / 5000
        assert dense_sup_estimate(p, 5000) == pytest.approx(np.max(np.abs(eval_trig(p, t))), rel=1e-13)

    def test_minimum_resolution(self):
        with pytest.raises(ValueError):
            dense_sup_estimate(cheb_basis(1), 1)
