"""Slice factorization, smoothing approximants, convergence budgets."""

import math

import numpy as np
import pytest

from latfac.errors import AliasRisk, NotPositiveReal, PreconditionError
from latfac.factor1d import spectral_factor
from latfac.factor2d import (
    SlicedFactor,
    _slow_sliced,
    convergence_budget,
    distance_profile,
    envelope_bound,
    factor_approximant,
    slicewise_factor,
    smoothing_distance,
    verify_convergence,
)
from latfac.trigpoly import TrigPoly1, TrigPoly2, min_re_certified, sup_norm_certified

from conftest import random_positive_poly2

SQ2 = math.sqrt(2.0)

# 3 + 0.5*cos(2pi x) + 0.5*cos(2pi y)
T_GOLDEN = TrigPoly2(
    {(0, 0): 3.0, (1, 0): 0.25, (-1, 0): 0.25, (0, 1): 0.25, (0, -1): 0.25}
)
# 3 + cos(2pi x) * cos(2pi y)
T_PRODCOS = TrigPoly2(
    {(0, 0): 3.0, (1, 1): 0.25, (1, -1): 0.25, (-1, 1): 0.25, (-1, -1): 0.25}
)
# x-independent: every slice is 5/2 + e_1 + e_{-1}
T_YONLY = TrigPoly2({(0, 0): 2.5, (0, 1): 1.0, (0, -1): 1.0})
T_CONST4 = TrigPoly2({(0, 0): 4.0})


def slice_residual_l1(sf, m):
    pair = sf.pair(m)
    z = complex(np.exp((2j * math.pi) * m / sf.M))
    r = pair.plus * pair.minus - sf.source.slice_x(z)
    return r.coeff_l1()


class TestSlicedFactorType:
    def test_shape_and_band(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        assert sf.M == 64
        assert sf.band == 1
        assert sf.plus_coeffs.shape == (64, 2)
        assert sf.minus_coeffs.shape == (64, 2)
        assert sf.log_means.shape == (64,)

    def test_arrays_read_only(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        with pytest.raises(ValueError):
            sf.plus_coeffs[0, 0] = 0.0

    def test_pair_wraparound(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        a = sf.pair(-1)
        b = sf.pair(63)
        assert a.plus == b.plus and a.minus == b.minus

    def test_pair_support(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        pair = sf.pair(7)
        assert set(pair.plus.freqs) <= {0, 1}
        assert set(pair.minus.freqs) <= {0, -1}

    def test_bad_slice_count(self):
        z = np.zeros((3, 2), dtype=complex)
        with pytest.raises(PreconditionError):
            SlicedFactor(z, z, np.zeros(3), T_CONST4)

    def test_mismatched_shapes(self):
        with pytest.raises(PreconditionError):
            SlicedFactor(
                np.zeros((4, 2)), np.zeros((4, 3)), np.zeros(4), T_CONST4
            )


class TestSlicewiseFactor:
    def test_constant(self):
        sf = slicewise_factor(T_CONST4, M=8)
        assert np.allclose(sf.plus_coeffs[:, 0], 2.0, atol=1e-12)
        assert np.allclose(sf.minus_coeffs[:, 0], 2.0, atol=1e-12)
        assert np.allclose(sf.log_means, math.log(4.0), atol=1e-12)

    def test_x_independent_slices(self):
        # every slice factors 5/2 + e_1 + e_{-1}
        sf = slicewise_factor(T_YONLY, M=64)
        assert np.allclose(sf.plus_coeffs[:, 0], SQ2, atol=1e-9)
        assert np.allclose(sf.plus_coeffs[:, 1], 1.0 / SQ2, atol=1e-9)
        assert np.allclose(sf.log_means, math.log(2.0), atol=1e-9)

    def test_product_cosine_slice_at_zero(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        oracle = spectral_factor(TrigPoly1({0: 3.0, 1: 0.5, -1: 0.5}))
        pair = sf.pair(0)
        for i in (0, 1):
            assert pair.plus.coeff(i) == pytest.approx(oracle.plus.coeff(i), abs=1e-9)
        assert pair.log_mean == pytest.approx(oracle.log_mean, abs=1e-9)

    def test_slice_identity(self, rng):
        t = random_positive_poly2(rng, 2, 2, floor=0.5)
        sf = slicewise_factor(t, M=64)
        for m in (0, 13, 31, 50):
            assert slice_residual_l1(sf, m) <= 1e-8

    def test_fast_and_slow_routes_agree(self, rng):
        t = random_positive_poly2(rng, 1, 2, floor=0.5)
        fast = slicewise_factor(t, M=16)
        slow = _slow_sliced(t, 16, 1e-10)
        assert np.allclose(fast.plus_coeffs, slow.plus_coeffs, atol=1e-7)
        assert np.allclose(fast.minus_coeffs, slow.minus_coeffs, atol=1e-7)

    def test_complex_input_per_slice(self):
        t = TrigPoly2({(0, 0): 3.0, (1, 1): 0.3})
        assert t != t.star()
        sf = slicewise_factor(t, M=32)
        for m in (0, 5, 17):
            assert slice_residual_l1(sf, m) <= 1e-8
        # log means trace the slice mean continuously, no branch jumps
        assert float(np.abs(np.diff(sf.log_means)).max()) < 0.5

    def test_not_positive(self):
        t = TrigPoly2({(0, 0): 1.0, (1, 0): 1.0, (-1, 0): 1.0})
        with pytest.raises(NotPositiveReal):
            slicewise_factor(t, M=64)

    def test_m_too_small_for_bandwidth(self):
        with pytest.raises(PreconditionError):
            slicewise_factor(T_PRODCOS, M=8)

    def test_m_not_power_of_two(self):
        with pytest.raises(PreconditionError):
            slicewise_factor(T_PRODCOS, M=48)

    def test_bad_tol(self):
        with pytest.raises(PreconditionError):
            slicewise_factor(T_PRODCOS, tol=0.0)

    def test_default_slice_count(self):
        sf = slicewise_factor(T_PRODCOS)
        assert sf.M == 64


class TestFactorApproximant:
    def test_x_independent_exact_at_order_zero(self):
        sf = slicewise_factor(T_YONLY, M=64)
        ap = factor_approximant(sf, 0)
        assert ap.coeff((0, 0)) == pytest.approx(SQ2, abs=1e-12)
        assert ap.coeff((0, 1)) == pytest.approx(1.0 / SQ2, abs=1e-12)
        assert ap.coeff_l1() == pytest.approx(SQ2 + 1.0 / SQ2, abs=1e-9)

    def test_support(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        ap = factor_approximant(sf, 5)
        for (j, k) in ap.freqs:
            assert -5 <= j <= 5
            assert 0 <= k <= 1

    def test_squares_back_to_input(self):
        sf = slicewise_factor(T_PRODCOS, M=256)
        dist = smoothing_distance(sf, 20)
        ap = factor_approximant(sf, 20)
        xs = np.arange(256) / 256
        ys = np.arange(64) / 64
        vals = ap.eval(xs[:, None], ys[None, :])
        tv = T_PRODCOS.eval(xs[:, None], ys[None, :])
        err = float(np.abs(np.abs(vals) ** 2 - tv.real).max())
        # |ap|^2 - t = (|ap|^2 - |S|^2) + slice residual; first part is
        # bounded by (norm(ap) + norm(S)) * dist
        assert err <= 5.0 * dist + 1e-7

    def test_alias_guard(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        with pytest.raises(AliasRisk):
            factor_approximant(sf, 32)

    def test_negative_order(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        with pytest.raises(PreconditionError):
            factor_approximant(sf, -1)


class TestSmoothingDistance:
    def test_profile_matches_single_order(self):
        # shell accumulation against the direct mask route
        sf = slicewise_factor(T_PRODCOS, M=128)
        prof = distance_profile(sf, 12)
        for N in (0, 1, 5, 12):
            assert prof[N] == pytest.approx(smoothing_distance(sf, N), rel=1e-9, abs=1e-13)

    def test_profile_nonincreasing(self):
        sf = slicewise_factor(T_PRODCOS, M=128)
        prof = distance_profile(sf, 12)
        assert np.all(np.diff(prof) <= 1e-12)

    def test_x_independent_zero(self):
        sf = slicewise_factor(T_YONLY, M=64)
        prof = distance_profile(sf, 4)
        assert float(prof.max()) <= 1e-10

    def test_alias_guard(self):
        sf = slicewise_factor(T_PRODCOS, M=64)
        with pytest.raises(AliasRisk):
            distance_profile(sf, 32)
        with pytest.raises(AliasRisk):
            smoothing_distance(sf, 40)


class TestConvergenceBudget:
    def test_golden_constants(self):
        b = convergence_budget(T_GOLDEN, 1e-3)
        assert b.x_degree == 1
        assert b.y_degree_effective == 1
        assert b.positivity_ratio == pytest.approx(1.0 / (4.0 * math.e), rel=1e-6)
        assert b.x_decay_rate == pytest.approx(b.positivity_ratio, rel=1e-12)
        assert b.slice_bound == pytest.approx(
            (1.0 + math.log(2.0)) * math.sqrt(5.0), rel=1e-5
        )
        assert b.order == pytest.approx(123.068, abs=0.02)
        assert math.ceil(b.order) == 124

    def test_envelope_identity_at_order(self):
        # the envelope equals eps exactly at the budget order
        b = convergence_budget(T_GOLDEN, 1e-3)
        assert envelope_bound(b, b.order) == pytest.approx(1e-3, rel=1e-9)

    def test_eps_doubling_shift(self):
        b1 = convergence_budget(T_GOLDEN, 1e-3)
        b2 = convergence_budget(T_GOLDEN, 2e-3)
        shift = math.log(2.0) / b1.positivity_ratio
        assert b1.order - b2.order == pytest.approx(shift, rel=1e-9)

    def test_x_independent_order_zero(self):
        b = convergence_budget(T_YONLY, 1e-3)
        assert b.x_degree == 0
        assert b.order == 0.0
        assert math.isinf(b.x_decay_rate)
        assert envelope_bound(b, 0) == 0.0
        assert envelope_bound(b, 7) == 0.0

    def test_not_positive(self):
        t = TrigPoly2({(0, 0): 0.5, (1, 0): 1.0, (-1, 0): 1.0})
        with pytest.raises(NotPositiveReal):
            convergence_budget(t, 1e-3)

    def test_bad_eps(self):
        with pytest.raises(PreconditionError):
            convergence_budget(T_GOLDEN, 0.0)

    def test_envelope_dominates_measured_profile(self):
        b = convergence_budget(T_GOLDEN, 1e-3)
        top = 2 * math.ceil(b.order)
        sf = slicewise_factor(T_GOLDEN, M=1024)
        prof = distance_profile(sf, top)
        for N in range(1, top + 1):
            assert prof[N] <= envelope_bound(b, N)
        # the measured distance sits far below the guarantee at the order
        assert prof[math.ceil(b.order)] <= 1e-3


class TestAnnulusSliceInvariants:
    # budget constants for the frozen slices: positivity ratio of each
    # annulus slice stays above ratio/2e, its log bound below tau + log 2

    @staticmethod
    def _tau(sup_hi, min_hi):
        return max(
            math.log(sup_hi) + 0.5 * min_hi,
            0.5 * math.pi + abs(math.log(0.5 * min_hi)),
        )

    def test_sampled_annulus(self, rng):
        for trial in range(3):
            t = random_positive_poly2(rng, 2, 2, floor=0.8, scale=0.4)
            width = 1e-9 * max(1.0, t.coeff_l1())
            lo, hi = min_re_certified(t, width)
            _, sup_hi = sup_norm_certified(t, width)
            rho = lo / (2.0 * math.e * t.coeff_l1())
            tau = self._tau(sup_hi, hi)
            sigma1 = rho / t.n1
            for u in (-sigma1, 0.0, sigma1):
                for a in range(6):
                    z = math.exp(u) * complex(np.exp((2j * math.pi) * a / 6))
                    g = t.slice_x(z)
                    gw = 1e-9 * max(1.0, g.coeff_l1())
                    g_lo, g_hi = min_re_certified(g, gw)
                    _, g_sup = sup_norm_certified(g, gw)
                    rho_g = g_lo / (2.0 * math.e * g.coeff_l1())
                    assert rho_g >= rho / (2.0 * math.e) - 1e-12
                    assert self._tau(g_sup, g_hi) <= tau + math.log(2.0) + 1e-9


class TestVerifyConvergence:
    def test_golden_report(self):
        rep = verify_convergence(T_GOLDEN, 1e-3)
        assert rep.order == 124
        assert rep.distance <= 1e-3
        assert rep.distance_ok
        assert len(rep.gamma) == 24
        assert rep.gamma_ok
        assert rep.passed

    def test_gamma_row_contents(self):
        rep = verify_convergence(T_GOLDEN, 1e-3)
        for row in rep.gamma:
            assert row.re_ok and row.sup_ok
            assert row.re_lower >= row.re_threshold - 1e-5
            assert row.sup_upper <= row.sup_threshold + 1e-5
            assert abs(row.z) > 0.5

    def test_x_independent(self):
        rep = verify_convergence(T_YONLY, 1e-2)
        assert rep.order == 0
        assert rep.distance <= 1e-10
        assert len(rep.gamma) == 8
        assert rep.passed

    def test_explicit_grid(self):
        rep = verify_convergence(T_GOLDEN, 1e-3, M=2048)
        assert rep.order == 124
        assert rep.passed
