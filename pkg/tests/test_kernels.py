"""Kernel masks, the truncation identity, and L1 quadrature values."""

import math

import numpy as np
import pytest

from latfac.kernels import (
    Kernel,
    KernelKind,
    apply_mask,
    kernel_l1_norm,
    kernel_poly,
    l1_bound,
    l1_report,
    mask_value,
)
from latfac.trigpoly import CircleSamples, TrigPoly1, from_samples, to_samples

from conftest import random_poly1

D = KernelKind.DIRICHLET
H = KernelKind.HILBERT
AP = KernelKind.ANALYTIC_PLUS
AM = KernelKind.ANALYTIC_MINUS
OP = KernelKind.ONESIDED_PLUS
OM = KernelKind.ONESIDED_MINUS


def e(j, c=1.0):
    return TrigPoly1({j: c})


class TestMasks:
    def test_tables(self):
        k = Kernel(D, 3)
        assert [mask_value(k, j) for j in (-4, -3, 0, 3, 4)] == [0, 1, 1, 1, 0]
        k = Kernel(H, 3)
        assert [mask_value(k, j) for j in (-3, -1, 0, 1, 3, 4)] == [-1, -1, 0, 1, 1, 0]
        k = Kernel(AP, 3)
        assert [mask_value(k, j) for j in (-1, 0, 1, 3, 4)] == [0, 0.5, 1, 1, 0]
        k = Kernel(AM, 3)
        assert [mask_value(k, j) for j in (-4, -3, -1, 0, 1)] == [0, 1, 1, 0.5, 0]
        k = Kernel(OP, 3)
        assert [mask_value(k, j) for j in (-1, 0, 3, 4)] == [0, 1, 1, 0]
        k = Kernel(OM, 3)
        assert [mask_value(k, j) for j in (-4, -3, 0, 1)] == [0, 1, 1, 0]

    @pytest.mark.parametrize("N", [0, 1, 5])
    def test_analytic_halves_sum_to_dirichlet(self, N):
        for j in range(-N - 2, N + 3):
            lhs = mask_value(Kernel(AP, N), j) + mask_value(Kernel(AM, N), j)
            assert lhs == mask_value(Kernel(D, N), j)

    def test_kernel_poly_matches_mask(self):
        k = Kernel(AP, 4)
        p = kernel_poly(k)
        for j in range(-6, 7):
            assert p.coeff(j) == mask_value(k, j)
        # Dirichlet kernel at x=0 sums all mask ones
        assert kernel_poly(Kernel(D, 5)).eval(0.0) == pytest.approx(11.0)

    def test_negative_order_rejected(self):
        from latfac.errors import PreconditionError

        with pytest.raises(PreconditionError):
            Kernel(D, -1)


class TestApplyMask:
    def test_dirichlet_truncates(self):
        t = e(2) + e(1)
        assert apply_mask(Kernel(D, 1), t) == e(1)

    def test_hilbert_signs_and_kills_zero(self):
        t = TrigPoly1({0: 5.0, 1: 1.0, -1: 1.0})
        assert apply_mask(Kernel(H, 2), t) == TrigPoly1({1: 1.0, -1: -1.0})

    def test_analytic_plus_halves_zero(self):
        t = TrigPoly1({0: 4.0, 1: 1.0, -2: 1.0})
        assert apply_mask(Kernel(AP, 3), t) == TrigPoly1({0: 2.0, 1: 1.0})

    def test_onesided_plus_keeps_zero_whole(self):
        # same input as above; the sharp truncation leaves j=0 untouched
        t = TrigPoly1({0: 4.0, 1: 1.0, -2: 1.0})
        assert apply_mask(Kernel(OP, 3), t) == TrigPoly1({0: 4.0, 1: 1.0})

    def test_dirichlet_identity_above_degree(self, rng):
        for _ in range(5):
            t = random_poly1(rng, 6)
            assert apply_mask(Kernel(D, 6), t) == t
            assert apply_mask(Kernel(D, 9), t) == t

    def test_matches_manual_mask(self, rng):
        t = random_poly1(rng, 5)
        k = Kernel(AM, 3)
        manual = TrigPoly1({j: c * mask_value(k, j) for j, c in t.coeffs.items()})
        assert apply_mask(k, t) == manual


_D1_L1 = 1.0 / 3.0 + 2.0 * math.sqrt(3.0) / math.pi
_FOUR_OVER_PI = 4.0 / math.pi


class TestL1Values:
    def test_order_zero(self):
        assert kernel_l1_norm(Kernel(D, 0)) == 1.0
        assert kernel_l1_norm(Kernel(H, 0)) == 0.0
        assert kernel_l1_norm(Kernel(AP, 0)) == 0.5
        assert kernel_l1_norm(Kernel(AM, 0)) == 0.5
        assert kernel_l1_norm(Kernel(OP, 0)) == 1.0

    def test_dirichlet_one(self):
        assert kernel_l1_norm(Kernel(D, 1)) == pytest.approx(_D1_L1, abs=1e-8)

    def test_hilbert_one(self):
        assert kernel_l1_norm(Kernel(H, 1)) == pytest.approx(_FOUR_OVER_PI, abs=1e-8)

    def test_onesided_one(self):
        # |1 + e(x)| = 2|cos(pi x)|, integral 4/pi
        assert kernel_l1_norm(Kernel(OP, 1)) == pytest.approx(_FOUR_OVER_PI, abs=1e-8)
        assert kernel_l1_norm(Kernel(OM, 1)) == pytest.approx(_FOUR_OVER_PI, abs=1e-8)

    @pytest.mark.parametrize("N", [1, 2, 5])
    def test_analytic_signs_agree(self, N):
        a = kernel_l1_norm(Kernel(AP, N))
        b = kernel_l1_norm(Kernel(AM, N))
        assert a == pytest.approx(b, abs=1e-10)

    @pytest.mark.parametrize("kind", [D, H, AP, OP])
    def test_riemann_cross_check(self, kind):
        # independent route: plain Riemann sum of |kernel| on a dense grid
        N = 4
        xs = (np.arange(1 << 16) + 0.5) / (1 << 16)
        vals = np.abs(kernel_poly(Kernel(kind, N)).eval(xs))
        riemann = float(np.mean(vals))
        assert kernel_l1_norm(Kernel(kind, N)) == pytest.approx(riemann, abs=1e-4)


class TestL1Bounds:
    @pytest.mark.parametrize("N", [2, 3, 5, 8, 16, 33, 64])
    @pytest.mark.parametrize("kind", [D, H, AP, AM, OP, OM])
    def test_bounds_hold_from_two(self, kind, N):
        rep = l1_report(Kernel(kind, N))
        assert rep.satisfied is True, (kind, N, rep.value, rep.bound)

    def test_dirichlet_one_satisfied(self):
        rep = l1_report(Kernel(D, 1))
        assert rep.bound == pytest.approx(1.0 + math.log(3.0))
        assert rep.satisfied is True

    def test_hilbert_one_violates_stated_bound(self):
        # 4/pi = 1.2732... exceeds the stated 1 + 2 log 1 = 1; the report
        # carries the failure rather than hiding it
        rep = l1_report(Kernel(H, 1))
        assert rep.value == pytest.approx(_FOUR_OVER_PI, abs=1e-8)
        assert rep.bound == pytest.approx(1.0)
        assert rep.satisfied is False

    def test_order_zero_reports(self):
        assert l1_bound(Kernel(H, 0)) is None
        assert l1_report(Kernel(AP, 0)).satisfied is None
        rep = l1_report(Kernel(OP, 0))
        assert rep.bound == pytest.approx(1.0) and rep.satisfied is True


# ---------------------------------------------------------------------------
# Truncation commutes with exp on one-sided supports: masking the input past
# N >= n cannot change the first n exp-series coefficients.


def exp_series(f: TrigPoly1, window_max: int, tol: float = 1e-13) -> TrigPoly1:
    """Pointwise exp through the sampling bridge, window {0..window_max}."""
    M = max(256, 8 * (window_max + 1))
    M = 1 << (M - 1).bit_length()
    prev = None
    while M <= (1 << 16):
        vals = np.exp(to_samples(f, M).values)
        p = from_samples(CircleSamples(vals), range(window_max + 1))
        if prev is not None and p.allclose(prev, tol):
            return p
        prev = p
        M *= 2
    raise AssertionError("exp_series did not stabilize")


def exp_series_exact(f: TrigPoly1, window_max: int) -> TrigPoly1:
    # second route: exp(c0) * sum f_+^k / k!, exact because f_+ has freq >= 1
    c0 = f.coeff(0)
    fp = TrigPoly1({j: c for j, c in f.coeffs.items() if j != 0})
    total = TrigPoly1({0: 1.0})
    term = TrigPoly1({0: 1.0})
    for k in range(1, window_max + 1):
        term = term * fp * (1.0 / k)
        total = total + term
    scaled = total * complex(np.exp(c0))
    return TrigPoly1({j: c for j, c in scaled.coeffs.items() if 0 <= j <= window_max})


class TestTruncateCommutesWithExp:
    def test_routes_agree(self, rng):
        f = TrigPoly1(
            {j: (rng.standard_normal() + 1j * rng.standard_normal()) * 0.3 / (1 + j)
             for j in range(0, 21)}
        )
        assert exp_series(f, 20).allclose(exp_series_exact(f, 20), 1e-11)

    def test_mask_commutes(self, rng):
        for _ in range(12):
            deg = int(rng.integers(1, 21))
            f = TrigPoly1(
                {j: (rng.standard_normal() + 1j * rng.standard_normal()) * 0.4 / (1 + j)
                 for j in range(0, deg + 1)}
            )
            N = int(rng.integers(0, 21))
            n = int(rng.integers(0, N + 1))
            lhs = apply_mask(Kernel(OP, n), exp_series(f, 20))
            rhs = apply_mask(Kernel(OP, n), exp_series(apply_mask(Kernel(OP, N), f), 20))
            assert lhs.allclose(rhs, 1e-10), (deg, n, N)
