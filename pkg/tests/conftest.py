"""Shared test helpers: brute-force evaluators and small random generators."""

import math
from fractions import Fraction

import numpy as np
import pytest

from latfac.lattice import RealAlpha
from latfac.trigpoly import TrigPoly1, TrigPoly2


def golden_alpha(places: int = 80) -> RealAlpha:
    """(sqrt(5)-1)/2 as a certified enclosure with `places` decimal digits."""
    s = math.isqrt(5 * 10 ** (2 * places))
    lo = (Fraction(s, 10**places) - 1) / 2
    hi = (Fraction(s + 1, 10**places) - 1) / 2
    return RealAlpha(lo, hi)


def liouville_fraction(terms: int = 5) -> Fraction:
    """Sum of 10^(-k!) for k = 1..terms, exactly."""
    return sum(Fraction(1, 10 ** math.factorial(k)) for k in range(1, terms + 1))


def liouville_alpha(terms: int = 5, places: int = 130) -> RealAlpha:
    """The truncated Liouville number as a digit-string enclosure."""
    digits = ["0"] * places
    for k in range(1, terms + 1):
        digits[math.factorial(k) - 1] = "1"
    return RealAlpha.from_digits("0." + "".join(digits))


def brute_values_1d(t: TrigPoly1, M: int = 100_000):
    return t.eval(np.arange(M) / M)


def brute_sup_1d(t, M=100_000):
    return float(np.abs(brute_values_1d(t, M)).max())


def brute_min_re_1d(t, M=100_000):
    return float(brute_values_1d(t, M).real.min())


def brute_values_2d(t: TrigPoly2, Mx: int = 512, My: int = 512):
    xs = np.arange(Mx) / Mx
    ys = np.arange(My) / My
    return t.eval(xs[:, None], ys[None, :])


def random_poly1(rng, n, scale=1.0, complex_coeffs=True):
    coeffs = {}
    for j in range(-n, n + 1):
        re = rng.normal()
        im = rng.normal() if complex_coeffs else 0.0
        coeffs[j] = scale * complex(re, im) / (1.0 + abs(j))
    return TrigPoly1(coeffs)


def random_real_poly1(rng, n, scale=1.0):
    """Real-valued random polynomial (conjugate-symmetric coefficients)."""
    coeffs = {0: complex(rng.normal() * scale)}
    for j in range(1, n + 1):
        c = scale * complex(rng.normal(), rng.normal()) / (2.0 * (1 + j))
        coeffs[j] = c
        coeffs[-j] = c.conjugate()
    return TrigPoly1(coeffs)


def random_positive_poly1(rng, n, floor=0.1, scale=0.6):
    """Strictly positive real polynomial: shift a random real one above floor."""
    p = random_real_poly1(rng, n, scale)
    m = brute_min_re_1d(p)
    # brute min over 1e5 points plus a Lipschitz cushion keeps the true
    # minimum at or above the floor
    cushion = p.lipschitz_bound() / 100_000
    return p + TrigPoly1({0: floor + cushion - m})


def random_poly2(rng, n1, n2, scale=1.0, complex_coeffs=True):
    coeffs = {}
    for j in range(-n1, n1 + 1):
        for k in range(-n2, n2 + 1):
            re = rng.normal()
            im = rng.normal() if complex_coeffs else 0.0
            coeffs[(j, k)] = scale * complex(re, im) / (1.0 + abs(j) + abs(k))
    return TrigPoly2(coeffs)


def random_real_poly2(rng, n1, n2, scale=1.0):
    """Real-valued random two-variable polynomial (coefficient symmetry
    c(-j,-k) = conj(c(j,k)))."""
    coeffs = {(0, 0): complex(rng.normal() * scale)}
    for j in range(-n1, n1 + 1):
        for k in range(-n2, n2 + 1):
            if (j, k) == (0, 0) or (j, k) < (0, 0):
                continue
            c = scale * complex(rng.normal(), rng.normal()) / (2.0 * (1 + abs(j) + abs(k)))
            coeffs[(j, k)] = c
            coeffs[(-j, -k)] = c.conjugate()
    return TrigPoly2(coeffs)


def random_positive_poly2(rng, n1, n2, floor=0.1, scale=0.6):
    """Strictly positive real two-variable polynomial above floor."""
    p = random_real_poly2(rng, n1, n2, scale)
    m = float(brute_values_2d(p).real.min())
    lx, ly = p.lipschitz_bounds()
    cushion = (lx + ly) / 512
    return p + TrigPoly2({(0, 0): floor + cushion - m})


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)
