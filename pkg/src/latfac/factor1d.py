"""Spectral factorization of one-variable trigonometric polynomials.

A polynomial t that never vanishes on the circle and has zero winding splits
as t = plus * minus with plus supported on frequencies {0..n+} and minus on
{-n-..0}.  Two independent routes are implemented:

- spectral_factor: the cepstral pipeline (branch log, one-sided projection
  with the j=0 coefficient halved, pointwise exp, exact re-windowing), with
  grid doubling until the factors stabilize and the residual is certified;
- spectral_factor_roots: the root-product oracle on the associated algebraic
  polynomial, classifying roots strictly inside/outside the unit circle.

Plus Mahler measure (quadrature and root product, cross-checked), the
explicit bound profile of the factorization, and a bound report that also
checks the Dirichlet-smoothing inequality.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CrossCheckError,
    NoConvergence,
    NonzeroWinding,
    NotInvertible,
    NotPositiveReal,
    PreconditionError,
    RootOnCircle,
)
from .trigpoly import (
    CircleSamples,
    TrigPoly1,
    _pow2_at_least,
    from_samples,
    max_abs_im_certified,
    min_re_certified,
    sup_norm_certified,
    to_samples,
)
from .winding import branch_log, max_grid

_E = math.e


@dataclass(frozen=True)
class FactorPair:
    """Factorization t = plus * minus.

    plus has frequencies in {0..n+}, minus in {-n-..0}; log_mean is the mean
    of the branch logarithm over the circle (real log of the Mahler measure
    when t > 0).  The root fields are filled by the root route only:
    lam_plus/lam_minus are the inverted outside roots and the inside roots,
    circle_margin the smallest distance of any root modulus from 1.
    """

    plus: TrigPoly1
    minus: TrigPoly1
    log_mean: complex
    lam_plus: tuple = ()
    lam_minus: tuple = ()
    circle_margin: float | None = None


def _normalized_sign(plus: TrigPoly1, minus: TrigPoly1):
    """Fix the global +-1: Re of plus's constant coefficient >= 0, tie on Im.

    The tie is taken with a relative collar (|Re| <= 1e-9 |c0|) so that a
    genuinely imaginary constant coefficient is normalized identically by
    both computation routes instead of following its rounding noise.
    """
    c0 = plus.coeff(0)
    collar = 1e-9 * abs(c0)
    if c0.real < -collar or (abs(c0.real) <= collar and c0.imag < 0):
        return plus * (-1.0), minus * (-1.0)
    return plus, minus


def _constant_pair(c0: complex) -> FactorPair:
    if c0 == 0:
        raise NotInvertible("the zero constant has no factorization")
    gamma = cmath.log(c0)
    s = cmath.exp(0.5 * gamma)
    plus, minus = _normalized_sign(TrigPoly1({0: s}), TrigPoly1({0: s}))
    return FactorPair(plus=plus, minus=minus, log_mean=gamma)


def _residual_sup_upper(r: TrigPoly1, tol: float) -> float:
    # coefficient l1 dominates the sup norm; certify only when it is not
    # already conclusive
    l1 = r.coeff_l1()
    if l1 <= tol:
        return l1
    _, hi = sup_norm_certified(r, max(tol * 0.1, 1e-14))
    return hi


def spectral_factor(t: TrigPoly1, tol: float = 1e-9) -> FactorPair:
    """Cepstral-route factorization; ||plus*minus - t||_inf <= tol (absolute).

    Grid doubling continues until the windowed factors stabilize to 1e-11
    and the residual bound is certified below tol; hitting the grid cap
    raises NoConvergence.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if t.degree == 0:
        return _constant_pair(t.coeff(0))
    np_, nm = t.n_plus, t.n_minus
    cap = max_grid()
    M = _pow2_at_least(max(64, 8 * (t.degree + 1)))
    prev = None
    while M <= cap:
        L = branch_log(t, min_grid=M)
        M = L.M
        spectrum = np.fft.fft(L.values) / M
        gamma = complex(spectrum[0])
        half = 0.5 * gamma
        proj_p = TrigPoly1({0: half} | {j: complex(spectrum[j]) for j in range(1, np_ + 1)})
        proj_m = TrigPoly1({0: half} | {-j: complex(spectrum[-j % M]) for j in range(1, nm + 1)})
        plus = from_samples(
            CircleSamples(np.exp(to_samples(proj_p, M).values)), range(0, np_ + 1)
        )
        minus = from_samples(
            CircleSamples(np.exp(to_samples(proj_m, M).values)), range(-nm, 1)
        )
        if prev is not None:
            if plus.allclose(prev[0], 1e-11) and minus.allclose(prev[1], 1e-11):
                if _residual_sup_upper(plus * minus - t, tol) <= tol:
                    plus, minus = _normalized_sign(plus, minus)
                    return FactorPair(plus=plus, minus=minus, log_mean=gamma)
        prev = (plus, minus)
        M *= 2
    raise NoConvergence(f"factor did not reach tol={tol} below grid cap {cap}")


def _laurent_roots(t: TrigPoly1):
    """Polished roots of z^{n-} * sum t^(j) z^j, highest-degree-first coeffs."""
    np_, nm = t.n_plus, t.n_minus
    coeffs = np.array(
        [t.coeff(j) for j in range(np_, -nm - 1, -1)], dtype=complex
    )
    roots = np.roots(coeffs)
    if roots.size:
        dcoeffs = coeffs[:-1] * np.arange(len(coeffs) - 1, 0, -1)
        pv = np.polyval(coeffs, roots)
        dv = np.polyval(dcoeffs, roots)
        step = np.where(np.abs(dv) > 0, pv / np.where(dv == 0, 1.0, dv), 0.0)
        polished = roots - step
        # keep the polish only where it actually reduced the residual
        better = np.abs(np.polyval(coeffs, polished)) <= np.abs(pv)
        roots = np.where(better, polished, roots)
    return roots


_CIRCLE_MARGIN = 1e-9


def spectral_factor_roots(t: TrigPoly1) -> FactorPair:
    """Root-product factorization (the oracle route).

    Roots of the associated polynomial strictly inside the unit circle give
    lam_minus, outside roots invert to lam_plus; exactly n- roots must lie
    inside (that count is the winding number check).  A root modulus within
    1e-9 of the circle is a hard error: nonvanishing on the circle is the
    caller's hypothesis and the roots themselves are its arbiter here.
    """
    if t.degree == 0:
        return _constant_pair(t.coeff(0))
    np_, nm = t.n_plus, t.n_minus
    roots = _laurent_roots(t)
    margin = float(np.min(np.abs(np.abs(roots) - 1.0))) if roots.size else math.inf
    lam_plus, lam_minus = [], []
    for z in roots:
        az = abs(z)
        if az < 1.0 - _CIRCLE_MARGIN:
            lam_minus.append(complex(z))
        elif az > 1.0 + _CIRCLE_MARGIN:
            lam_plus.append(1.0 / complex(z))
        else:
            raise RootOnCircle(
                f"root modulus {az:.12f} within {_CIRCLE_MARGIN} of the circle"
            )
    if len(lam_minus) != nm:
        raise NonzeroWinding(
            f"{len(lam_minus)} roots inside the circle, expected {nm}: "
            f"winding number {len(lam_minus) - nm} != 0"
        )
    base = cmath.log(complex(t.eval(0.0)))
    gamma = (
        base
        - sum(cmath.log(1.0 - lam) for lam in lam_minus)
        - sum(cmath.log(1.0 - lam) for lam in lam_plus)
    )
    scale = cmath.exp(0.5 * gamma)
    plus = TrigPoly1({0: scale})
    for lam in lam_plus:
        plus = plus * TrigPoly1({0: 1.0, 1: -lam})
    minus = TrigPoly1({0: scale})
    for lam in lam_minus:
        minus = minus * TrigPoly1({0: 1.0, -1: -lam})
    plus, minus = _normalized_sign(plus, minus)
    return FactorPair(
        plus=plus,
        minus=minus,
        log_mean=gamma,
        lam_plus=tuple(lam_plus),
        lam_minus=tuple(lam_minus),
        circle_margin=margin,
    )


def mahler_measure(t: TrigPoly1, method: str = "cross") -> float:
    """Geometric mean of |t| over the circle.

    method "quadrature": exp of the grid mean of log|t|, doubling until
    stable to 1e-9 relative (works whenever t is not identically zero).
    method "roots": |leading coefficient| times the product of the outside
    root moduli.  method "cross" (default) runs both and requires agreement
    to 1e-8 relative.
    """
    if method not in ("cross", "quadrature", "roots"):
        raise PreconditionError(f"unknown method {method!r}")
    if t.is_zero():
        raise PreconditionError("Mahler measure of the zero polynomial")
    by_roots = None
    if method in ("cross", "roots"):
        if t.degree == 0:
            by_roots = abs(t.coeff(0))
        else:
            roots = _laurent_roots(t)
            if float(np.min(np.abs(np.abs(roots) - 1.0))) <= _CIRCLE_MARGIN:
                raise RootOnCircle("root modulus within 1e-9 of the circle")
            lead = abs(t.coeff(t.n_plus))
            by_roots = float(lead * np.prod(np.maximum(1.0, np.abs(roots))))
        if method == "roots":
            return by_roots
    value = _log_mean_quadrature(t)
    if method == "quadrature":
        return value
    if abs(value - by_roots) > 1e-8 * max(1.0, abs(by_roots)):
        raise CrossCheckError(
            f"Mahler routes disagree: quadrature {value!r} vs roots {by_roots!r}"
        )
    return by_roots


_MEAN_CHUNK = 1 << 15


def _midpoint_log_mean(t: TrigPoly1, M: int):
    """Mean of log|t| over midpoints (m+1/2)/M; None if a sample vanishes.

    Midpoints rather than grid points so that zeros of t at dyadic rationals
    (the usual place constructed examples put them) are not sampled.
    """
    acc = 0.0
    for start in range(0, M, _MEAN_CHUNK):
        xs = (np.arange(start, min(start + _MEAN_CHUNK, M)) + 0.5) / M
        vals = np.abs(t.eval(xs))
        if np.any(vals == 0.0):
            return None
        acc += float(np.sum(np.log(vals)))
    return acc / M


def _log_mean_quadrature(t: TrigPoly1) -> float:
    """exp of the mean of log|t|, midpoint sums with one Richardson step.

    For t zero-free on the circle the plain means converge exponentially; a
    zero on the circle leaves a c/M error term, which the extrapolant
    2*m(2M) - m(M) removes for the constructed boundary examples.
    """
    cap = max_grid()
    M = _pow2_at_least(max(64, 8 * (t.degree + 1)))
    prev_mean = None
    prev_extr = None
    while M <= cap:
        mean = _midpoint_log_mean(t, M)
        if mean is None:
            prev_mean = None
            prev_extr = None
            M *= 2
            continue
        if prev_mean is not None:
            extr = 2.0 * mean - prev_mean
            if prev_extr is not None and abs(extr - prev_extr) <= 1e-9 * max(
                1.0, abs(extr)
            ):
                return float(np.exp(extr))
            prev_extr = extr
        prev_mean = mean
        M *= 2
    raise NoConvergence("Mahler quadrature did not stabilize below the grid cap")


# ---------------------------------------------------------------------------
# Explicit bound quantities.


@dataclass(frozen=True)
class BoundProfile:
    """Explicit quantities controlling the factorization of t with Re t > 0.

    positivity_ratio: min Re t / (2e ||t^||_1), in (0, 1/(2e)];
    decay_rate: positivity_ratio / degree (inf for constants);
    annulus_log_bound: max of log||t||_inf + min Re t / 2 and
        pi/2 + |log(min Re t / 2)|;
    phase_bound: arctan(||Im t||_inf / min Re t), < pi/2;
    kernel_constant: 1 + log(degree + 1);
    cutoff: (degree / positivity_ratio) * log(degree * annulus_log_bound /
        positivity_ratio), the order at which the factor sup bound is taken;
    factor_sup_bound: kernel_constant * e^{phase_bound/2} * ||t||_inf^{1/2}
        * cutoff^{phase_bound} (sqrt(||t||_inf) for constants).

    min_re / sup are the certified bracket ends used (lower end for min Re,
    upper end for the sup norm).  ratio_capped flags the degenerate constant
    case where positivity_ratio sits exactly at the 1/(2e) endpoint.
    """

    degree: int
    min_re: float
    sup: float
    positivity_ratio: float
    decay_rate: float
    annulus_log_bound: float
    phase_bound: float
    kernel_constant: float
    cutoff: float
    factor_sup_bound: float
    ratio_capped: bool


_BRACKET_WIDTH = 1e-9


def bound_profile(t: TrigPoly1) -> BoundProfile:
    scale = max(1.0, t.coeff_l1())
    width = _BRACKET_WIDTH * scale
    lo, hi = min_re_certified(t, width)
    if lo <= 0.0:
        raise NotPositiveReal(
            f"cannot certify min Re t > 0 (bracket [{lo:.3e}, {hi:.3e}])"
        )
    _, sup_hi = sup_norm_certified(t, width)
    _, im_hi = max_abs_im_certified(t, width)
    n = t.degree
    l1 = t.coeff_l1()
    rho = lo / (2.0 * _E * l1)
    capped = rho >= 1.0 / (2.0 * _E) - 1e-15
    theta = math.atan(im_hi / lo)
    tau = max(
        math.log(sup_hi) + 0.5 * hi,
        0.5 * math.pi + abs(math.log(0.5 * hi)),
    )
    c_n = 1.0 + math.log(n + 1)
    if n == 0:
        sigma = math.inf
        cutoff = 0.0
        bound = math.sqrt(sup_hi)
    else:
        sigma = rho / n
        cutoff = (n / rho) * math.log(n * tau / rho)
        bound = c_n * math.exp(0.5 * theta) * math.sqrt(sup_hi) * cutoff**theta
    return BoundProfile(
        degree=n,
        min_re=lo,
        sup=sup_hi,
        positivity_ratio=rho,
        decay_rate=sigma,
        annulus_log_bound=tau,
        phase_bound=theta,
        kernel_constant=c_n,
        cutoff=cutoff,
        factor_sup_bound=bound,
        ratio_capped=capped,
    )


@dataclass(frozen=True)
class BoundReport:
    profile: BoundProfile
    factor_sup: float
    sup_ok: bool
    smoothing: tuple
    smoothing_ok: bool

    @property
    def passed(self) -> bool:
        return self.sup_ok and self.smoothing_ok


def bound_report(t: TrigPoly1, tol: float = 1e-9) -> BoundReport:
    """Checks the factor sup bound and the Dirichlet-smoothing inequality.

    The smoothing check asserts, at the sample grid and for N in {n, 2n, 4n},
    that the N-th Dirichlet mean of log|t| exceeds log|t| by at most
    2 * annulus_log_bound / decay_rate * exp(-N * decay_rate).
    """
    profile = bound_profile(t)
    pair = spectral_factor(t, tol=max(tol, 1e-12) * max(1.0, t.coeff_l1()))
    _, psi_hi = sup_norm_certified(pair.plus, 1e-9 * max(1.0, pair.plus.coeff_l1()))
    sup_ok = psi_hi <= profile.factor_sup_bound * (1.0 + 1e-12)
    n = profile.degree
    if n == 0:
        return BoundReport(profile, psi_hi, sup_ok, smoothing=(), smoothing_ok=True)
    L = branch_log(t)
    g = L.values.real
    ghat = np.fft.fft(g) / L.M
    freqs = np.fft.fftfreq(L.M, d=1.0 / L.M).astype(int)
    rows = []
    ok = True
    for N in (n, 2 * n, 4 * n):
        mask = np.abs(freqs) <= N
        smooth = np.fft.ifft(ghat * mask * L.M).real
        slack = (
            2.0 * profile.annulus_log_bound / profile.decay_rate
        ) * math.exp(-N * profile.decay_rate)
        worst = float(np.max(smooth - g)) - slack
        rows.append((N, worst))
        if worst > tol * max(1.0, float(np.max(np.abs(g)))):
            ok = False
    return BoundReport(profile, psi_hi, sup_ok, smoothing=tuple(rows), smoothing_ok=ok)


def near_circle_poly(n: int) -> TrigPoly1:
    """The degree-2n family with all roots on the unit circle centered 1/n.

    t_n(x) = e_{-n}(x) * ((e_1(x) - 1/n)^{2n} - 1); its associated algebraic
    polynomial (z - 1/n)^{2n} - 1 has roots 1/n + e^{i pi k / n}, none on the
    unit circle, n inside and n outside.
    """
    if n < 1:
        raise PreconditionError("family index must be >= 1")
    coeffs = {}
    for m in range(0, 2 * n + 1):
        coeffs[m - n] = math.comb(2 * n, m) * (-1.0 / n) ** (2 * n - m)
    coeffs[-n] -= 1.0
    return TrigPoly1(coeffs)
