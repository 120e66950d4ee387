"""Slicewise spectral factorization of two-variable polynomials.

For t(x,y) with Re t > 0 each x-slice is a one-variable polynomial in y with
Re > 0, so it factors; doing this across a uniform grid of M slices gives
the two-sided factor family S+ (slice m holds the analytic factor of
t(m/M, .)).  Smoothing the family in x with a Dirichlet window of order N
turns it into an honest two-variable polynomial supported on
{-N..N} x {0..n2}; the convergence budget says how large N must be for a
requested accuracy.

Real positive inputs run on a vectorized array pipeline (one FFT per stage
over all slices at once); anything else falls back to per-slice calls of the
one-variable routine with a sign-coherence pass.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AliasRisk,
    NoConvergence,
    NotPositiveReal,
    PreconditionError,
)
from .factor1d import FactorPair, spectral_factor
from .trigpoly import (
    TrigPoly1,
    TrigPoly2,
    _pow2_at_least,
    max_abs_im_certified,
    min_re_certified,
    sup_norm_certified,
)
from .winding import max_grid

_E = math.e
_OVERSAMPLE = 4
_BRACKET_WIDTH = 1e-9
_X_GRID_CAP = 1024


class SlicedFactor:
    """Analytic slice factors of t on the x-grid {m/M}.

    plus_coeffs[m, i] is the coefficient of e_i (i in 0..band) of the
    analytic factor of the slice at x = m/M; minus_coeffs[m, i] the
    coefficient of e_{-i} of the co-analytic factor; log_means[m] the slice
    log mean.  band is n2 of the source polynomial.
    """

    __slots__ = ("M", "band", "plus_coeffs", "minus_coeffs", "log_means", "source")

    def __init__(self, plus_coeffs, minus_coeffs, log_means, source: TrigPoly2):
        plus = np.array(plus_coeffs, dtype=complex)
        minus = np.array(minus_coeffs, dtype=complex)
        means = np.array(log_means, dtype=complex)
        M, width = plus.shape
        if M < 1 or (M & (M - 1)) != 0:
            raise PreconditionError("slice count must be a power of two")
        if minus.shape != plus.shape or means.shape != (M,):
            raise PreconditionError("slice array shapes disagree")
        for a in (plus, minus, means):
            a.flags.writeable = False
        self.M = M
        self.band = width - 1
        self.plus_coeffs = plus
        self.minus_coeffs = minus
        self.log_means = means
        self.source = source

    def pair(self, m: int) -> FactorPair:
        """The slice factorization at x = m/M as a FactorPair."""
        row_p = self.plus_coeffs[m % self.M]
        row_m = self.minus_coeffs[m % self.M]
        plus = TrigPoly1({i: c for i, c in enumerate(row_p)})
        minus = TrigPoly1({-i: c for i, c in enumerate(row_m)})
        return FactorPair(
            plus=plus, minus=minus, log_mean=complex(self.log_means[m % self.M])
        )


def _certify_positive_real_part(t: TrigPoly2):
    scale = max(1.0, t.coeff_l1())
    lo, hi = min_re_certified(t, _BRACKET_WIDTH * scale)
    if lo <= 0.0:
        raise NotPositiveReal(
            f"cannot certify min Re t > 0 (bracket [{lo:.3e}, {hi:.3e}])"
        )
    return lo, hi


def _samples_2d(t: TrigPoly2, Mx: int, My: int) -> np.ndarray:
    if Mx <= 2 * t.n1 or My <= 2 * t.n2:
        raise AliasRisk(f"grid {Mx}x{My} cannot resolve degrees ({t.n1},{t.n2})")
    dense = np.zeros((Mx, My), dtype=complex)
    for (j, k), c in t.coeffs.items():
        dense[j % Mx, k % My] += c
    return np.fft.ifft2(dense) * (Mx * My)


def _slice_coeff_table(t: TrigPoly2, M: int, half: int) -> np.ndarray:
    """Exact y-coefficients of every x-slice on columns -half..half:
    table[m, k + half] is the e_k coefficient of t(m/M, .)."""
    xs = np.arange(M) / M
    table = np.zeros((M, 2 * half + 1), dtype=complex)
    for (j, k), c in t.coeffs.items():
        table[:, k + half] += c * np.exp((2j * math.pi) * j * xs)
    return table


def _row_products(C: np.ndarray) -> np.ndarray:
    """Coefficients of plus*star(plus) per row, columns -band..band
    (autocorrelation of each coefficient row, computed without wraparound)."""
    rows, width = C.shape
    P = _pow2_at_least(2 * width)
    pad = np.zeros((rows, P), dtype=complex)
    pad[:, :width] = C
    F = np.fft.fft(pad, axis=1)
    corr = np.fft.ifft(F * np.conj(F), axis=1)
    cols = [d % P for d in range(-(width - 1), width)]
    return corr[:, cols]


def _fast_sliced(t: TrigPoly2, M: int, tol: float) -> SlicedFactor:
    """All slices at once for real positive t: one array pipeline per stage."""
    n2 = t.n2
    tc = _slice_coeff_table(t, M, n2)
    cap = max_grid()
    My = _pow2_at_least(max(64, 8 * (n2 + 1)))
    prev = None
    while My <= cap:
        vals = _samples_2d(t, M, My).real
        if np.min(vals) <= 0.0:
            raise NotPositiveReal("positivity certificate contradicted on the grid")
        ceps = np.fft.fft(np.log(vals), axis=1) / My
        proj = np.zeros_like(ceps)
        proj[:, 0] = 0.5 * ceps[:, 0]
        proj[:, 1 : n2 + 1] = ceps[:, 1 : n2 + 1]
        plus_vals = np.exp(np.fft.ifft(proj, axis=1) * My)
        # the exponential leaks above frequency n2; the window projection
        # removes the leak, and what it aliases back dies off as My grows
        C = (np.fft.fft(plus_vals, axis=1) / My)[:, : n2 + 1]
        if prev is not None:
            scale = max(1.0, float(np.abs(C).max()))
            if float(np.abs(C - prev).max()) <= 1e-11 * scale:
                # residual of plus*minus - t slice by slice from the
                # projected coefficients: the l1 row sum dominates each
                # slice residual sup norm
                res = _row_products(C) - tc
                if float(np.abs(res).sum(axis=1).max()) <= tol:
                    return SlicedFactor(C, np.conj(C), ceps[:, 0], t)
        prev = C
        My *= 2
    raise NoConvergence(f"slice pipeline did not reach tol={tol} below cap {cap}")


def _slow_sliced(t: TrigPoly2, M: int, tol: float) -> SlicedFactor:
    n2 = t.n2
    plus = np.zeros((M, n2 + 1), dtype=complex)
    minus = np.zeros((M, n2 + 1), dtype=complex)
    means = np.zeros(M, dtype=complex)
    for m in range(M):
        z = complex(np.exp((2j * math.pi) * m / M))
        pair = spectral_factor(t.slice_x(z), tol)
        for i in range(n2 + 1):
            plus[m, i] = pair.plus.coeff(i)
            minus[m, i] = pair.minus.coeff(-i)
        means[m] = pair.log_mean
    # sign coherence: flip any slice whose jump from its predecessor shrinks
    for m in range(1, M):
        keep = float(np.abs(plus[m] - plus[m - 1]).sum())
        flip = float(np.abs(plus[m] + plus[m - 1]).sum())
        if flip < keep:
            plus[m] = -plus[m]
            minus[m] = -minus[m]
    return SlicedFactor(plus, minus, means, t)


def slicewise_factor(t: TrigPoly2, M: int | None = None, tol: float = 1e-9) -> SlicedFactor:
    """Factor every x-slice of t on a grid of M slices (Re t > 0 required).

    M must be a power of two exceeding 2*oversample*n1 (oversample 4) so the
    slice family resolves the x-bandwidth.  Real positive t runs the array
    pipeline; other inputs factor slice by slice.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    _certify_positive_real_part(t)
    n1 = t.n1
    if M is None:
        M = _pow2_at_least(max(64, 8 * _OVERSAMPLE * max(n1, 1)))
    if M < 1 or (M & (M - 1)) != 0:
        raise PreconditionError("M must be a positive power of two")
    if n1 > 0 and M <= 2 * _OVERSAMPLE * n1:
        raise PreconditionError(
            f"M={M} too small: need M > {2 * _OVERSAMPLE * n1} for n1={n1}"
        )
    if t == t.star():
        return _fast_sliced(t, M, tol)
    return _slow_sliced(t, M, tol)


def factor_approximant(sf: SlicedFactor, N: int) -> TrigPoly2:
    """Dirichlet smoothing in x of the slice family, truncated to |j| <= N.

    The slice coefficients are transformed across slices into x-frequency
    profiles; frequencies |j| <= N survive.  The result is supported on
    {-N..N} x {0..band}.
    """
    if N < 0:
        raise PreconditionError("window order must be >= 0")
    if sf.M <= 2 * N:
        raise AliasRisk(f"M={sf.M} slices cannot resolve window order N={N}")
    U = np.fft.fft(sf.plus_coeffs, axis=0) / sf.M
    out = {}
    for j in range(-N, N + 1):
        row = U[j % sf.M]
        for i in range(sf.band + 1):
            out[(j, i)] = complex(row[i])
    return TrigPoly2(out)


def _tail_grid(sf: SlicedFactor, n_keep: int, y_grid=None):
    """Values over the measurement grid of the slice family minus its
    order-n_keep smoothing.  Returns (tail array, x stride, y grid size)."""
    M, width = sf.plus_coeffs.shape
    if M <= 2 * n_keep:
        raise AliasRisk(f"M={M} slices cannot resolve window order N={n_keep}")
    Gy = y_grid or _pow2_at_least(max(32, 4 * width))
    if Gy <= 2 * sf.band:
        raise AliasRisk(f"y grid {Gy} cannot resolve band {sf.band}")
    U = np.fft.fft(sf.plus_coeffs, axis=0) / M
    masked = U.copy()
    masked[: n_keep + 1] = 0.0
    if n_keep >= 1:
        masked[M - n_keep :] = 0.0
    tailx = np.fft.ifft(masked, axis=0) * M
    stride = max(1, M // _X_GRID_CAP)
    sub = tailx[::stride]
    pad = np.zeros((sub.shape[0], Gy), dtype=complex)
    pad[:, :width] = sub
    return np.fft.ifft(pad, axis=1) * Gy, stride, Gy


def smoothing_distance(sf: SlicedFactor, N: int, y_grid=None) -> float:
    """Measured sup distance between the slice family and its order-N
    smoothing, over the slice x-points (subsampled) and a uniform y grid."""
    if N < 0:
        raise PreconditionError("window order must be >= 0")
    tail, _, _ = _tail_grid(sf, N, y_grid)
    return float(np.abs(tail).max())


def distance_profile(sf: SlicedFactor, n_max: int, y_grid=None) -> np.ndarray:
    """Measured smoothing distances for every order 0..n_max at once.

    dist[N] = max over the measurement grid of |S+ - S_N+|, built by
    accumulating x-frequency shells from the outside in (each shell is a
    rank-one update on the grid).
    """
    if n_max < 0:
        raise PreconditionError("n_max must be >= 0")
    tail, stride, Gy = _tail_grid(sf, n_max, y_grid)
    dist = np.empty(n_max + 1)
    dist[n_max] = float(np.abs(tail).max())
    if n_max == 0:
        return dist
    M, width = sf.plus_coeffs.shape
    U = np.fft.fft(sf.plus_coeffs, axis=0) / M
    idx = [s % M for s in range(1, n_max + 1)] + [(-s) % M for s in range(1, n_max + 1)]
    pad = np.zeros((2 * n_max, Gy), dtype=complex)
    pad[:, :width] = U[idx]
    rows = np.fft.ifft(pad, axis=1) * Gy
    xs = np.arange(0, M, stride) / M
    for N in range(n_max - 1, -1, -1):
        shell = N + 1
        phase = np.exp((2j * math.pi) * shell * xs)
        tail += phase[:, None] * rows[shell - 1][None, :]
        tail += np.conj(phase)[:, None] * rows[n_max + shell - 1][None, :]
        dist[N] = float(np.abs(tail).max())
    return dist


@dataclass(frozen=True)
class ConvergenceBudget:
    """Explicit smoothing order guaranteeing a requested accuracy.

    x_decay_rate is positivity_ratio / n1; slice_bound dominates every
    slice-factor sup norm over the working annulus (the one-variable bound
    constants evaluated with positivity ratio / 2e, annulus log bound
    + log 2, and sup norm + min/2); order is the smoothing order sufficient
    for accuracy eps.  y_degree_effective = max(n2, 1) keeps logs finite.
    """

    eps: float
    x_degree: int
    y_degree_effective: int
    positivity_ratio: float
    x_decay_rate: float
    slice_bound: float
    order: float


def convergence_budget(t: TrigPoly2, eps: float) -> ConvergenceBudget:
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    lo, hi = _certify_positive_real_part(t)
    scale = max(1.0, t.coeff_l1())
    _, sup_hi = sup_norm_certified(t, _BRACKET_WIDTH * scale)
    _, im_hi = max_abs_im_certified(t, _BRACKET_WIDTH * scale)
    n1 = t.n1
    n2e = max(t.n2, 1)
    rho = lo / (2.0 * _E * t.coeff_l1())
    theta = math.atan(im_hi / lo)
    tau = max(
        math.log(sup_hi) + 0.5 * hi,
        0.5 * math.pi + abs(math.log(0.5 * hi)),
    )
    # slice factors over the annulus: the positivity ratio shrinks by 2e,
    # the annulus log bound grows by log 2, the sup norm by min/2
    rho_g = rho / (2.0 * _E)
    tau_g = tau + math.log(2.0)
    sup_g = sup_hi + 0.5 * lo
    c_n = 1.0 + math.log(n2e + 1)
    cutoff_g = (n2e / rho_g) * math.log(n2e * tau_g / rho_g)
    zeta = c_n * math.exp(0.5 * theta) * math.sqrt(sup_g) * cutoff_g**theta
    if n1 == 0:
        return ConvergenceBudget(
            eps=eps,
            x_degree=0,
            y_degree_effective=n2e,
            positivity_ratio=rho,
            x_decay_rate=math.inf,
            slice_bound=zeta,
            order=0.0,
        )
    order = (n1 / rho) * math.log(
        2.0 * zeta * n1 * n2e ** (0.5 * math.pi) / (eps * rho)
    )
    return ConvergenceBudget(
        eps=eps,
        x_degree=n1,
        y_degree_effective=n2e,
        positivity_ratio=rho,
        x_decay_rate=rho / n1,
        slice_bound=zeta,
        order=max(order, 0.0),
    )


def envelope_bound(budget: ConvergenceBudget, N) -> float:
    """Guaranteed sup distance of the order-N smoothing from the family:
    2 * slice_bound * n2_eff^(pi/2) * exp(-N * sigma1) / sigma1."""
    if budget.x_degree == 0:
        return 0.0
    return (
        2.0
        * budget.slice_bound
        * budget.y_degree_effective ** (0.5 * math.pi)
        / budget.x_decay_rate
        * math.exp(-N * budget.x_decay_rate)
    )


@dataclass(frozen=True)
class GammaRow:
    z: complex
    re_lower: float
    re_threshold: float
    re_ok: bool
    sup_upper: float
    sup_threshold: float
    sup_ok: bool


@dataclass(frozen=True)
class ConvergenceReport:
    budget: ConvergenceBudget
    order: int
    distance: float
    distance_ok: bool
    gamma: tuple
    gamma_ok: bool

    @property
    def passed(self) -> bool:
        return self.distance_ok and self.gamma_ok


def _gamma_rows(t: TrigPoly2, lo: float, sup_hi: float, sigma1: float, slack: float):
    """Annulus slice checks: Re >= min/2 and sup <= sup + min/2 for the
    one-variable polynomial obtained by freezing x at radius e^u."""
    radii = (0.0,) if not math.isfinite(sigma1) else (-sigma1, 0.0, sigma1)
    rows = []
    for u in radii:
        r = math.exp(u)
        for a in range(8):
            z = r * complex(np.exp((2j * math.pi) * a / 8))
            g = t.slice_x(z)
            width = _BRACKET_WIDTH * max(1.0, g.coeff_l1())
            g_lo, _ = min_re_certified(g, width)
            _, g_hi = sup_norm_certified(g, width)
            re_thr = 0.5 * lo
            sup_thr = sup_hi + 0.5 * lo
            rows.append(
                GammaRow(
                    z=z,
                    re_lower=g_lo,
                    re_threshold=re_thr,
                    re_ok=bool(g_lo >= re_thr - width - slack),
                    sup_upper=g_hi,
                    sup_threshold=sup_thr,
                    sup_ok=bool(g_hi <= sup_thr + width + slack),
                )
            )
    return tuple(rows)


def verify_convergence(t: TrigPoly2, eps: float, M: int | None = None) -> ConvergenceReport:
    """Measures the order-ceil(budget) smoothing against the requested eps.

    Builds the slice family on a grid fine enough for the budget order,
    measures the sup distance at that order, and checks the annulus slice
    inequalities feeding the budget's constants.
    """
    budget = convergence_budget(t, eps)
    N = int(math.ceil(budget.order))
    cert_width = 1e-6 * max(1.0, t.coeff_l1())
    lo, _ = min_re_certified(t, cert_width)
    _, sup_hi = sup_norm_certified(t, cert_width)
    if M is None:
        M = _pow2_at_least(8 * max(_OVERSAMPLE * max(t.n1, 1), N + 1))
    sf = slicewise_factor(t, M, tol=min(1e-9, 0.001 * eps))
    distance = smoothing_distance(sf, N)
    rows = _gamma_rows(t, lo, sup_hi, budget.x_decay_rate, cert_width)
    return ConvergenceReport(
        budget=budget,
        order=N,
        distance=distance,
        distance_ok=bool(distance <= eps),
        gamma=rows,
        gamma_ok=all(r.re_ok and r.sup_ok for r in rows),
    )
