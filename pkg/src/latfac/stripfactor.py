"""End-to-end strip-constrained factorization pipelines.

Given strictly positive t whose frequency support fits the difference set of
a diagonal strip, produce a factor s supported inside the strip itself with
|s|^2 close to t.  Horizontal strips take a direct route through the slice
family; rational slopes reduce to horizontal strips by a unimodular change
of frequency basis; irrational slopes walk the convergents of the slope,
reduce against each rational stand-in, and lift containment back through
the strip-lift certificate.

Every acceptance is certified: exact integer arithmetic for containment,
certified brackets for the residual sup norm.  Slopes that the convergent
walk cannot serve within its budget produce BudgetExhausted with the full
per-convergent diagnostic trace rather than a silent loop.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExhausted,
    FreqOutsideStrip,
    NoConvergence,
    NumericalError,
    PrecisionExhausted,
    PreconditionError,
    StripTooNarrow,
    Undecidable,
)
from .factor2d import (
    ConvergenceBudget,
    convergence_budget,
    factor_approximant,
    slicewise_factor,
)
from .lattice import (
    IDENTITY_MAP,
    LatticeStrip,
    ModularMap,
    RealAlpha,
    approximation_gap,
    certify_strip_lift,
    convergent_walk,
    reducing_matrix,
    sl2_apply_poly,
    strip_contains,
    strip_to_json_dict,
)
from .trigpoly import TrigPoly2, _pow2_at_least, poly_to_json_dict, sup_norm_certified
from .winding import max_grid


@dataclass(frozen=True)
class ConvergentTrial:
    """One convergent's fate in the irrational pipeline."""

    p: int
    q: int
    gap: float | None
    outcome: str  # containment | threshold | lift | undecidable | accepted
    n1: int | None = None
    threshold: float | None = None


@dataclass(frozen=True)
class StripFactorResult:
    """A certified strip-constrained factor.

    factor is supported in strip; error_upper is a certified upper bound on
    ||t - |factor|^2||_inf; matrix and shift record the reduction used
    (identity and the band half-width for the axis route); growth_ratio is
    n1(factor)/(g22^2 log g22), NaN when |g22| < 2; trace lists the
    convergents tried by the irrational route.
    """

    factor: TrigPoly2
    strip: LatticeStrip
    error_upper: float
    budget: ConvergenceBudget
    matrix: ModularMap
    shift: int
    growth_ratio: float
    trace: tuple = ()


def _largest_int_below(x: Fraction) -> int:
    return math.ceil(x) - 1


def _residual_upper(t: TrigPoly2, s: TrigPoly2) -> float:
    r = t - s * s.star()
    if r.is_zero():
        return 0.0
    # the coefficient l1 norm certifies the sup from above on its own; the
    # branch-and-bound bracket only pays off when the residual is large
    # enough to threaten the error budget and the degree keeps the search
    # tractable
    l1 = r.coeff_l1()
    if l1 <= 1e-4 or max(r.n1, r.n2) > 64:
        return l1
    return sup_norm_certified(r, max(1e-12, 0.01 * l1))[1]


def _sup_upper(t: TrigPoly2) -> float:
    # any certified upper bound of ||t||_inf serves the error budget; supports
    # that peak along a whole line defeat tight branch-and-bound brackets, so
    # degrade to a loose bracket and finally to the coefficient l1 bound
    l1 = max(1.0, t.coeff_l1())
    try:
        return sup_norm_certified(t, 1e-6 * l1)[1]
    except NumericalError:
        pass
    try:
        return sup_norm_certified(t, 0.05 * l1)[1]
    except NumericalError:
        return t.coeff_l1()


def _check_invariants(t, s, strip, eps, err):
    for pt in s.freqs:
        if not strip_contains(strip, pt):
            raise NumericalError(f"factor frequency {pt} escaped the strip")
    bound = (2.0 * _sup_upper(t) + eps) * eps
    if err > bound:
        raise NumericalError(
            f"residual bound violated: {err:.3e} > (2||t||+eps)*eps = {bound:.3e}"
        )


def _axis_core(t: TrigPoly2, beta: Fraction, eps: float, budget=None):
    """Shared axis machinery: slice family, smoothing, monomial shift.
    Returns (s, band half-width n, budget)."""
    n = _largest_int_below(beta)
    if t.n2 > 2 * n:
        raise StripTooNarrow(
            f"band half-width {n} admits y-degree <= {2 * n}, got {t.n2}"
        )
    if budget is None:
        budget = convergence_budget(t, eps)
    N = math.ceil(budget.order)
    M = _pow2_at_least(8 * max(4 * max(t.n1, 1), N + 1))
    if M > max_grid():
        raise NoConvergence(f"slice grid {M} would exceed the grid cap")
    sf = slicewise_factor(t, M, tol=min(1e-9, 0.001 * eps))
    ap = factor_approximant(sf, N)
    s = TrigPoly2({(0, -n): 1.0}) * ap
    return s, n, budget


def strip_factor_axis(t: TrigPoly2, beta, eps: float) -> StripFactorResult:
    """Factor into the horizontal strip F(0, beta).

    Needs freq(t) inside the difference set, i.e. y-degree at most 2n with
    n the largest integer below beta.  The factor is the shifted smoothing
    e_{0,-n} * S_N+ at the budget order N.
    """
    beta = Fraction(beta)
    if beta <= 0:
        raise PreconditionError("beta must be positive")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    s, n, budget = _axis_core(t, beta, eps)
    strip = LatticeStrip(0, beta)
    err = _residual_upper(t, s)
    _check_invariants(t, s, strip, eps, err)
    return StripFactorResult(
        factor=s,
        strip=strip,
        error_upper=err,
        budget=budget,
        matrix=IDENTITY_MAP,
        shift=n,
        growth_ratio=math.nan,
        trace=(),
    )


class _ScreenedOut(Exception):
    """Internal: the support-box prediction already exceeds the lift cap."""

    def __init__(self, n1_pred):
        super().__init__(f"predicted x-degree {n1_pred} exceeds the lift cap")
        self.n1_pred = n1_pred


def _rational_core(
    t: TrigPoly2, alpha: Fraction, beta: Fraction, eps: float, n1_cap=None
) -> StripFactorResult:
    p, q = alpha.numerator, alpha.denominator
    m_beta = _largest_int_below(beta * q)
    for (j, k) in t.freqs:
        if abs(k * q - j * p) > 2 * m_beta:
            raise FreqOutsideStrip(
                f"frequency {(j, k)} outside the strip difference set"
            )
    g = reducing_matrix(alpha)
    gt = sl2_apply_poly(g, t)
    budget = convergence_budget(gt, eps)
    N = math.ceil(budget.order)
    if n1_cap is not None:
        # where the mapped factor's support box lands before any heavy work:
        # the smoothing spans x-degrees -N..N and the shifted band, and the
        # inverse map sends (j', k') to x-degree g22*j' - g12*k'
        n = _largest_int_below(beta * q)
        pred = max(
            abs(g.g22 * jj - g.g12 * kk)
            for jj in (-N, N)
            for kk in (-n, gt.n2 - n)
        )
        if pred >= n1_cap:
            raise _ScreenedOut(pred)
    s_axis, n, budget = _axis_core(gt, beta * q, eps, budget=budget)
    s = sl2_apply_poly(g.inverse(), s_axis)
    strip = LatticeStrip(alpha, beta)
    err = _residual_upper(t, s)
    _check_invariants(t, s, strip, eps, err)
    if q >= 2:
        growth = s.n1 / (q * q * math.log(q))
    else:
        growth = math.nan
    return StripFactorResult(
        factor=s,
        strip=strip,
        error_upper=err,
        budget=budget,
        matrix=g,
        shift=n,
        growth_ratio=growth,
        trace=(),
    )


def _poly_reflect(t: TrigPoly2) -> TrigPoly2:
    return TrigPoly2({(k, j): c for (j, k), c in t.coeffs.items()})


def strip_factor_rational(t: TrigPoly2, alpha, beta, eps: float) -> StripFactorResult:
    """Factor into F(alpha, beta) for an exact rational slope.

    Slopes beyond +-1 are handled by reflecting coordinates, running the
    reduced problem on F(1/alpha, beta/|alpha|), and reflecting back.
    """
    if isinstance(alpha, float):
        raise PreconditionError("slope must be exact: pass Fraction or int")
    if isinstance(alpha, RealAlpha):
        raise PreconditionError("real slopes take the irrational pipeline")
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    if beta <= 0:
        raise PreconditionError("beta must be positive")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if abs(alpha) <= 1:
        return _rational_core(t, alpha, beta, eps)
    inner = _rational_core(_poly_reflect(t), 1 / alpha, beta / abs(alpha), eps)
    s = _poly_reflect(inner.factor)
    strip = LatticeStrip(alpha, beta)
    err = _residual_upper(t, s)
    _check_invariants(t, s, strip, eps, err)
    return StripFactorResult(
        factor=s,
        strip=strip,
        error_upper=err,
        budget=inner.budget,
        matrix=inner.matrix,
        shift=inner.shift,
        growth_ratio=inner.growth_ratio,
        trace=(),
    )


def _interval_abs_pair(lo: Fraction, hi: Fraction):
    if lo <= 0 <= hi:
        return Fraction(0), max(-lo, hi)
    if hi < 0:
        return -hi, -lo
    return lo, hi


def strip_factor_irrational(
    t: TrigPoly2, alpha: RealAlpha, beta, eps: float, max_convergents: int = 8
) -> StripFactorResult:
    """Factor into F(alpha, beta) for a certified irrational slope in (0,1)
    (or (-1,0)) by walking the slope's convergents.

    Each convergent p/q is tried as a rational stand-in with the narrowed
    width beta~ = (beta + w)/2, w the minimal feasible half-width for t's
    support; acceptance needs the mapped factor's x-degree below the lift
    threshold (beta - beta~)/|alpha - p/q|, and every factor frequency is
    lifted into F(alpha, beta) by the strip-lift certificate.  Exhausting
    max_convergents raises BudgetExhausted carrying the trial trace.
    """
    if not isinstance(alpha, RealAlpha):
        raise PreconditionError("slope must be a RealAlpha enclosure")
    beta = Fraction(beta)
    if beta <= 0:
        raise PreconditionError("beta must be positive")
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    if max_convergents < 1:
        raise PreconditionError("max_convergents must be >= 1")
    lo, hi = alpha.interval()
    if not ((0 < lo and hi < 1) or (-1 < lo and hi < 0)):
        raise PreconditionError("need certified 0 < |alpha| < 1")
    # minimal feasible half-width from t's support, certified from above
    dev_hi = Fraction(0)
    for (j, k) in t.freqs:
        a, b = k - j * hi, k - j * lo
        if j < 0:
            a, b = k - j * lo, k - j * hi
        d_lo, d_hi = _interval_abs_pair(a, b)
        if d_lo >= 2 * beta:
            raise FreqOutsideStrip(
                f"frequency {(j, k)} outside the strip difference set"
            )
        if d_hi >= 2 * beta:
            raise Undecidable(
                f"difference-set membership of {(j, k)} straddles the boundary"
            )
        dev_hi = max(dev_hi, d_hi)
    beta_t = (beta + dev_hi / 2) / 2
    margin = beta - beta_t
    trace = []
    # lazy walk: the budget is an upper limit, so an early acceptance must
    # not depend on later convergents being computable from the digits
    walk = convergent_walk(alpha)
    for _ in range(max_convergents):
        try:
            p, q = next(walk)
        except PrecisionExhausted as ex:
            raise PrecisionExhausted(
                f"digits pin only {len(trace)} convergents of the "
                f"{max_convergents} budgeted: {ex}"
            ) from ex
        at = Fraction(p, q)
        gap = None
        if q >= 2:
            gap = approximation_gap(alpha, reducing_matrix((p, q)))
        d_lo, d_hi = _interval_abs_pair(lo - at, hi - at)
        thr_lo = margin / d_hi  # certified lower end of the lift threshold
        try:
            res = _rational_core(t, at, beta_t, eps, n1_cap=thr_lo)
        except (FreqOutsideStrip, StripTooNarrow):
            trace.append(ConvergentTrial(p, q, gap, "containment"))
            continue
        except _ScreenedOut as ex:
            trace.append(
                ConvergentTrial(
                    p, q, gap, "threshold", n1=ex.n1_pred, threshold=float(thr_lo)
                )
            )
            continue
        n1s = res.factor.n1
        if n1s >= thr_lo:
            # short of the certified side of the lift threshold
            trace.append(
                ConvergentTrial(p, q, gap, "threshold", n1=n1s, threshold=float(thr_lo))
            )
            continue
        try:
            lifted = all(
                certify_strip_lift(-p, q, alpha, beta, beta_t, pt)
                for pt in res.factor.freqs
            )
        except Undecidable:
            trace.append(
                ConvergentTrial(p, q, gap, "undecidable", n1=n1s, threshold=float(thr_lo))
            )
            continue
        if not lifted:
            trace.append(
                ConvergentTrial(p, q, gap, "lift", n1=n1s, threshold=float(thr_lo))
            )
            continue
        trace.append(
            ConvergentTrial(p, q, gap, "accepted", n1=n1s, threshold=float(thr_lo))
        )
        return StripFactorResult(
            factor=res.factor,
            strip=LatticeStrip(alpha, beta),
            error_upper=res.error_upper,
            budget=res.budget,
            matrix=res.matrix,
            shift=res.shift,
            growth_ratio=res.growth_ratio,
            trace=tuple(trace),
        )
    raise BudgetExhausted(
        f"no convergent of the slope certified the strip within "
        f"{max_convergents} trials",
        trace=trace,
    )


@dataclass(frozen=True)
class VerifyReport:
    """Independent recheck of a pipeline result."""

    error_upper: float
    error_bound: float
    error_ok: bool
    containment: tuple  # ((j, k), bool) pairs
    containment_ok: bool

    @property
    def passed(self) -> bool:
        return self.error_ok and self.containment_ok


def verify_result(t: TrigPoly2, r: StripFactorResult) -> VerifyReport:
    """Recompute |s|^2 and the residual bracket from scratch and re-test
    every factor frequency against the strip.  Reports, never raises, so
    corrupted results are flagged rather than crashed on."""
    err = _residual_upper(t, r.factor)
    eps = r.budget.eps
    bound = (2.0 * _sup_upper(t) + eps) * eps
    rows = []
    for pt in sorted(r.factor.freqs):
        try:
            ok = strip_contains(r.strip, pt)
        except Undecidable:
            ok = False
        rows.append((pt, bool(ok)))
    return VerifyReport(
        error_upper=err,
        error_bound=bound,
        error_ok=bool(err <= bound),
        containment=tuple(rows),
        containment_ok=all(ok for _, ok in rows),
    )


def result_to_json_dict(r: StripFactorResult) -> dict:
    a_diag = None if math.isnan(r.growth_ratio) else r.growth_ratio
    return {
        "factor": poly_to_json_dict(r.factor),
        "strip": strip_to_json_dict(r.strip),
        "error_upper": r.error_upper,
        "g": [[r.matrix.g11, r.matrix.g12], [r.matrix.g21, r.matrix.g22]],
        "n_shift": r.shift,
        "a_diag": a_diag,
        "convergent_trace": [
            {
                "p": c.p,
                "q": c.q,
                "gap": c.gap,
                "outcome": c.outcome,
                "n1": c.n1,
                "threshold": c.threshold,
            }
            for c in r.trace
        ],
    }
