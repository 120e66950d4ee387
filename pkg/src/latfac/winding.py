"""Winding number and continuous branch logarithm on the unit circle.

A nonvanishing circle function f has an integer winding number W(f); when
W(f) = 0 it has a continuous logarithm, unique once a branch is fixed at the
base point x=0.  Both are computed from uniform samples with adaptive phase
unwrapping: the grid doubles until consecutive phase jumps are safely inside
(-0.9 pi, 0.9 pi) and the result is stable under one more doubling.

The grid is capped by the LATFAC_MAX_GRID environment variable (default
2**22); hitting the cap raises NoConvergence, the signature of a function
passing too close to zero for its phase to be tracked.
"""

import math
import os

import numpy as np

from .errors import (
    NoConvergence,
    NonzeroWinding,
    NotInvertible,
    PreconditionError,
)
from .trigpoly import (
    CircleSamples,
    TrigPoly1,
    _pow2_at_least,
    from_samples,
    min_re_certified,
    to_samples,
)

_DEFAULT_MAX_GRID = 1 << 22
_JUMP_GATE = 0.9 * math.pi


def max_grid() -> int:
    """Grid-size cap, read from LATFAC_MAX_GRID each call."""
    raw = os.environ.get("LATFAC_MAX_GRID")
    if raw is None:
        return _DEFAULT_MAX_GRID
    try:
        cap = int(raw)
    except ValueError as exc:
        raise PreconditionError(f"LATFAC_MAX_GRID is not an integer: {raw!r}") from exc
    if cap < 8:
        raise PreconditionError("LATFAC_MAX_GRID must be at least 8")
    return cap


def _initial_grid(f: TrigPoly1, floor: int = 0) -> int:
    return _pow2_at_least(max(64, 8 * (f.degree + 1), floor))


def certify_invertible(f: TrigPoly1):
    """Certified bracket (lo, hi) of min |f|^2; NotInvertible if lo <= 0.

    Conservative on purpose: a function whose modulus cannot be bounded away
    from zero by the certified bracket is treated as not invertible even if
    its true minimum is a tiny positive number.
    """
    r = f.abs_squared()
    scale = max(1.0, r.coeff_l1())
    for width in (1e-6 * scale, 1e-10 * scale):
        lo, hi = min_re_certified(r, width)
        if lo > 0.0:
            return lo, hi
    raise NotInvertible(
        f"cannot certify min |f|^2 > 0 (bracket [{lo:.3e}, {hi:.3e}])"
    )


def _principal_diffs(phases):
    d = np.diff(phases, append=phases[:1])
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def winding_number(f: TrigPoly1) -> int:
    """Total phase change of f around the circle, in turns."""
    certify_invertible(f)
    cap = max_grid()
    M = _initial_grid(f)
    prev = None
    while M <= cap:
        vals = to_samples(f, M).values
        d = _principal_diffs(np.angle(vals))
        if float(np.max(np.abs(d))) < _JUMP_GATE:
            w_float = float(np.sum(d)) / (2.0 * math.pi)
            w = int(round(w_float))
            if abs(w_float - w) < 0.1:
                if prev == w:
                    return w
                prev = w
            else:
                prev = None
        else:
            prev = None
        M *= 2
    raise NoConvergence(
        f"winding number did not stabilize below grid cap {cap}"
    )


def winding_number_by_ratios(f: TrigPoly1, M: int | None = None) -> int:
    """Second route: sum of principal logarithms of successive sample ratios.

    W = (1/2 pi i) * sum_m Log(f(x_{m+1})/f(x_m)) on a single grid, exact as
    soon as every ratio stays off the negative real axis.  Used as a
    cross-check of winding_number; no adaptivity beyond the jump gate.
    """
    certify_invertible(f)
    if M is None:
        M = _pow2_at_least(max(256, 16 * (f.degree + 1)))
    vals = to_samples(f, M).values
    ratios = np.roll(vals, -1) / vals
    logs = np.log(ratios)
    if float(np.max(np.abs(logs.imag))) >= _JUMP_GATE:
        raise NoConvergence(f"ratio route saw a phase jump >= 0.9 pi at M={M}")
    total = complex(np.sum(logs))
    w_float = total.imag / (2.0 * math.pi)
    w = int(round(w_float))
    if abs(w_float - w) >= 0.1 or abs(total.real) > 1e-6 * M:
        raise NoConvergence("ratio route residual too large")
    return w


class BranchLog:
    """Samples of a continuous logarithm of a zero-winding circle function.

    values[m] is the branch log at x = m/M: real part log|f|, imaginary part
    the unwrapped argument, anchored at the principal branch at x=0 (base).
    source keeps the sampled function so consumers can refine the grid.
    """

    __slots__ = ("M", "values", "base", "source")

    def __init__(self, values, base: complex, source: TrigPoly1):
        v = np.asarray(values, dtype=complex)
        if v.ndim != 1 or v.size < 1 or (v.size & (v.size - 1)) != 0:
            raise PreconditionError("log sample count must be a power of two")
        v.flags.writeable = False
        self.values = v
        self.M = v.size
        self.base = complex(base)
        self.source = source


def _unwrap_candidate(f: TrigPoly1, M: int):
    """One grid's unwrapped log samples, or None when the jump gate fails."""
    vals = to_samples(f, M).values
    phases = np.angle(vals)
    d = _principal_diffs(phases)
    if float(np.max(np.abs(d))) >= _JUMP_GATE:
        return None
    w = int(round(float(np.sum(d)) / (2.0 * math.pi)))
    theta = phases[0] + np.concatenate([[0.0], np.cumsum(d[:-1])])
    return np.log(np.abs(vals)) + 1j * theta, w


def branch_log(f: TrigPoly1, min_grid: int = 0) -> BranchLog:
    """Continuous branch of log f on an adaptive sample grid.

    The branch is fixed by the principal logarithm at x=0.  Acceptance needs
    the jump gate, zero winding, and agreement with the half-resolution grid
    on the shared points to 1e-10; the finer grid is returned.
    """
    certify_invertible(f)
    cap = max_grid()
    M = _initial_grid(f, min_grid)
    prev = None
    while M <= cap:
        cand = _unwrap_candidate(f, M)
        if cand is None:
            prev = None
            M *= 2
            continue
        logv, w = cand
        if w != 0:
            raise NonzeroWinding(f"winding number {w} != 0, no continuous log")
        if prev is not None:
            prev_logv = prev
            if float(np.max(np.abs(logv[::2] - prev_logv))) <= 1e-10:
                return BranchLog(logv, logv[0], f)
        prev = logv
        M *= 2
    raise NoConvergence(f"branch log did not stabilize below grid cap {cap}")


def _project_raw(L: BranchLog, sign: int, N: int) -> TrigPoly1:
    if sign not in (1, -1):
        raise PreconditionError("sign must be +1 or -1")
    if N < 0:
        raise PreconditionError("window size must be >= 0")
    spectrum = np.fft.fft(L.values) / L.M
    window = range(0, N + 1) if sign == 1 else range(-N, 1)
    out = {j: spectrum[j % L.M] for j in window}
    if 0 in out:
        out[0] = 0.5 * out[0]
    return TrigPoly1(out)


def analytic_projection(L: BranchLog, sign: int, N: int, tol: float = 1e-11) -> TrigPoly1:
    """One-sided Fourier projection of the branch log, j=0 term halved.

    Keeps frequencies 0..N (sign +1) or -N..0 (sign -1) of the sampled log,
    doubling the grid until the windowed coefficients stabilize to tol.
    """
    cap = max_grid()
    cur = L
    p = _project_raw(cur, sign, N)
    while 2 * cur.M <= cap:
        finer = branch_log(cur.source, min_grid=2 * cur.M)
        q = _project_raw(finer, sign, N)
        if p.allclose(q, tol):
            return q
        cur, p = finer, q
    raise NoConvergence(
        f"analytic projection did not stabilize below grid cap {cap}"
    )


def full_projection(L: BranchLog, N: int, tol: float = 1e-11) -> TrigPoly1:
    """Two-sided truncated Fourier series of the branch log on |j| <= N."""
    plus = analytic_projection(L, 1, N, tol)
    minus = analytic_projection(L, -1, N, tol)
    return plus + minus
