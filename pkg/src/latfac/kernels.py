"""Dirichlet, Hilbert, and analytic kernels as frequency masks.

A kernel of order N is the trigonometric polynomial whose Fourier
coefficients are the mask values below; "applying" a kernel to a polynomial
is coefficientwise multiplication by the mask, which equals convolution with
the kernel on the circle.

Mask tables (j is the frequency):

- DIRICHLET        1 on |j| <= N
- HILBERT          +1 on 1..N, -1 on -N..-1, 0 at j=0
- ANALYTIC_PLUS    1/2 at j=0, 1 on 1..N          ((Dirichlet + Hilbert)/2)
- ANALYTIC_MINUS   1/2 at j=0, 1 on -N..-1
- ONESIDED_PLUS    1 on 0..N                      (sharp one-sided truncation)
- ONESIDED_MINUS   1 on -N..0

L1 norms are integrated numerically from closed-form kernel values, with
quadrature panels split at sign changes located by bisection.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PreconditionError
from .trigpoly import TrigPoly1


class KernelKind(enum.Enum):
    DIRICHLET = "dirichlet"
    HILBERT = "hilbert"
    ANALYTIC_PLUS = "analytic+"
    ANALYTIC_MINUS = "analytic-"
    ONESIDED_PLUS = "onesided+"
    ONESIDED_MINUS = "onesided-"


@dataclass(frozen=True)
class Kernel:
    kind: KernelKind
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise PreconditionError("kernel order must be >= 0")


def mask_value(kernel: Kernel, j: int) -> float:
    N = kernel.order
    kind = kernel.kind
    if kind is KernelKind.DIRICHLET:
        return 1.0 if abs(j) <= N else 0.0
    if kind is KernelKind.HILBERT:
        if 1 <= j <= N:
            return 1.0
        if -N <= j <= -1:
            return -1.0
        return 0.0
    if kind is KernelKind.ANALYTIC_PLUS:
        if j == 0:
            return 0.5
        return 1.0 if 1 <= j <= N else 0.0
    if kind is KernelKind.ANALYTIC_MINUS:
        if j == 0:
            return 0.5
        return 1.0 if -N <= j <= -1 else 0.0
    if kind is KernelKind.ONESIDED_PLUS:
        return 1.0 if 0 <= j <= N else 0.0
    if kind is KernelKind.ONESIDED_MINUS:
        return 1.0 if -N <= j <= 0 else 0.0
    raise PreconditionError(f"unknown kernel kind {kind!r}")


def apply_mask(kernel: Kernel, t: TrigPoly1) -> TrigPoly1:
    """Coefficientwise product with the mask (= convolution with the kernel)."""
    return TrigPoly1(
        {j: c * mask_value(kernel, j) for j, c in t.coeffs.items()}
    )


def kernel_poly(kernel: Kernel) -> TrigPoly1:
    """The kernel itself as a polynomial (its coefficients are the mask)."""
    N = kernel.order
    return TrigPoly1(
        {j: mask_value(kernel, j) for j in range(-N, N + 1)}
    )


# ---------------------------------------------------------------------------
# Closed-form kernel values.  d_N and s_N are the real building blocks:
#   d_N(x) = sin((2N+1) pi x)/sin(pi x)          (Dirichlet)
#   s_N(x) = sum_{j=1..N} sin(2 pi j x) = sin(N pi x) sin((N+1) pi x)/sin(pi x)
# The Hilbert kernel is 2i*s_N; |analytic kernel| = sqrt(d^2 + 4 s^2)/2;
# the one-sided truncation has modulus |sin((N+1) pi x)| / |sin(pi x)|.

_NEAR_POLE = 1e-9


def _dirichlet_vals(N, x):
    x = np.asarray(x, dtype=float)
    den = np.sin(np.pi * x)
    near = np.abs(den) < _NEAR_POLE
    safe = np.where(near, 1.0, den)
    out = np.sin((2 * N + 1) * np.pi * x) / safe
    if np.any(near):
        xs = x[near]
        direct = 1.0 + 2.0 * sum(np.cos(2 * np.pi * j * xs) for j in range(1, N + 1))
        out[near] = direct
    return out


def _sinsum_vals(N, x):
    x = np.asarray(x, dtype=float)
    if N == 0:
        return np.zeros_like(x)
    den = np.sin(np.pi * x)
    near = np.abs(den) < _NEAR_POLE
    safe = np.where(near, 1.0, den)
    out = np.sin(N * np.pi * x) * np.sin((N + 1) * np.pi * x) / safe
    if np.any(near):
        xs = x[near]
        out[near] = sum(np.sin(2 * np.pi * j * xs) for j in range(1, N + 1))
    return out


def _onesided_signed_vals(N, x):
    # signed value whose absolute value is the one-sided truncation modulus
    x = np.asarray(x, dtype=float)
    den = np.sin(np.pi * x)
    near = np.abs(den) < _NEAR_POLE
    safe = np.where(near, 1.0, den)
    out = np.sin((N + 1) * np.pi * x) / safe
    if np.any(near):
        xs = x[near]
        out[near] = np.abs(
            sum(np.exp(2j * np.pi * j * xs) for j in range(0, N + 1))
        )
    return out


def _bisect_zeros(f, n_scan: int):
    """Zeros of f in (0,1) located by sign-change bisection on a scan grid.

    All brackets are bisected simultaneously; a midpoint that lands exactly
    on a zero freezes that bracket's right endpoint there.
    """
    xs = np.linspace(0.0, 1.0, n_scan + 1)[1:-1]
    vals = f(xs)
    zeros = [float(z) for z in xs[vals == 0.0]]
    idx = np.nonzero(vals[:-1] * vals[1:] < 0.0)[0]
    if len(idx) == 0:
        return zeros
    a, b = xs[idx].copy(), xs[idx + 1].copy()
    fa = vals[idx].copy()
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = f(m)
        go_right = fa * fm > 0.0
        b = np.where(go_right, b, m)
        a = np.where(go_right, m, a)
        fa = np.where(go_right, fm, fa)
    return zeros + [float(z) for z in 0.5 * (a + b)]


_GL_CACHE: dict = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _integrate_abs(f, breakpoints, tol):
    pts = sorted(set([0.0, 1.0] + [float(b) for b in breakpoints]))
    a = np.array(pts[:-1])
    b = np.array(pts[1:])
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    prev = None
    for order in (16, 32, 64, 128, 256):
        x, w = _gauss_legendre(order)
        xx = mid[:, None] + half[:, None] * x[None, :]
        vals = np.abs(f(xx.ravel())).reshape(xx.shape)
        total = float(np.sum(half[:, None] * w[None, :] * vals))
        if prev is not None and abs(total - prev) <= 0.1 * tol:
            return total
        prev = total
    raise NumericalError("kernel quadrature did not stabilize")


def kernel_l1_norm(kernel: Kernel, tol: float = 1e-8) -> float:
    """Numerical integral of |kernel(x)| over [0,1].

    Quadrature panels are split at the kernel's sign changes (for the
    analytic kinds, at the zeros of both real building blocks), each located
    by bisection; panel rules are Gauss-Legendre with doubling order.
    """
    N = kernel.order
    kind = kernel.kind
    scan = 16 * (2 * N + 2)
    if kind is KernelKind.DIRICHLET:
        if N == 0:
            return 1.0
        f = lambda x: _dirichlet_vals(N, x)
        return _integrate_abs(f, _bisect_zeros(f, scan), tol)
    if kind is KernelKind.HILBERT:
        if N == 0:
            return 0.0
        f = lambda x: 2.0 * _sinsum_vals(N, x)
        return _integrate_abs(f, _bisect_zeros(f, scan), tol)
    if kind in (KernelKind.ANALYTIC_PLUS, KernelKind.ANALYTIC_MINUS):
        if N == 0:
            return 0.5
        f = lambda x: 0.5 * np.sqrt(
            _dirichlet_vals(N, x) ** 2 + 4.0 * _sinsum_vals(N, x) ** 2
        )
        marks = _bisect_zeros(lambda x: _dirichlet_vals(N, x), scan)
        marks += _bisect_zeros(lambda x: _sinsum_vals(N, x), scan)
        return _integrate_abs(f, marks, tol)
    if kind in (KernelKind.ONESIDED_PLUS, KernelKind.ONESIDED_MINUS):
        if N == 0:
            return 1.0
        f = lambda x: _onesided_signed_vals(N, x)
        return _integrate_abs(f, _bisect_zeros(f, scan), tol)
    raise PreconditionError(f"unknown kernel kind {kind!r}")


def l1_bound(kernel: Kernel):
    """The stated L1 bound for this kernel, or None where no bound is stated.

    Dirichlet: 1 + log(2N+1); analytic: 3/2 + log N; one-sided truncation:
    1 + log(N+1); Hilbert: 1 + 2 log N.  The log-form bounds need N >= 1.
    """
    N = kernel.order
    kind = kernel.kind
    if kind is KernelKind.DIRICHLET:
        return 1.0 + math.log(2 * N + 1)
    if kind in (KernelKind.ONESIDED_PLUS, KernelKind.ONESIDED_MINUS):
        return 1.0 + math.log(N + 1)
    if N < 1:
        return None
    if kind is KernelKind.HILBERT:
        return 1.0 + 2.0 * math.log(N)
    if kind in (KernelKind.ANALYTIC_PLUS, KernelKind.ANALYTIC_MINUS):
        return 1.5 + math.log(N)
    raise PreconditionError(f"unknown kernel kind {kind!r}")


@dataclass(frozen=True)
class L1Report:
    kernel: Kernel
    value: float
    bound: float | None
    satisfied: bool | None


def l1_report(kernel: Kernel, tol: float = 1e-8) -> L1Report:
    """Quadrature value next to the stated bound.

    The bound is reported, not enforced: it is known to fail for the Hilbert
    kernel at N=1 (value 4/pi = 1.2732 vs stated bound 1.0) and holds for all
    N >= 2; callers that need the bound enforced assert on `satisfied`.
    """
    value = kernel_l1_norm(kernel, tol)
    bound = l1_bound(kernel)
    ok = None if bound is None else bool(value <= bound + tol)
    return L1Report(kernel=kernel, value=value, bound=bound, satisfied=ok)
