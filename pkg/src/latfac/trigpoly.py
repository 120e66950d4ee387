"""Sparse trigonometric polynomials in one and two variables.

Coefficients are stored as hash maps keyed by integer frequencies (1D) or
frequency pairs (2D).  Construction canonicalizes by dropping entries whose
magnitude is below 1e-300; any coarser truncation is an explicit user call.

Certified extrema (sup norm, min of the real part) are computed by grid
sampling plus a Lipschitz bound, refined until the bracket width meets the
requested tolerance.  Brackets are rigorous up to double-precision rounding
of the evaluations themselves.
"""

import math
from types import MappingProxyType

import numpy as np

from ._conv import convolve1, convolve2
from .errors import AliasRisk, NumericalError, PreconditionError

_DROP = 1e-300
TWO_PI = 2.0 * math.pi


def _cleaned(items):
    return {k: complex(v) for k, v in items if abs(v) >= _DROP}


class TrigPoly1:
    """A trigonometric polynomial sum_j c_j e^(2*pi*i*j*x) with finite support."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        self._c = _cleaned(coeffs.items()) if coeffs else {}

    @classmethod
    def _raw(cls, d: dict):
        # internal: d already canonical
        obj = cls.__new__(cls)
        obj._c = d
        return obj

    @classmethod
    def monomial(cls, j: int, c=1.0):
        return cls({int(j): c})

    @classmethod
    def const(cls, c):
        return cls({0: c})

    @property
    def coeffs(self):
        return MappingProxyType(self._c)

    def coeff(self, j: int) -> complex:
        return self._c.get(j, 0j)

    @property
    def freqs(self):
        return tuple(sorted(self._c))

    @property
    def n_plus(self) -> int:
        return max((j for j in self._c if j > 0), default=0)

    @property
    def n_minus(self) -> int:
        return max((-j for j in self._c if j < 0), default=0)

    @property
    def degree(self) -> int:
        return max(self.n_plus, self.n_minus)

    def is_zero(self) -> bool:
        return not self._c

    def __len__(self):
        return len(self._c)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TrigPoly1.const(other)
        if not isinstance(other, TrigPoly1):
            return NotImplemented
        out = dict(self._c)
        for j, c in other._c.items():
            out[j] = out.get(j, 0j) + c
        return TrigPoly1(out)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly1._raw({j: -c for j, c in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TrigPoly1.const(other)
        if not isinstance(other, TrigPoly1):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return TrigPoly1({j: c * other for j, c in self._c.items()})
        if not isinstance(other, TrigPoly1):
            return NotImplemented
        return TrigPoly1._raw(convolve1(self._c, other._c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TrigPoly1):
            return NotImplemented
        return self._c == other._c

    __hash__ = None

    def __repr__(self):
        if not self._c:
            return "TrigPoly1(0)"
        parts = [f"{c:.6g}*e_{j}" for j, c in sorted(self._c.items())]
        return "TrigPoly1(" + " + ".join(parts) + ")"

    def star(self):
        """Pointwise complex conjugate of the function (coefficient reflection)."""
        return TrigPoly1._raw({-j: c.conjugate() for j, c in self._c.items()})

    def abs_squared(self):
        """t * conj(t); real-valued, frequencies in freq(t) - freq(t)."""
        return self * self.star()

    def real_part(self):
        """The polynomial whose values are Re t(x)."""
        return (self + self.star()) * 0.5

    def imag_part(self):
        """The polynomial whose values are Im t(x)."""
        return (self - self.star()) * (-0.5j)

    def conj_coeffs(self):
        """Coefficientwise conjugate (values conj(t(-x)) reversed); rarely needed."""
        return TrigPoly1._raw({j: c.conjugate() for j, c in self._c.items()})

    def truncate(self, threshold: float):
        """Explicitly drop coefficients with |c| <= threshold."""
        return TrigPoly1({j: c for j, c in self._c.items() if abs(c) > threshold})

    def coeff_l1(self) -> float:
        return float(sum(abs(c) for c in self._c.values()))

    def lipschitz_bound(self) -> float:
        """2*pi*sum |j|*|c_j|, a Lipschitz constant for x -> t(x)."""
        return TWO_PI * float(sum(abs(j) * abs(c) for j, c in self._c.items()))

    def eval(self, x):
        """Evaluate at x (scalar or array), x in units of full turns."""
        xs = np.asarray(x, dtype=float)
        if not self._c:
            return np.zeros_like(xs, dtype=complex) if xs.ndim else 0j
        js = np.fromiter(self._c.keys(), dtype=np.int64, count=len(self._c))
        cs = np.fromiter(self._c.values(), dtype=np.complex128, count=len(self._c))
        ph = np.exp((2j * math.pi) * np.multiply.outer(xs, js))
        out = ph @ cs
        return out if xs.ndim else complex(out)

    def to_samples(self, M: int):
        return to_samples(self, M)

    def allclose(self, other, tol=1e-12) -> bool:
        keys = set(self._c) | set(other._c)
        scale = max(1.0, self.coeff_l1(), other.coeff_l1())
        return all(abs(self.coeff(j) - other.coeff(j)) <= tol * scale for j in keys)


class TrigPoly2:
    """A trigonometric polynomial sum c_{jk} e^(2*pi*i*(j*x + k*y))."""

    __slots__ = ("_c",)

    def __init__(self, coeffs=None):
        if coeffs:
            self._c = {
                (int(j), int(k)): complex(v)
                for (j, k), v in coeffs.items()
                if abs(v) >= _DROP
            }
        else:
            self._c = {}

    @classmethod
    def _raw(cls, d: dict):
        obj = cls.__new__(cls)
        obj._c = d
        return obj

    @classmethod
    def monomial(cls, jk, c=1.0):
        return cls({(int(jk[0]), int(jk[1])): c})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    @property
    def coeffs(self):
        return MappingProxyType(self._c)

    def coeff(self, jk) -> complex:
        return self._c.get((jk[0], jk[1]), 0j)

    @property
    def freqs(self):
        return tuple(sorted(self._c))

    @property
    def n1(self) -> int:
        return max((abs(j) for j, _ in self._c), default=0)

    @property
    def n2(self) -> int:
        return max((abs(k) for _, k in self._c), default=0)

    def is_zero(self) -> bool:
        return not self._c

    def __len__(self):
        return len(self._c)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TrigPoly2.const(other)
        if not isinstance(other, TrigPoly2):
            return NotImplemented
        out = dict(self._c)
        for jk, c in other._c.items():
            out[jk] = out.get(jk, 0j) + c
        return TrigPoly2(out)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly2._raw({jk: -c for jk, c in self._c.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = TrigPoly2.const(other)
        if not isinstance(other, TrigPoly2):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return TrigPoly2({jk: c * other for jk, c in self._c.items()})
        if not isinstance(other, TrigPoly2):
            return NotImplemented
        return TrigPoly2._raw(convolve2(self._c, other._c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TrigPoly2):
            return NotImplemented
        return self._c == other._c

    __hash__ = None

    def __repr__(self):
        if not self._c:
            return "TrigPoly2(0)"
        parts = [f"{c:.6g}*e_{jk}" for jk, c in sorted(self._c.items())]
        return "TrigPoly2(" + " + ".join(parts) + ")"

    def star(self):
        return TrigPoly2._raw(
            {(-j, -k): c.conjugate() for (j, k), c in self._c.items()}
        )

    def abs_squared(self):
        return self * self.star()

    def real_part(self):
        return (self + self.star()) * 0.5

    def imag_part(self):
        return (self - self.star()) * (-0.5j)

    def truncate(self, threshold: float):
        return TrigPoly2({jk: c for jk, c in self._c.items() if abs(c) > threshold})

    def coeff_l1(self) -> float:
        return float(sum(abs(c) for c in self._c.values()))

    def lipschitz_bounds(self):
        """Per-coordinate Lipschitz constants (2*pi*sum|j||c|, 2*pi*sum|k||c|)."""
        lx = TWO_PI * float(sum(abs(j) * abs(c) for (j, _), c in self._c.items()))
        ly = TWO_PI * float(sum(abs(k) * abs(c) for (_, k), c in self._c.items()))
        return lx, ly

    def eval(self, x, y):
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        if not self._c:
            return np.zeros(np.broadcast(xs, ys).shape, dtype=complex)
        out = np.zeros(np.broadcast(xs, ys).shape, dtype=complex)
        for (j, k), c in self._c.items():
            out = out + c * np.exp((2j * math.pi) * (j * xs + k * ys))
        if out.ndim == 0:
            return complex(out)
        return out

    def slice_x(self, z: complex):
        """Substitute e^(2*pi*i*x) -> z, returning the y-polynomial sum_k (sum_j c_{jk} z^j) e_k.

        For z on the unit circle this is the slice y -> t(x, y).
        """
        if z == 0:
            raise PreconditionError("slice_x requires z != 0")
        z = complex(z)
        out: dict = {}
        for (j, k), c in self._c.items():
            out[k] = out.get(k, 0j) + c * z**j
        return TrigPoly1(out)

    def allclose(self, other, tol=1e-12) -> bool:
        keys = set(self._c) | set(other._c)
        scale = max(1.0, self.coeff_l1(), other.coeff_l1())
        return all(abs(self.coeff(jk) - other.coeff(jk)) <= tol * scale for jk in keys)


class CircleSamples:
    """Uniform samples of a circle function at x = m/M, M a power of two."""

    __slots__ = ("values", "M")

    def __init__(self, values):
        v = np.asarray(values, dtype=complex)
        if v.ndim != 1 or v.size < 1 or (v.size & (v.size - 1)) != 0:
            raise PreconditionError("sample count must be a positive power of two")
        self.values = v
        self.M = v.size

    def to_poly(self, window):
        return from_samples(self, window)


def _pow2_at_least(n: int) -> int:
    m = 1
    while m < n:
        m <<= 1
    return m


def to_samples(t: TrigPoly1, M: int) -> CircleSamples:
    """Sample t at x = m/M by zero-filled inverse FFT.

    Raises AliasRisk when M <= 2*n(t): such a grid cannot be inverted back to
    t's frequency window, so the round-trip contract would silently break.
    """
    if M < 1 or (M & (M - 1)) != 0:
        raise PreconditionError("M must be a positive power of two")
    if M <= 2 * t.degree:
        raise AliasRisk(f"M={M} too small for degree {t.degree} (need M > 2n)")
    dense = np.zeros(M, dtype=complex)
    for j, c in t.coeffs.items():
        dense[j % M] += c
    return CircleSamples(np.fft.ifft(dense) * M)


def from_samples(s: CircleSamples, window) -> TrigPoly1:
    """Recover coefficients on the given frequency window from samples.

    The window is an iterable of integer frequencies.  All residues mod M must
    be distinct, otherwise the window is not resolvable at this grid size and
    AliasRisk is raised.  Exact when the sampled function's support lies in
    the window.
    """
    win = sorted(set(int(j) for j in window))
    M = s.M
    residues = [j % M for j in win]
    if len(set(residues)) != len(residues):
        raise AliasRisk(f"window of size {len(win)} collides mod M={M}")
    spectrum = np.fft.fft(s.values) / M
    return TrigPoly1({j: spectrum[j % M] for j in win})


# ---------------------------------------------------------------------------
# Certified extrema via grid + Lipschitz branch-and-bound.


_CELL_CAP = 1_000_000
_EVAL_CHUNK = 1 << 15


def _chunked_eval(build, xs_len):
    if xs_len <= _EVAL_CHUNK:
        return build(slice(None))
    parts = [build(slice(i, i + _EVAL_CHUNK)) for i in range(0, xs_len, _EVAL_CHUNK)]
    return tuple(np.concatenate(cols) for cols in zip(*parts))


def _bb_max_1d(t: TrigPoly1, tol: float):
    """Certified bracket for max over the circle of a real-valued t.

    The per-cell upper bound is the sharper of the plain Lipschitz bound
    L*hw and the gradient-augmented bound |t'(c)|*hw + K*hw^2/2, where K is
    the Lipschitz constant of t' (both from the coefficient data); the second
    form keeps the surviving cell count bounded near smooth maxima.
    """
    if t.is_zero():
        return 0.0, 0.0
    js = np.fromiter(t.coeffs.keys(), dtype=np.int64, count=len(t))
    cs = np.fromiter(t.coeffs.values(), dtype=np.complex128, count=len(t))
    lip = t.lipschitz_bound()
    if lip == 0.0:
        v = float(t.coeff(0).real)
        return v, v
    djs = (2j * math.pi) * js
    kap = float(np.sum((TWO_PI * np.abs(js)) ** 2 * np.abs(cs)))

    def ev(xs):
        def build(sl):
            ph = np.exp((2j * math.pi) * np.multiply.outer(xs[sl], js))
            return (ph @ cs).real, np.abs((ph @ (djs * cs)).real)
        return _chunked_eval(build, xs.size)

    M = _pow2_at_least(max(8, 4 * (t.degree + 1)))
    centers = np.arange(M) / M
    vals, grad = ev(centers)
    hw = np.full(M, 0.5 / M)
    lo = float(vals.max())
    while True:
        ub = vals + np.minimum(lip * hw, grad * hw + 0.5 * kap * hw * hw)
        hi = float(ub.max())
        if hi - lo <= tol:
            return lo, hi
        keep = ub > lo
        centers, hw, vals = centers[keep], hw[keep], vals[keep]
        if centers.size * 2 > _CELL_CAP:
            raise NumericalError("certified extremum: cell budget exceeded")
        nh = hw * 0.5
        nc = np.concatenate([centers - nh, centers + nh])
        hw = np.concatenate([nh, nh])
        vals, grad = ev(nc)
        centers = nc
        lo = max(lo, float(vals.max()))


def _bb_max_2d(t: TrigPoly2, tol: float):
    """Certified bracket for max over the torus of a real-valued t."""
    if t.is_zero():
        return 0.0, 0.0
    items = list(t.coeffs.items())
    js = np.array([jk[0] for jk, _ in items], dtype=np.int64)
    ks = np.array([jk[1] for jk, _ in items], dtype=np.int64)
    cs = np.array([c for _, c in items], dtype=np.complex128)
    lx, ly = t.lipschitz_bounds()
    if lx == 0.0 and ly == 0.0:
        v = float(t.coeff((0, 0)).real)
        return v, v
    djs = (2j * math.pi) * js
    dks = (2j * math.pi) * ks
    ac = np.abs(cs)
    kxx = float(np.sum((TWO_PI * np.abs(js)) ** 2 * ac))
    kyy = float(np.sum((TWO_PI * np.abs(ks)) ** 2 * ac))
    kxy = float(np.sum(TWO_PI * TWO_PI * np.abs(js) * np.abs(ks) * ac))

    def ev(xs, ys):
        def build(sl):
            ph = np.exp(
                (2j * math.pi)
                * (np.multiply.outer(xs[sl], js) + np.multiply.outer(ys[sl], ks))
            )
            return (
                (ph @ cs).real,
                np.abs((ph @ (djs * cs)).real),
                np.abs((ph @ (dks * cs)).real),
            )
        return _chunked_eval(build, xs.size)

    Mx = _pow2_at_least(max(8, 4 * (t.n1 + 1)))
    My = _pow2_at_least(max(8, 4 * (t.n2 + 1)))
    gx, gy = np.meshgrid(np.arange(Mx) / Mx, np.arange(My) / My, indexing="ij")
    xs, ys = gx.ravel(), gy.ravel()
    vals, gradx, grady = ev(xs, ys)
    hwx = np.full(xs.size, 0.5 / Mx)
    hwy = np.full(ys.size, 0.5 / My)
    lo = float(vals.max())
    while True:
        slack1 = lx * hwx + ly * hwy
        slack2 = (
            gradx * hwx
            + grady * hwy
            + 0.5 * (kxx * hwx * hwx + kyy * hwy * hwy)
            + kxy * hwx * hwy
        )
        ub = vals + np.minimum(slack1, slack2)
        hi = float(ub.max())
        if hi - lo <= tol:
            return lo, hi
        keep = ub > lo
        xs, ys, hwx, hwy = xs[keep], ys[keep], hwx[keep], hwy[keep]
        vals, gradx, grady = vals[keep], gradx[keep], grady[keep]
        if xs.size * 2 > _CELL_CAP:
            raise NumericalError("certified extremum: cell budget exceeded")
        split_x = lx * hwx >= ly * hwy
        dx = np.where(split_x, hwx * 0.5, 0.0)
        dy = np.where(split_x, 0.0, hwy * 0.5)
        nhwx = np.where(split_x, hwx * 0.5, hwx)
        nhwy = np.where(split_x, hwy, hwy * 0.5)
        xs = np.concatenate([xs - dx, xs + dx])
        ys = np.concatenate([ys - dy, ys + dy])
        hwx = np.concatenate([nhwx, nhwx])
        hwy = np.concatenate([nhwy, nhwy])
        vals, gradx, grady = ev(xs, ys)
        lo = max(lo, float(vals.max()))


def _collinear_reduction(t: TrigPoly2):
    """One-variable rewrite for support on a single line through the origin.

    When every frequency is an integer multiple of one primitive vector
    (a, b), t(x, y) = P(a x + b y) and the map to a x + b y mod 1 is onto
    the circle, so the range over the torus equals the range of P.  Returns
    P as a TrigPoly1, or None when the support is not collinear.
    """
    nz = [jk for jk in t.freqs if jk != (0, 0)]
    if not nz:
        return TrigPoly1({0: t.coeff((0, 0))})
    j0, k0 = nz[0]
    g = math.gcd(abs(j0), abs(k0))
    a, b = j0 // g, k0 // g
    coeffs = {}
    for (j, k), c in t.coeffs.items():
        if a != 0:
            if j % a != 0:
                return None
            m = j // a
        else:
            m = k // b
        if (m * a, m * b) != (j, k):
            return None
        coeffs[m] = c
    return TrigPoly1(coeffs)


def _bb_max(t, tol):
    if isinstance(t, TrigPoly1):
        return _bb_max_1d(t, tol)
    line = _collinear_reduction(t)
    if line is not None:
        return _bb_max_1d(line, tol)
    return _bb_max_2d(t, tol)


def sup_norm_certified(t, tol: float):
    """Certified bracket (lower, upper) for the sup norm of t over the torus.

    Parameters
    ----------
    t : TrigPoly1 or TrigPoly2
    tol : positive float, required bracket width

    Notes
    -----
    Works on |t|^2, which is a real-valued polynomial whose maximum is found
    by grid refinement with the Lipschitz bound; the square root of that
    bracket is tightened until its own width is at most tol.
    """
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    if t.is_zero():
        return 0.0, 0.0
    u = t.abs_squared()
    tol_u = tol * max(1.0, t.coeff_l1())
    for _ in range(64):
        lo_u, hi_u = _bb_max(u, tol_u)
        lo = math.sqrt(max(lo_u, 0.0))
        hi = math.sqrt(max(hi_u, 0.0))
        if hi - lo <= tol:
            return lo, hi
        # width after sqrt is (hi_u-lo_u)/(hi+lo); solve for the needed tol_u
        tol_u = max(tol * (hi + lo) * 0.5, hi_u * 1e-15)
        if tol_u <= 0:
            return lo, hi
    raise NumericalError("sup_norm_certified failed to tighten")


def min_re_certified(t, tol: float):
    """Certified bracket (lower, upper) for min over the torus of Re t."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    u = t.real_part()
    neg_hi, neg_lo = _bb_max(-1.0 * u, tol)
    return -neg_lo, -neg_hi


def max_abs_im_certified(t, tol: float):
    """Certified bracket for sup |Im t| over the torus."""
    return sup_norm_certified(t.imag_part(), tol)


# ---------------------------------------------------------------------------
# JSON coefficient format.


def poly_to_json_dict(t):
    """Serialize to the interchange dict {"dim": d, "coeffs": [...]}."""
    if isinstance(t, TrigPoly1):
        return {
            "dim": 1,
            "coeffs": [
                {"j": j, "re": c.real, "im": c.imag}
                for j, c in sorted(t.coeffs.items())
            ],
        }
    if isinstance(t, TrigPoly2):
        return {
            "dim": 2,
            "coeffs": [
                {"j": j, "k": k, "re": c.real, "im": c.imag}
                for (j, k), c in sorted(t.coeffs.items())
            ],
        }
    raise PreconditionError("not a trigonometric polynomial")


def poly_from_json_dict(obj):
    """Parse the interchange dict; duplicate frequencies are an input error."""
    try:
        dim = obj["dim"]
        rows = obj["coeffs"]
    except (TypeError, KeyError) as exc:
        raise PreconditionError(f"malformed polynomial JSON: {exc}") from exc
    if dim == 1:
        out: dict = {}
        for row in rows:
            j = int(row["j"])
            if j in out:
                raise PreconditionError(f"duplicate frequency {j}")
            out[j] = complex(float(row["re"]), float(row["im"]))
        return TrigPoly1(out)
    if dim == 2:
        out2: dict = {}
        for row in rows:
            jk = (int(row["j"]), int(row["k"]))
            if jk in out2:
                raise PreconditionError(f"duplicate frequency {jk}")
            out2[jk] = complex(float(row["re"]), float(row["im"]))
        return TrigPoly2(out2)
    raise PreconditionError(f"unsupported dim {dim!r}")
