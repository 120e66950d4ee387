"""Diagonal frequency strips and the integer linear maps acting on them.

A strip F(alpha, beta) collects the lattice points (j,k) with
|k - j*alpha| < beta.  Unimodular integer maps relabel frequencies and carry
strips to strips; for rational alpha there is a canonical reducing matrix
sending the strip onto an axis-aligned band.  Continued-fraction convergents
supply the rational stand-ins for an irrational slope, and the gap measure
quantifies how well a matrix annihilates the slope.

Slopes are exact: rationals are Fractions, irrationals are certified
enclosures with Fraction endpoints.  Every comparison against a strict
inequality is decided exactly or reported as Undecidable, never guessed.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateDirection,
    NotLowestTerms,
    NumericalError,
    PrecisionExhausted,
    PreconditionError,
    Undecidable,
    ZeroAlpha,
)
from .trigpoly import TrigPoly2

# an enclosure narrower than this carries at least 64 fractional bits
_MIN_WIDTH = Fraction(1, 2**64)


class RealAlpha:
    """Irrational slope carried as a certified enclosure lo <= alpha <= hi.

    Endpoints are exact Fractions; the width must resolve at least 64
    fractional bits.  digits, when present, is the decimal string the value
    was built from (used for serialization).
    """

    __slots__ = ("lo", "hi", "digits")

    def __init__(self, lo, hi, digits=None):
        lo = Fraction(lo)
        hi = Fraction(hi)
        if hi < lo:
            raise PreconditionError("empty enclosure")
        if hi - lo > _MIN_WIDTH:
            raise PreconditionError(
                "enclosure too wide: need at least 64 fractional bits"
            )
        self.lo = lo
        self.hi = hi
        self.digits = digits

    @classmethod
    def from_digits(cls, digits: str) -> "RealAlpha":
        """Decimal string '0.1010...' (optionally signed) to an enclosure of
        width one unit in the last place."""
        s = digits.strip()
        neg = s.startswith("-")
        body = s.lstrip("+-")
        if "." in body:
            whole, frac = body.split(".", 1)
        else:
            whole, frac = body, ""
        if not (whole + frac).isdigit() or not frac:
            raise PreconditionError(f"not a decimal digit string: {digits!r}")
        scale = 10 ** len(frac)
        base = Fraction(int(whole) * scale + int(frac), scale)
        lo, hi = base, base + Fraction(1, scale)
        if neg:
            lo, hi = -hi, -lo
        return cls(lo, hi, digits=s)

    def interval(self):
        return (self.lo, self.hi)

    def __repr__(self):
        mid = float((self.lo + self.hi) / 2)
        return f"RealAlpha({mid:.12g}, width<=2^-64)"


def _as_slope(alpha):
    """Normalize a slope argument to ('rational', Fraction) or
    ('real', RealAlpha)."""
    if isinstance(alpha, RealAlpha):
        return "real", alpha
    if isinstance(alpha, (int, Fraction)):
        return "rational", Fraction(alpha)
    raise PreconditionError(
        f"slope must be int, Fraction, or RealAlpha, not {type(alpha).__name__}"
    )


class LatticeStrip:
    """The diagonal strip F(alpha, beta) = {(j,k) : |k - j*alpha| < beta}."""

    __slots__ = ("kind", "alpha", "beta")

    def __init__(self, alpha, beta):
        self.kind, self.alpha = _as_slope(alpha)
        beta = Fraction(beta)
        if beta <= 0:
            raise PreconditionError("beta must be positive")
        self.beta = beta

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def __repr__(self):
        if self.is_rational:
            return f"LatticeStrip({self.alpha}, {float(self.beta):g})"
        return f"LatticeStrip({self.alpha!r}, {float(self.beta):g})"


def _interval_abs(lo: Fraction, hi: Fraction):
    if lo <= 0 <= hi:
        return Fraction(0), max(-lo, hi)
    if hi < 0:
        return -hi, -lo
    return lo, hi


def _deviation_interval(F: LatticeStrip, j: int, k: int):
    """Certified enclosure of |k - j*alpha|."""
    if F.is_rational:
        d = abs(k - j * F.alpha)
        return d, d
    lo, hi = F.alpha.interval()
    a, b = k - j * hi, k - j * lo
    if j < 0:
        a, b = k - j * lo, k - j * hi
    return _interval_abs(a, b)


def strip_contains(F: LatticeStrip, p) -> bool:
    """Exact membership for rational slopes; certified for real slopes.

    Raises Undecidable when the deviation enclosure straddles beta.
    """
    j, k = int(p[0]), int(p[1])
    d_lo, d_hi = _deviation_interval(F, j, k)
    if d_hi < F.beta:
        return True
    if d_lo >= F.beta:
        return False
    raise Undecidable(
        f"|k - j*alpha| enclosure [{float(d_lo)}, {float(d_hi)}] straddles "
        f"beta = {float(F.beta)} at {(j, k)}"
    )


def strip_window(F: LatticeStrip, jmax: int):
    """All strip members with |j| <= jmax (a finite set; each row of the
    strip is an open interval of k values)."""
    if jmax < 0:
        raise PreconditionError("jmax must be >= 0")
    out = set()
    for j in range(-jmax, jmax + 1):
        if F.is_rational:
            center = j * F.alpha
            k_lo = math.floor(center - F.beta) + 1
            k_hi = math.ceil(center + F.beta) - 1
        else:
            lo, hi = F.alpha.interval()
            ends = (j * lo, j * hi)
            k_lo = math.floor(min(ends) - F.beta)
            k_hi = math.ceil(max(ends) + F.beta)
        for k in range(k_lo, k_hi + 1):
            if strip_contains(F, (j, k)):
                out.add((j, k))
    return out


def reflect(F: LatticeStrip) -> LatticeStrip:
    """The strip of swapped coordinates: F(alpha,beta) -> F(1/alpha, beta/|alpha|).

    Needs a rational nonzero slope; a real-slope image has an irrational
    width, which the exact-width strip type cannot carry.
    """
    if not F.is_rational:
        raise PreconditionError("reflection needs a rational slope")
    if F.alpha == 0:
        raise ZeroAlpha("cannot reflect a horizontal strip")
    return LatticeStrip(1 / F.alpha, F.beta / abs(F.alpha))


def reflect_points(points):
    """Coordinate swap on a set of lattice points."""
    return {(k, j) for (j, k) in points}


@dataclass(frozen=True)
class ModularMap:
    """Integer matrix [[g11,g12],[g21,g22]] with determinant one, acting on
    frequency pairs as (j,k) -> (g11*j + g12*k, g21*j + g22*k)."""

    g11: int
    g12: int
    g21: int
    g22: int

    def __post_init__(self):
        det = self.g11 * self.g22 - self.g12 * self.g21
        if det != 1:
            raise PreconditionError(f"determinant must be 1, got {det}")

    def apply(self, p):
        j, k = int(p[0]), int(p[1])
        return (self.g11 * j + self.g12 * k, self.g21 * j + self.g22 * k)

    def inverse(self) -> "ModularMap":
        return ModularMap(self.g22, -self.g12, -self.g21, self.g11)

    @property
    def entries(self):
        return (self.g11, self.g12, self.g21, self.g22)


IDENTITY_MAP = ModularMap(1, 0, 0, 1)


def sl2_apply(g: ModularMap, p):
    return g.apply(p)


def sl2_apply_poly(g: ModularMap, t: TrigPoly2) -> TrigPoly2:
    """Relabel frequencies by g.  Exact: the map is a bijection on the
    lattice, so coefficients move without collisions."""
    return TrigPoly2({g.apply(jk): c for jk, c in t.coeffs.items()})


def strip_image(g: ModularMap, F: LatticeStrip) -> LatticeStrip:
    """The image strip g(F(alpha,beta)) = F(alpha', beta') with
    alpha' = (g21 + alpha*g22)/(g11 + alpha*g12) and
    beta' = beta/|g11 + alpha*g12|."""
    if F.is_rational:
        den = g.g11 + F.alpha * g.g12
        if den == 0:
            raise DegenerateDirection(
                "g11 + alpha*g12 = 0: strip direction becomes vertical"
            )
        new_alpha = (g.g21 + F.alpha * g.g22) / den
        return LatticeStrip(new_alpha, F.beta / abs(den))
    # real slope: only an integer denominator keeps the width exact
    if g.g12 != 0:
        raise PreconditionError(
            "real-slope strip image needs g12 = 0 "
            "(otherwise the image width is irrational)"
        )
    if g.g11 == 0:
        raise DegenerateDirection("g11 = 0 with g12 = 0 is not unimodular")
    lo, hi = F.alpha.interval()
    a, b = g.g21 + lo * g.g22, g.g21 + hi * g.g22
    if g.g22 < 0:
        a, b = b, a
    den = g.g11
    na, nb = a / den, b / den
    if den < 0:
        na, nb = nb, na
    return LatticeStrip(RealAlpha(na, nb), F.beta / abs(den))


def reducing_matrix(alpha) -> ModularMap:
    """The canonical map sending F(alpha, beta) onto the horizontal band
    F(0, beta*|q|) for rational alpha = p/q with |alpha| <= 1.

    Construction: bottom row (-p, q); top row from the Bezout identity
    g11*q + g12*p = 1, shifted so that |g11| <= |g12| <= q/2 (for q = 1 the
    last clause becomes |g12| <= 1).  Accepts a Fraction or an explicit
    (p, q) pair; the pair must already be in lowest terms.
    """
    if isinstance(alpha, tuple):
        p, q = int(alpha[0]), int(alpha[1])
        if q < 1:
            raise PreconditionError("denominator must be >= 1")
        if math.gcd(abs(p), q) != 1:
            raise NotLowestTerms(f"{p}/{q} is not in lowest terms")
    else:
        frac = Fraction(alpha)
        p, q = frac.numerator, frac.denominator
    if abs(p) > q:
        raise PreconditionError("construction needs |alpha| <= 1")
    if p == 0:
        return IDENTITY_MAP
    # Bezout base: a*q + b*p = 1
    gcd, a, b = _extended_gcd(q, p)
    if gcd != 1:
        raise NotLowestTerms(f"{p}/{q} is not in lowest terms")
    half = Fraction(q, 2) if q >= 2 else Fraction(1)
    # shifting (a, b) by (m*p, -m*q) keeps the identity; |g12| <= q/2 pins m
    m0 = round(Fraction(b, q))
    for m in (m0, m0 - 1, m0 + 1):
        g11, g12 = a + m * p, b - m * q
        if abs(g11) <= abs(g12) <= half:
            return ModularMap(g11, g12, -p, q)
    raise NumericalError(f"no shift satisfies the size constraints for {p}/{q}")


def _extended_gcd(x: int, y: int):
    """g, a, b with a*x + b*y = g = gcd(x, y), allowing negative inputs."""
    a0, a1 = 1, 0
    b0, b1 = 0, 1
    while y != 0:
        d, r = divmod(x, y)
        x, y = y, r
        a0, a1 = a1, a0 - d * a1
        b0, b1 = b1, b0 - d * b1
    if x < 0:
        x, a0, b0 = -x, -a0, -b0
    return x, a0, b0


def convergent_walk(alpha):
    """Yields continued-fraction convergents (p_i, q_i), q_i strictly
    increasing, until a rational slope terminates or the stored enclosure
    stops pinning the next digit (PrecisionExhausted).

    The first raw entry (d0, 1) is withheld one step: it must be dropped
    when the second digit is 1 (both would carry q = 1).  After that the
    denominators grow strictly, so every later entry streams immediately.
    """
    kind, a = _as_slope(alpha)
    if kind == "rational":
        lo = hi = a
        exact = True
    else:
        lo, hi = a.interval()
        exact = False
    p_prev, q_prev = 1, 0
    p_prev2, q_prev2 = 0, 1
    digits = 0
    head = None
    while True:
        f_lo, f_hi = math.floor(lo), math.floor(hi)
        if f_lo != f_hi:
            raise PrecisionExhausted(
                f"enclosure spans an integer after {digits} digits"
            )
        d = f_lo
        p = d * p_prev + p_prev2
        q = d * q_prev + q_prev2
        digits += 1
        if digits == 1:
            head = (p, q)
        else:
            if head is not None:
                if q != head[1]:
                    yield head
                head = None
            yield (p, q)
        p_prev2, q_prev2 = p_prev, q_prev
        p_prev, q_prev = p, q
        lo, hi = lo - d, hi - d
        if exact and hi == 0:
            if head is not None:
                yield head
            return
        if lo <= 0:
            raise PrecisionExhausted(
                f"fractional part not separated from zero after {digits} digits"
            )
        lo, hi = 1 / hi, 1 / lo


def convergents(alpha, count: int):
    """The first `count` continued-fraction convergents (p_i, q_i) with
    strictly increasing q_i.

    Real slopes walk the certified enclosure; when the next digit is not
    pinned down by the stored precision the walk raises PrecisionExhausted.
    A rational slope terminates exactly (possibly before count entries).
    """
    if count < 1:
        raise PreconditionError("count must be >= 1")
    out = []
    for pq in convergent_walk(alpha):
        out.append(pq)
        if len(out) == count:
            break
    return out


def approximation_gap(alpha, g: ModularMap) -> float:
    """The annihilation quality |g21 + alpha*g22| * |g22| * log|g22|.

    Zero exactly when the bottom row annihilates a rational slope; for a
    sequence of maps adapted to alpha the slope is well approximated exactly
    when this tends to zero."""
    if abs(g.g22) < 2:
        raise PreconditionError("need |g22| >= 2")
    kind, a = _as_slope(alpha)
    if kind == "rational":
        dev = abs(g.g21 + a * g.g22)
    else:
        lo, hi = a.interval()
        x, y = g.g21 + lo * g.g22, g.g21 + hi * g.g22
        if g.g22 < 0:
            x, y = y, x
        d_lo, d_hi = _interval_abs(x, y)
        dev = (d_lo + d_hi) / 2
    return float(dev) * abs(g.g22) * math.log(abs(g.g22))


def certify_strip_lift(g21: int, g22: int, alpha, beta, beta_tilde, p) -> bool:
    """Certify p = (j,k) in F(alpha,beta) through the rational stand-in
    alpha~ = -g21/g22: membership in F(alpha~, beta~) plus
    |j| < (beta - beta~)/|alpha - alpha~| lifts to the target strip.

    The lift is re-verified by a direct membership test; disagreement is a
    numerical contradiction, not a result.
    """
    if g22 == 0 or math.gcd(abs(g21), abs(g22)) != 1:
        raise PreconditionError("bottom row must be coprime with g22 != 0")
    beta = Fraction(beta)
    beta_tilde = Fraction(beta_tilde)
    if not (0 < beta_tilde < beta):
        raise PreconditionError("need 0 < beta_tilde < beta")
    kind, a = _as_slope(alpha)
    if kind == "rational":
        if not (0 < abs(a) < 1):
            raise PreconditionError("need 0 < |alpha| < 1")
    else:
        lo, hi = a.interval()
        if not (0 < lo and hi < 1) and not (lo > -1 and hi < 0):
            raise PreconditionError("need 0 < |alpha| < 1 (certified)")
    alpha_t = Fraction(-g21, g22)
    j = int(p[0])
    if not strip_contains(LatticeStrip(alpha_t, beta_tilde), p):
        return False
    margin = beta - beta_tilde
    if kind == "rational":
        diff = abs(a - alpha_t)
        if diff == 0:
            certified = True
        else:
            certified = abs(j) < margin / diff
    else:
        lo, hi = a.interval()
        d_lo, d_hi = _interval_abs(lo - alpha_t, hi - alpha_t)
        if d_hi == 0:
            certified = True
        elif abs(j) < margin / d_hi:
            certified = True
        elif d_lo > 0 and abs(j) >= margin / d_lo:
            certified = False
        else:
            raise Undecidable(
                f"threshold enclosure cannot decide |j| = {abs(j)}"
            )
    if certified and not strip_contains(LatticeStrip(alpha, beta), p):
        raise NumericalError(
            f"lift certified {p} but direct membership denies it"
        )
    return certified


def _decimal_digits(x: Fraction, places: int) -> str:
    """Truncated decimal expansion of x >= 0, as a digit string."""
    whole = int(x)
    rem = x - whole
    digits = []
    for _ in range(places):
        rem *= 10
        d = int(rem)
        digits.append(str(d))
        rem -= d
    return f"{whole}." + "".join(digits)


def strip_to_json_dict(F: LatticeStrip) -> dict:
    if F.is_rational:
        slope = {
            "kind": "rational",
            "p": F.alpha.numerator,
            "q": F.alpha.denominator,
        }
    else:
        digits = F.alpha.digits
        if digits is None:
            digits = _decimal_digits(F.alpha.lo, 30)
        slope = {"kind": "real", "digits": digits}
    return {"alpha": slope, "beta": float(F.beta)}


def strip_from_json_dict(d: dict) -> LatticeStrip:
    try:
        slope = d["alpha"]
        kind = slope["kind"]
        if kind == "rational":
            alpha = Fraction(int(slope["p"]), int(slope["q"]))
        elif kind == "real":
            alpha = RealAlpha.from_digits(slope["digits"])
        else:
            raise PreconditionError(f"unknown slope kind {kind!r}")
        return LatticeStrip(alpha, d["beta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"malformed strip document: {exc}") from exc
