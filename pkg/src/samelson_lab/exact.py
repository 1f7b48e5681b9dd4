"""Exact scalars in the field Q(i, sqrt(d)) for a squarefree integer d.

A scalar is stored as (ra + rb*sqrt(d)) + i*(ia + ib*sqrt(d)) with Fraction
components.  d == 1 encodes a plain Gaussian rational (the sqrt parts are
folded into the rational parts on construction).  Scalars carrying two
different nontrivial surds never interact; mixing them raises ValueError.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

__all__ = [
    "ExactScalar",
    "exact",
    "exact_i",
    "sqrt_rational",
    "squarefree_split",
]

Rat = Union[int, Fraction]

_ZERO = Fraction(0)


def squarefree_split(n: int) -> tuple[int, int]:
    """Write n >= 1 as s*s*d with d squarefree; return (s, d)."""
    if n < 1:
        raise ValueError("need a positive integer, got %r" % (n,))
    s, d, p = 1, 1, 2
    while p * p <= n:
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        s *= p ** (k // 2)
        if k % 2:
            d *= p
        p += 1 if p == 2 else 2
    return s, d * n


def _quad_mul(a1: Fraction, b1: Fraction, a2: Fraction, b2: Fraction, d: int):
    # (a1 + b1*sqrt(d)) * (a2 + b2*sqrt(d))
    return a1 * a2 + b1 * b2 * d, a1 * b2 + b1 * a2


class ExactScalar:
    __slots__ = ("ra", "rb", "ia", "ib", "d")

    def __init__(self, ra: Rat = 0, rb: Rat = 0, ia: Rat = 0, ib: Rat = 0, d: int = 1):
        ra, rb = Fraction(ra), Fraction(rb)
        ia, ib = Fraction(ia), Fraction(ib)
        if d < 1 or squarefree_split(d)[0] != 1:
            raise ValueError("d must be a positive squarefree integer")
        if d == 1:
            ra, rb = ra + rb, _ZERO
            ia, ib = ia + ib, _ZERO
        elif rb == 0 and ib == 0:
            d = 1
        object.__setattr__(self, "ra", ra)
        object.__setattr__(self, "rb", rb)
        object.__setattr__(self, "ia", ia)
        object.__setattr__(self, "ib", ib)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("ExactScalar is immutable")

    # -- coercion helpers -------------------------------------------------

    @staticmethod
    def _coerce(x) -> "ExactScalar":
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactScalar(x)
        return NotImplemented  # type: ignore[return-value]

    def _join_d(self, other: "ExactScalar") -> int:
        if self.d == other.d:
            return self.d
        if self.d == 1:
            return other.d
        if other.d == 1:
            return self.d
        raise ValueError(
            "cannot mix surds sqrt(%d) and sqrt(%d)" % (self.d, other.d)
        )

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return self.ra == 0 and self.rb == 0 and self.ia == 0 and self.ib == 0

    def is_real(self) -> bool:
        return self.ia == 0 and self.ib == 0

    def is_rational(self) -> bool:
        return self.is_real() and self.rb == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._join_d(o)
        return ExactScalar(self.ra + o.ra, self.rb + o.rb, self.ia + o.ia, self.ib + o.ib, d)

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(-self.ra, -self.rb, -self.ia, -self.ib, self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._join_d(o)
        xa, xb = _quad_mul(self.ra, self.rb, o.ra, o.rb, d)
        ya, yb = _quad_mul(self.ia, self.ib, o.ia, o.ib, d)
        ua, ub = _quad_mul(self.ra, self.rb, o.ia, o.ib, d)
        va, vb = _quad_mul(self.ia, self.ib, o.ra, o.rb, d)
        return ExactScalar(xa - ya, xb - yb, ua + va, ub + vb, d)

    __rmul__ = __mul__

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.ra, self.rb, -self.ia, -self.ib, self.d)

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        d = self.d
        # norm over the complex conjugation: x^2 + y^2, a real quad (p, q)
        pa, pb = _quad_mul(self.ra, self.rb, self.ra, self.rb, d)
        qa, qb = _quad_mul(self.ia, self.ib, self.ia, self.ib, d)
        p, q = pa + qa, pb + qb
        # invert p + q*sqrt(d) by the surd conjugate; denominator is rational
        den = p * p - q * q * d
        inv_a, inv_b = p / den, -q / den
        ra, rb = _quad_mul(self.ra, self.rb, inv_a, inv_b, d)
        ia, ib = _quad_mul(-self.ia, -self.ib, inv_a, inv_b, d)
        return ExactScalar(ra, rb, ia, ib, d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ExactScalar(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- parts ------------------------------------------------------------

    def real_part(self) -> "ExactScalar":
        return ExactScalar(self.ra, self.rb, 0, 0, self.d)

    def imag_part(self) -> "ExactScalar":
        return ExactScalar(self.ia, self.ib, 0, 0, self.d)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("%s is not a plain rational" % (self,))
        return self.ra

    # -- order (real scalars only) ----------------------------------------

    def sign(self) -> int:
        if not self.is_real():
            raise ValueError("sign of a non-real scalar")
        a, b, d = self.ra, self.rb, self.d
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare |a| with |b|*sqrt(d); equality impossible
        if a * a == b * b * d:
            raise ArithmeticError("d was not squarefree > 1")
        big_rational = a * a > b * b * d
        return (1 if a > 0 else -1) if big_rational else (1 if b > 0 else -1)

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is NotImplemented:
            raise TypeError("cannot compare ExactScalar with %r" % (other,))
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- conversion / identity --------------------------------------------

    def __complex__(self) -> complex:
        from math import sqrt

        rd = sqrt(self.d)
        return complex(float(self.ra) + float(self.rb) * rd,
                       float(self.ia) + float(self.ib) * rd)

    def __float__(self) -> float:
        if not self.is_real():
            raise ValueError("float() of a non-real scalar")
        return complex(self).real

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.d != o.d:
            return False
        return (self.ra, self.rb, self.ia, self.ib) == (o.ra, o.rb, o.ia, o.ib)

    def __hash__(self):
        if self.is_rational():
            return hash(self.ra)
        return hash((self.ra, self.rb, self.ia, self.ib, self.d))

    # -- text -------------------------------------------------------------

    def to_token(self) -> str:
        """Loss-free text form, e.g. '2/3', '1+1/2r3', '-1i', '1/2r3+2i'."""
        parts = []
        if self.ra or not (self.rb or self.ia or self.ib):
            parts.append(str(self.ra))
        if self.rb:
            parts.append("%sr%d" % (self.rb, self.d))
        if self.ia:
            parts.append("%si" % (self.ia,))
        if self.ib:
            parts.append("%sir%d" % (self.ib, self.d))
        out = ""
        for p in parts:
            if out and not p.startswith("-"):
                out += "+"
            out += p
        return out

    @staticmethod
    def from_token(tok: str) -> "ExactScalar":
        s = tok.replace(" ", "")
        terms, cur = [], ""
        for ch in s:
            if ch in "+-" and cur and cur[-1] not in "+-/":
                terms.append(cur)
                cur = ch
            else:
                cur += ch
        if cur:
            terms.append(cur)
        ra = rb = ia = ib = Fraction(0)
        d = 1
        for t in terms:
            imag = False
            body = t
            if "i" in body:
                imag = True
                body = body.replace("i", "", 1)
            if "r" in body:
                num, dstr = body.split("r")
                td = int(dstr)
                if d not in (1, td):
                    raise ValueError("mixed surds in token %r" % (tok,))
                d = td
                val = Fraction(num) if num not in ("", "+", "-") else Fraction(num + "1")
                if imag:
                    ib += val
                else:
                    rb += val
            else:
                if body in ("", "+", "-"):
                    body += "1"
                val = Fraction(body)
                if imag:
                    ia += val
                else:
                    ra += val
        return ExactScalar(ra, rb, ia, ib, d)

    def __repr__(self):
        return self.to_token()


def exact(x: Union[Rat, ExactScalar]) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    return ExactScalar(x)


def exact_i() -> ExactScalar:
    return ExactScalar(0, 0, 1, 0)


def sqrt_rational(q: Rat) -> ExactScalar:
    """Exact square root of a nonnegative rational."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("sqrt of a negative rational")
    if q == 0:
        return ExactScalar(0)
    n = q.numerator * q.denominator
    s, d = squarefree_split(n)
    return ExactScalar(0, Fraction(s, q.denominator), 0, 0, d)
