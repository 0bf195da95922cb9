"""Gaussian rationals: complex numbers with exact rational parts."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussianRational", "as_rational", "parse_gaussian", "parse_scalar", "I", "ZERO", "ONE"]


def as_rational(value) -> mpq:
    """Convert int, Fraction, mpq or an exact decimal/fraction string to mpq."""
    if isinstance(value, mpq):
        return value
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        f = Fraction(value.strip())
        return mpq(f.numerator, f.denominator)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts.

    Instances are immutable. The parts are ``gmpy2.mpq`` values, which are
    always kept in lowest terms with a positive denominator.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part given twice")
            object.__setattr__(self, "re", re.re)
            object.__setattr__(self, "im", re.im)
            return
        object.__setattr__(self, "re", as_rational(re))
        object.__setattr__(self, "im", as_rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _make(cls, re: mpq, im: mpq) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @staticmethod
    def coerce(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact")
        return GaussianRational(value)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussianRational._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._make(a * c, b)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational._make(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.re, -self.im)

    def abs2(self) -> "GaussianRational":
        """``q * conj(q)``, always with zero imaginary part."""
        return GaussianRational._make(self.re * self.re + self.im * self.im, mpq(0))

    # predicates and conversion -----------------------------------------

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction, type(mpq(0)))):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return False
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise TypeError("value has a nonzero imaginary part")
        return float(self.re)

    def __repr__(self):
        return f"GaussianRational('{self}')"

    def __str__(self):
        re_s = _fmt(self.re)
        if not self.im:
            return re_s
        im_s = _fmt(abs(self.im))
        sign = "-" if self.im < 0 else "+"
        if not self.re:
            return f"{'-' if self.im < 0 else ''}{im_s}*i"
        return f"{re_s}{sign}{im_s}*i"


def _fmt(q: mpq) -> str:
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

_RAT = r"\d+(?:/\d+)?"
_GAUSS_RE = re.compile(
    rf"^(?P<re>[+-]?{_RAT})?"
    rf"(?:(?P<isign>[+-])?(?P<im>{_RAT})?\*?i)?$"
)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse an exact literal such as ``-3/4``, ``1+0i``, ``1/2-3/5i`` or ``2/3+1/3*i``.

    The ``*`` before ``i`` is optional so that the serialized form
    round-trips. Raises ValueError on anything else.
    """
    s = text.strip().replace(" ", "")
    m = _GAUSS_RE.match(s)
    if not s or m is None or (m.group("re") is None and "i" not in s):
        raise ValueError(f"malformed Gaussian-rational literal {text!r}")
    try:
        return _assemble(s, m)
    except ZeroDivisionError:
        raise ValueError(f"zero denominator in {text!r}") from None


def _assemble(s: str, m) -> GaussianRational:
    text = s
    re_part = mpq(m.group("re")) if m.group("re") else mpq(0)
    im_part = mpq(0)
    if s.endswith("i"):
        if m.group("re") is not None and m.group("isign") is None:
            if m.group("im") is not None:
                raise ValueError(f"malformed Gaussian-rational literal {text!r}")
            # pure imaginary literal such as "-3/2i"
            return GaussianRational(0, re_part)
        im_part = mpq(m.group("im")) if m.group("im") else mpq(1)
        if m.group("isign") == "-":
            im_part = -im_part
    return GaussianRational(re_part, im_part)


def parse_scalar(text: str):
    """Parse an exact literal if possible, otherwise a float or complex float."""
    try:
        return parse_gaussian(text)
    except ValueError:
        pass
    s = text.strip().replace(" ", "").replace("*i", "j").replace("i", "j")
    try:
        value = complex(s)
    except ValueError:
        raise ValueError(f"malformed matrix entry {text!r}") from None
    return value.real if value.imag == 0 and "j" not in s else value
