"""Exact Gaussian-rational scalars (a + bi with a, b in Q).

Group-ring coefficients stay exact through convolution powers; floating
point enters only inside the iterative norm estimators. The class keeps a
real fast path because almost every practical input has zero imaginary
part.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction


class QQi:
    """Immutable complex number with Fraction real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self.im and not other.im:
            return QQi(self.re * other.re)
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def conjugate(self):
        return QQi(self.re, -self.im)

    # predicates and conversions -------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_real(self):
        return not self.im

    def is_real_nonnegative(self):
        return not self.im and self.re >= 0

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def abs_float(self) -> float:
        if not self.im:
            return abs(float(self.re))
        return math.sqrt(float(self.abs_squared()))

    def abs_exact(self) -> Fraction:
        """Exact absolute value; only defined for real values."""
        if self.im:
            raise ValueError("abs_exact is only available for real coefficients")
        return abs(self.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.re == other and not self.im
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"

    def literal(self) -> str:
        """Render in the config literal syntax, e.g. ``3/2+1/2i``."""
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = QQi(0)
ONE = QQi(1)


def _coerce(value) -> QQi:
    if isinstance(value, QQi):
        return value
    if isinstance(value, (int, Fraction)):
        return QQi(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to QQi")


_LITERAL = re.compile(
    r"""^\s*
        (?P<re>[+-]?\d+(?:/\d+)?)?
        (?:(?P<im>[+-](?:\d+(?:/\d+)?)?)i)?
    \s*$""",
    re.VERBOSE,
)


def parse_coefficient(text: str) -> QQi:
    """Parse ``p/q``, ``p/q+r/si``, ``-i``, ``2i`` and friends."""
    s = text.strip()
    if not s:
        raise ValueError("empty coefficient literal")
    # pure-imaginary forms without a sign separator, e.g. "i", "3/2i"
    if s.endswith("i") and not _LITERAL.match(s):
        body = s[:-1]
        if body in ("", "+"):
            return QQi(0, 1)
        if body == "-":
            return QQi(0, -1)
        return QQi(0, Fraction(body))
    m = _LITERAL.match(s)
    if not m or (m.group("re") is None and m.group("im") is None):
        raise ValueError(f"bad coefficient literal: {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_raw = m.group("im")
    if im_raw is None:
        im_part = Fraction(0)
    elif im_raw in ("+", "-"):
        im_part = Fraction(f"{im_raw}1")
    else:
        im_part = Fraction(im_raw)
    return QQi(re_part, im_part)
