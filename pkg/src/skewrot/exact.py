"""Exact arithmetic for numbers of the form (a + b*sqrt(d))/c and for circle points.

Every quantity the rest of the package touches (rotation angle, offset, interval
endpoints, interval lengths, measures) is an :class:`ExactReal`.  All comparisons,
floors and nearest-integer decisions are made with integer arithmetic only; no
floating point ever sits on a decision path.  Floats and decimal strings are
produced for display and are labeled non-authoritative.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import IncomparableRepresentationsError


def _gcd3(a: int, b: int, c: int) -> int:
    return math.gcd(math.gcd(a, b), c)


def _square_free_split(d: int) -> tuple[int, int]:
    """Return (s, d0) with d = s*s*d0 and d0 squarefree."""
    if d < 0:
        raise ValueError("negative radicand")
    if d in (0, 1):
        return 1, d
    s = 1
    p = 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            s *= p
        p += 1 if p == 2 else 2
    return s, d


def _sign_a_plus_b_sqrt_d(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d), d >= 0, by integer arithmetic on a^2 and b^2*d."""
    if b == 0 or d == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    lhs = a * a
    rhs = b * b * d
    if lhs == rhs:
        return 0  # only reachable when d is a perfect square
    if lhs > rhs:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


class ExactReal:
    """An exact real (a + b*sqrt(d))/c with integer a, b, c > 0 and squarefree d.

    Rationals are the d = 0 case (b forced to 0).  Instances are normalized on
    construction (gcd(a, b, c) = 1, c > 0, square part of d folded into b) and
    treated as immutable.  Values from two distinct quadratic fields cannot be
    combined; one side must be rational.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b: int = 0, c: int = 1, d: int = 0):
        if isinstance(a, ExactReal):
            if b != 0 or c != 1 or d != 0:
                raise TypeError("cannot combine ExactReal seed with extra components")
            a, b, c, d = a.a, a.b, a.c, a.d
        elif isinstance(a, Fraction):
            if b != 0 or c != 1 or d != 0:
                raise TypeError("cannot combine Fraction seed with extra components")
            a, b, c, d = a.numerator, 0, a.denominator, 0
        if not all(isinstance(v, int) for v in (a, b, c, d)):
            raise TypeError("components must be integers")
        if c == 0:
            raise ZeroDivisionError("zero denominator")
        if d < 0:
            raise ValueError("radicand must be non-negative")
        if b != 0 and d > 1:
            s, d = _square_free_split(d)
            b *= s
        if b == 0 or d == 0:
            b, d = 0, 0
        if d == 1:
            a, b, d = a + b, 0, 0
        if c < 0:
            a, b, c = -a, -b, -c
        g = _gcd3(abs(a), abs(b), c)
        if g > 1:
            a //= g
            b //= g
            c //= g
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("ExactReal is immutable")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_fraction(cls, f: Fraction) -> "ExactReal":
        return cls(f.numerator, 0, f.denominator, 0)

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    def as_fraction(self) -> Fraction:
        if self.d != 0:
            raise ValueError("irrational value has no Fraction form")
        return Fraction(self.a, self.c)

    # -- field compatibility -------------------------------------------------

    def _join(self, other) -> tuple["ExactReal", "ExactReal", int]:
        """Coerce other and find the common radicand; error on mixed fields."""
        if isinstance(other, int):
            other = ExactReal(other)
        elif isinstance(other, Fraction):
            other = ExactReal.from_fraction(other)
        elif not isinstance(other, ExactReal):
            return NotImplemented, NotImplemented, 0
        if self.d == other.d:
            return self, other, self.d
        if self.d == 0:
            return self, other, other.d
        if other.d == 0:
            return self, other, self.d
        raise IncomparableRepresentationsError(
            f"cannot combine sqrt({self.d}) with sqrt({other.d}) exactly"
        )

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        x, y, d = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return ExactReal(x.a * y.c + y.a * x.c, x.b * y.c + y.b * x.c, x.c * y.c, d)

    __radd__ = __add__

    def __sub__(self, other):
        x, y, d = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return ExactReal(x.a * y.c - y.a * x.c, x.b * y.c - y.b * x.c, x.c * y.c, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x, y, d = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return ExactReal(
            x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, x.c * y.c, d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        x, y, d = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        if y.a == 0 and y.b == 0:
            raise ZeroDivisionError("division by zero")
        # multiply by the conjugate of the numerator part of y
        denom = y.a * y.a - y.b * y.b * d
        num_a = x.a * y.a - x.b * y.b * d
        num_b = x.b * y.a - x.a * y.b
        return ExactReal(num_a * y.c, num_b * y.c, x.c * denom, d)

    def __rtruediv__(self, other):
        if isinstance(other, int):
            other = ExactReal(other)
        elif isinstance(other, Fraction):
            other = ExactReal.from_fraction(other)
        else:
            return NotImplemented
        return other / self

    def __neg__(self):
        return ExactReal(-self.a, -self.b, self.c, self.d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact decisions -------------------------------------------------------

    def sign(self) -> int:
        return _sign_a_plus_b_sqrt_d(self.a, self.b, self.d)

    def _cmp(self, other) -> int:
        x, y, d = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return _sign_a_plus_b_sqrt_d(
            x.a * y.c - y.a * x.c, x.b * y.c - y.b * x.c, d
        )

    def __eq__(self, other):
        try:
            r = self._cmp(other)
        except IncomparableRepresentationsError:
            return False  # values in distinct fields are never equal
        if r is NotImplemented:
            return NotImplemented
        return r == 0

    def __lt__(self, other):
        r = self._cmp(other)
        if r is NotImplemented:
            return NotImplemented
        return r < 0

    def __le__(self, other):
        r = self._cmp(other)
        if r is NotImplemented:
            return NotImplemented
        return r <= 0

    def __gt__(self, other):
        r = self._cmp(other)
        if r is NotImplemented:
            return NotImplemented
        return r > 0

    def __ge__(self, other):
        r = self._cmp(other)
        if r is NotImplemented:
            return NotImplemented
        return r >= 0

    def __hash__(self):
        if self.d == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return self.sign() != 0

    def floor(self) -> int:
        """Exact floor; the sqrt part is bracketed with an integer square root."""
        if self.b == 0:
            return self.a // self.c
        t = self.b * self.b * self.d
        s = math.isqrt(t)
        # b*sqrt(d) is irrational here (d squarefree >= 2, b != 0), so strict bracket
        fl = s if self.b > 0 else -(s + 1)
        return (self.a + fl) // self.c

    def nearest_integer(self) -> int:
        """The closest integer, ties at half-integers broken toward even."""
        m = self.floor()
        twice_frac = (self - m) * 2
        r = twice_frac._cmp(1)
        if r < 0:
            return m
        if r > 0:
            return m + 1
        return m if m % 2 == 0 else m + 1

    def distance_to_integers(self) -> "ExactReal":
        """||x||: exact distance to the nearest integer, in [0, 1/2]."""
        return abs(self - self.nearest_integer())

    def scaled_floor(self, bits: int) -> int:
        """floor(x * 2**bits), exact; used for monotone integer sort keys."""
        if self.b == 0:
            return (self.a << bits) // self.c
        t = (self.b * self.b * self.d) << (2 * bits)
        s = math.isqrt(t)
        fl = s if self.b > 0 else -(s + 1)
        return ((self.a << bits) + fl) // self.c

    # -- rendering -------------------------------------------------------------

    def __float__(self):
        # debugging/display only; never used for exact decisions
        if self.b == 0:
            return self.a / self.c
        try:
            return (self.a + self.b * math.sqrt(self.d)) / self.c
        except OverflowError:
            return self.scaled_floor(53) / float(1 << 53)

    def decimal(self, digits: int = 50) -> str:
        """Truncated decimal rendering (non-authoritative, for output only)."""
        neg = self.sign() < 0
        mag = -self if neg else self
        scaled = (mag * (10**digits)).floor()
        s = str(scaled).rjust(digits + 1, "0")
        out = s[:-digits] + "." + s[-digits:] if digits else s
        return "-" + out if neg else out

    def __str__(self):
        if self.d == 0:
            return str(self.a) if self.c == 1 else f"{self.a}/{self.c}"
        return f"({self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt({self.d}))/{self.c}"

    def __repr__(self):
        return f"ExactReal({self.a}, {self.b}, {self.c}, {self.d})"


ZERO = ExactReal(0)
ONE = ExactReal(1)
HALF = ExactReal(1, 0, 2)


def nearest_integer(x: ExactReal) -> int:
    return x.nearest_integer()


def distance_to_integers(x: ExactReal) -> ExactReal:
    return x.distance_to_integers()


def compare(x: ExactReal, y) -> int:
    """Exact three-way comparison: -1, 0 or +1."""
    return x._cmp(y)


class CirclePoint:
    """A point of the circle [0, 1): an ExactReal reduced modulo 1.

    Addition and subtraction re-reduce exactly.  Ordering and hashing follow the
    underlying value.
    """

    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, CirclePoint):
            v = value.value
        else:
            if isinstance(value, (int, Fraction)):
                value = ExactReal(value) if isinstance(value, int) else ExactReal.from_fraction(value)
            v = value - value.floor()
        object.__setattr__(self, "value", v)

    def __setattr__(self, name, value):
        raise AttributeError("CirclePoint is immutable")

    def _other_value(self, other):
        if isinstance(other, CirclePoint):
            return other.value
        if isinstance(other, int):
            return ExactReal(other)
        if isinstance(other, Fraction):
            return ExactReal.from_fraction(other)
        if isinstance(other, ExactReal):
            return other
        return None

    def __add__(self, other):
        v = self._other_value(other)
        if v is None:
            return NotImplemented
        return CirclePoint(self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._other_value(other)
        if v is None:
            return NotImplemented
        return CirclePoint(self.value - v)

    def __eq__(self, other):
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return self.value == other.value

    def __lt__(self, other):
        return self.value < other.value

    def __le__(self, other):
        return self.value <= other.value

    def __gt__(self, other):
        return self.value > other.value

    def __ge__(self, other):
        return self.value >= other.value

    def __hash__(self):
        return hash(("circle", self.value))

    @property
    def in_first_half(self) -> bool:
        """Whether the point lies in [0, 1/2); boundaries decided exactly."""
        return self.value._cmp(HALF) < 0

    def norm(self) -> ExactReal:
        """||x||: distance to the nearest integer (here: to {0, 1})."""
        return self.value.distance_to_integers()

    def antipode(self) -> "CirclePoint":
        return self + HALF

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"CirclePoint({self.value!r})"


def reduce_mod_1(x: ExactReal) -> CirclePoint:
    """x - floor(x), exactly, as a circle point."""
    return CirclePoint(x)


# -- parsing -------------------------------------------------------------------

_INT_RE = re.compile(r"^[+-]?\d+$")
_RAT_RE = re.compile(r"^([+-]?\d+)/(\d+)$")
# (a+b*sqrt(d))/c with optional a, optional b (default 1), optional '*', optional /c
_SURD_RE = re.compile(
    r"^\(?\s*(?:(?P<a>[+-]?\d+)\s*)?"
    r"(?P<sgn>[+-])?\s*(?:(?P<b>\d+)\s*\*?\s*)?sqrt\(\s*(?P<d>\d+)\s*\)\s*"
    r"\)?\s*(?:/\s*(?P<c>\d+))?$"
)


def parse_real(text: str) -> ExactReal:
    """Parse `p`, `p/q` or `(a+b*sqrt(d))/c` (and light variants) exactly."""
    s = text.strip().replace(" ", "")
    if _INT_RE.match(s):
        return ExactReal(int(s))
    m = _RAT_RE.match(s)
    if m:
        return ExactReal(int(m.group(1)), 0, int(m.group(2)))
    m = _SURD_RE.match(s)
    if m:
        a = int(m.group("a")) if m.group("a") else 0
        b = int(m.group("b")) if m.group("b") else 1
        if m.group("sgn") == "-":
            b = -b
        if m.group("a") and m.group("sgn") is None:
            raise ValueError(f"missing sign between terms in {text!r}")
        d = int(m.group("d"))
        c = int(m.group("c")) if m.group("c") else 1
        return ExactReal(a, b, c, d)
    raise ValueError(f"cannot parse exact real from {text!r}")
