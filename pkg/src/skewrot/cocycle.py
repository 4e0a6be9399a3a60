"""The +/-1 step function, its Birkhoff sums along a rotation, and the paired walk.

`birkhoff_sum(n, x, ctx)` is the displacement after n rotation steps of the walk
that moves +1 while the orbit sits in [0, 1/2) and -1 otherwise; the pair version
tracks the same walk started at x and at x + t simultaneously.  Everything is
decided with exact integer arithmetic on lifted (a + b*sqrt(d))/L coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Optional

from . import cf
from .errors import PreconditionUnmetError, SumBoundViolationError
from .exact import HALF, CirclePoint, ExactReal


class PairValue(NamedTuple):
    first: int
    second: int

    def __add__(self, other):
        return PairValue(self.first + other[0], self.second + other[1])

    def __neg__(self):
        return PairValue(-self.first, -self.second)


class MembershipFlags(NamedTuple):
    """Exact bounded-search results for t in the rotation orbit (or its half shift)."""

    orbit_witness: Optional[int]  # j with t = <j*alpha>, |j| <= bound
    half_orbit_witness: Optional[int]  # j with t = <1/2 + j*alpha>, |j| <= bound
    bound: int


def _coerce_real(v) -> ExactReal:
    if isinstance(v, ExactReal):
        return v
    if isinstance(v, int):
        return ExactReal(v)
    if isinstance(v, Fraction):
        return ExactReal.from_fraction(v)
    if isinstance(v, CirclePoint):
        return v.value
    raise TypeError(f"cannot interpret {v!r} as an exact real")


class CocycleContext:
    """Immutable bundle of the rotation angle alpha and the offset t.

    alpha is reduced into (0, 1).  Rational alpha is accepted for diagnostics and
    flagged `approximate` (it stands in for a truncated non-quadratic angle).
    Membership of t in Z*alpha and Z*alpha + 1/2 is searched exactly up to
    `search_bound` on first use and cached.
    """

    __slots__ = ("alpha", "t", "search_bound", "_flags", "_table", "_eps_cache")

    def __init__(self, alpha, t=0, search_bound: int = 10_000):
        alpha = _coerce_real(alpha)
        alpha = alpha - alpha.floor()
        if alpha.sign() == 0:
            raise ValueError("rotation angle must be nonzero mod 1")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "t", CirclePoint(_coerce_real(t)))
        object.__setattr__(self, "search_bound", search_bound)
        object.__setattr__(self, "_flags", None)
        object.__setattr__(self, "_table", None)
        object.__setattr__(self, "_eps_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("CocycleContext is immutable")

    @property
    def approximate(self) -> bool:
        """True when alpha is rational (a truncation standing in for an irrational)."""
        return self.alpha.is_rational

    def membership(self) -> MembershipFlags:
        if self._flags is not None:
            return self._flags
        t = self.t
        target_half = t - HALF  # t = <1/2 + j*alpha>  <=>  t - 1/2 = <j*alpha>
        orbit = None
        half = None
        pos = CirclePoint(0)
        neg = CirclePoint(0)
        for j in range(self.search_bound + 1):
            for jj, y in ((j, pos), (-j, neg)) if j else ((0, pos),):
                if orbit is None and y == t:
                    orbit = jj
                if half is None and y == target_half:
                    half = jj
            if orbit is not None and half is not None:
                break
            pos = pos + self.alpha
            neg = neg - self.alpha
        flags = MembershipFlags(orbit, half, self.search_bound)
        object.__setattr__(self, "_flags", flags)
        return flags

    def table(self, *, depth: Optional[int] = None, cover: Optional[int] = None) -> cf.ConvergentTable:
        """Cached convergent table, regrown on demand."""
        cached = self._table
        exhausted = cached is not None and cached.finite
        if cover is not None:
            if cached is None or (cached.denominators[-1] < cover and not exhausted):
                cached = cf.expand_to_cover(self.alpha, cover, allow_short=True)
                object.__setattr__(self, "_table", cached)
            return cached
        depth = depth or 40
        if cached is None or (len(cached.convergents) < depth and not exhausted):
            cached = cf.expand(self.alpha, depth, allow_short=True)
            object.__setattr__(self, "_table", cached)
        return cf.prefix_table(cached, depth)


def step(x: CirclePoint) -> int:
    """+1 on [0, 1/2), -1 on [1/2, 1); boundaries belong to the right interval."""
    return 1 if x.in_first_half else -1


def _lift(alpha: ExactReal, x: ExactReal):
    """Common-denominator integer coordinates for the summation loop."""
    if alpha.d and x.d and alpha.d != x.d:
        # mixing is rejected at the arithmetic layer; trigger the same error
        _ = alpha + x
    d = alpha.d or x.d
    L = alpha.c * x.c // math.gcd(alpha.c, x.c)
    return d, L, (x.a * (L // x.c), x.b * (L // x.c)), (alpha.a * (L // alpha.c), alpha.b * (L // alpha.c))


def _count_lifted(n: int, A: int, B: int, Aa: int, Ba: int, L: int, d: int) -> int:
    """#{i < n: orbit point in [0, 1/2)} on lifted integer coordinates."""
    count = 0
    if B == 0 and Ba == 0:
        for _ in range(n):
            if 2 * A < L:
                count += 1
            A += Aa
            if A >= L:
                A -= L
        return count
    for _ in range(n):
        a2 = 2 * A - L
        b2 = 2 * B
        if a2 < 0:
            neg = True if b2 <= 0 else a2 * a2 > b2 * b2 * d
        elif a2 > 0:
            neg = False if b2 >= 0 else a2 * a2 < b2 * b2 * d
        else:
            neg = b2 < 0
        if neg:
            count += 1
        A += Aa
        B += Ba
        a3 = A - L
        if a3 >= 0:
            wrap = True if B >= 0 else a3 * a3 >= B * B * d
        else:
            wrap = B > 0 and a3 * a3 <= B * B * d
        if wrap:
            A -= L
    return count


def count_first_half(n: int, x: CirclePoint, ctx: CocycleContext) -> int:
    """Number of i in 0..n-1 with <x + i*alpha> in [0, 1/2)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return 0
    d, L, (A, B), (Aa, Ba) = _lift(ctx.alpha, x.value)
    return _count_lifted(n, A, B, Aa, Ba, L, d)


def birkhoff_sum(n: int, x: CirclePoint, ctx: CocycleContext) -> int:
    """Sum of the step function along the first n rotation steps (all signs of n).

    For n <= -1 the group property gives the value as -birkhoff_sum(-n, x + n*alpha).
    """
    if n == 0:
        return 0
    if n > 0:
        return 2 * count_first_half(n, x, ctx) - n
    shifted = x + ctx.alpha * n
    return -birkhoff_sum(-n, shifted, ctx)


def displacement_pair(n: int, x: CirclePoint, ctx: CocycleContext) -> PairValue:
    """(walk from x, walk from x + t) after n steps; both share the parity of n."""
    return PairValue(birkhoff_sum(n, x, ctx), birkhoff_sum(n, x + ctx.t, ctx))


def check_cocycle_identity(m: int, n: int, x: CirclePoint, ctx: CocycleContext) -> bool:
    """a_n(x + m*alpha) - a_{n+m}(x) + a_m(x) == 0; False flags a bug."""
    shifted = x + ctx.alpha * m
    return (
        birkhoff_sum(n, shifted, ctx) - birkhoff_sum(n + m, x, ctx) + birkhoff_sum(m, x, ctx)
    ) == 0


def check_shift_bound(m: int, n: int, x: CirclePoint, ctx: CocycleContext) -> bool:
    """|a_n(x + m*alpha) - a_n(x)| <= 2m and |a_n(x + 1/2 + m*alpha) + a_n(x)| <= 2m."""
    if not (n > m >= 0):
        raise PreconditionUnmetError("requires n > m >= 0")
    base = birkhoff_sum(n, x, ctx)
    shifted = birkhoff_sum(n, x + ctx.alpha * m, ctx)
    anti = birkhoff_sum(n, x + (ctx.alpha * m + HALF), ctx)
    return abs(shifted - base) <= 2 * m and abs(anti + base) <= 2 * m


class DenjoyWitness(NamedTuple):
    q: int
    p: int
    max_abs: int
    interval_count: int


def denjoy_koksma_check(q: int, ctx: CocycleContext) -> DenjoyWitness:
    """Exact max of |a_q| over the whole circle, via the constancy partition.

    Requires q to be a convergent denominator with |alpha - p/q| < 1/q^2; the
    maximum must be <= 3 (the bound is |a_q| < 4 and a_q has the parity of q),
    otherwise SumBoundViolationError reports an arithmetic bug.
    """
    from . import partition  # deferred: partition builds on this module

    table = ctx.table(cover=q)
    denominators = table.denominators
    if q not in denominators:
        raise PreconditionUnmetError(f"{q} is not a convergent denominator")
    row = table.convergents[denominators.index(q)]
    if not abs(ctx.alpha * q - row.p) * q < 1:
        raise PreconditionUnmetError(f"|alpha - {row.p}/{q}| >= 1/{q}^2")
    part = partition.build(q, ctx, include_pair=False, verify="off")
    max_abs = max(abs(v.first) for v in part.values)
    if max_abs > 3:
        raise SumBoundViolationError(f"|a_{q}| = {max_abs} > 3 on a constancy interval")
    return DenjoyWitness(q, row.p, max_abs, part.interval_count)
