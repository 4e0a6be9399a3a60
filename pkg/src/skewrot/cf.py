"""Continued fractions: partial quotients, convergents, denominator set, best-approximation checks.

Quotients come from the exact floor-and-invert recursion on :class:`ExactReal`
values.  For quadratic surds the recursion is eventually periodic; the period is
detected by state repetition, after which quotients are generated by cycling, so
tables of any depth cost no further surd arithmetic.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .errors import (
    BestApproxViolationError,
    EndOfTableError,
    RationalExhaustedError,
    SeparationBoundViolationError,
)
from .exact import HALF, ExactReal


class Convergent(NamedTuple):
    k: int  # index in the plain continued-fraction recurrence
    p: int
    q: int


class BadlyApproximable(NamedTuple):
    applicable: bool  # False for rationals (finite expansion)
    bounded: bool
    max_quotient: int
    depth_limited: bool  # True when no exact period was available


@dataclass(frozen=True)
class ConvergentTable:
    """Partial quotients and convergents of alpha, with strictly increasing denominators.

    `depth` rows are kept; when the first two plain convergents share q = 1 the
    later (better) one is kept, so `denominators` is exactly the increasing
    denominator set.
    """

    alpha: ExactReal
    a0: int
    quotients: tuple[int, ...]  # a_1, a_2, ... as consumed by the kept rows
    convergents: tuple[Convergent, ...]
    period: Optional[tuple[int, int]] = None  # (start index into a_1.., period length)
    period_quotients: tuple[int, ...] = field(default=())
    finite: bool = False  # rational alpha whose expansion ended at the last row

    @property
    def denominators(self) -> list[int]:
        return [row.q for row in self.convergents]

    def norm_q_alpha(self, row_index: int) -> ExactReal:
        """||q_k * alpha|| computed as |q*alpha - p| for the table row."""
        row = self.convergents[row_index]
        return abs(self.alpha * row.q - row.p)


class _QuotientStream:
    """Exact floor-and-invert recursion with period detection for surds."""

    def __init__(self, alpha: ExactReal):
        self.a0 = alpha.floor()
        self.state = alpha - self.a0  # fractional part in [0, 1)
        self.emitted: list[int] = []
        self.seen: dict[tuple[int, int, int, int], int] = {}
        self.period: Optional[tuple[int, int]] = None
        self.finished = False  # rational expansion ended

    def next_quotient(self) -> Optional[int]:
        if self.period is not None:
            start, length = self.period
            idx = len(self.emitted)
            a = self.emitted[start + (idx - start) % length]
            self.emitted.append(a)
            return a
        if self.finished or self.state.sign() == 0:
            self.finished = True
            return None
        st = self.state
        if st.d != 0:
            key = (st.a, st.b, st.c, st.d)
            if key in self.seen:
                self.period = (self.seen[key], len(self.emitted) - self.seen[key])
                return self.next_quotient()
            self.seen[key] = len(self.emitted)
        inv = ExactReal(1) / st
        a = inv.floor()
        self.state = inv - a
        self.emitted.append(a)
        return a


def expand(alpha: ExactReal, depth: int, *, allow_short: bool = False) -> ConvergentTable:
    """Table with exactly `depth` convergents (strictly increasing denominators).

    Raises RationalExhaustedError when a rational alpha runs out of quotients
    first, unless allow_short is set (then the finite table is returned and
    flagged).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    stream = _QuotientStream(alpha)
    a0 = stream.a0
    quotients: list[int] = []
    rows: list[Convergent] = [Convergent(0, a0, 1)]
    p_prev2, q_prev2 = 1, 0  # (p_{-1}, q_{-1})
    p_prev, q_prev = a0, 1  # (p_0, q_0)
    k = 0
    while len(rows) < depth or k == 0:
        a = stream.next_quotient()
        if a is None:
            if len(rows) == depth or allow_short:
                break
            raise RationalExhaustedError(
                f"continued fraction of {alpha} ends after {len(rows)} convergents"
            )
        k += 1
        p, q = a * p_prev + p_prev2, a * q_prev + q_prev2
        if k == 1 and q == 1:
            rows[0] = Convergent(1, p, 1)  # q0 = q1 = 1: keep the closer approximant
            quotients.append(a)
        elif len(rows) < depth:
            rows.append(Convergent(k, p, q))
            quotients.append(a)
        else:
            break  # depth reached before the probe quotient was needed
        p_prev2, q_prev2, p_prev, q_prev = p_prev, q_prev, p, q
    period_quots: tuple[int, ...] = ()
    if stream.period is not None:
        start, length = stream.period
        period_quots = tuple(stream.emitted[start : start + length])
    finite = stream.finished or (alpha.d == 0 and stream.state.sign() == 0)
    return ConvergentTable(
        alpha=alpha,
        a0=a0,
        quotients=tuple(quotients),
        convergents=tuple(rows),
        period=stream.period,
        period_quotients=period_quots,
        finite=finite,
    )


def expand_to_cover(alpha: ExactReal, q_max: int, *, allow_short: bool = False) -> ConvergentTable:
    """Smallest-ish table whose last denominator is >= q_max (or the full finite table)."""
    depth = 2
    while True:
        table = expand(alpha, depth, allow_short=True)
        if table.denominators[-1] >= q_max:
            return table
        if len(table.convergents) < depth:  # rational: expansion exhausted early
            if allow_short:
                return table
            raise RationalExhaustedError(
                f"continued fraction of {alpha} ends before reaching q >= {q_max}"
            )
        depth += 8


def prefix_table(table: ConvergentTable, depth: int) -> ConvergentTable:
    """The first `depth` rows as a table of their own (no new arithmetic)."""
    if len(table.convergents) <= depth:
        return table
    rows = table.convergents[:depth]
    quotients = table.quotients[: rows[-1].k]
    period, period_quots = table.period, table.period_quotients
    if period is not None and period[0] > len(quotients):
        period, period_quots = None, ()
    return ConvergentTable(
        alpha=table.alpha,
        a0=table.a0,
        quotients=tuple(quotients),
        convergents=tuple(rows),
        period=period,
        period_quotients=period_quots,
        finite=False,
    )


def denominator_set(table: ConvergentTable) -> list[int]:
    """The increasing denominator list {q_k}; duplicates were collapsed at build time."""
    if not table.convergents:
        raise ValueError("empty table")
    return table.denominators


def next_denominator(q: int, denominators: list[int]) -> int:
    """The successor of q in the denominator set."""
    i = bisect_right(denominators, q)
    if i == 0 or denominators[i - 1] != q:
        raise ValueError(f"{q} is not in the denominator set")
    if i == len(denominators):
        raise EndOfTableError(f"{q} is the last computed denominator")
    return denominators[i]


class BestApproxWitness(NamedTuple):
    q: int
    q_next: int
    min_norm: ExactReal
    argmin_q: int


def verify_best_approx(table: ConvergentTable, k: int) -> BestApproxWitness:
    """Exhaustively confirm min ||q*alpha|| over q_k <= q < q_{k+1} sits at q_k.

    Also checks ||q_k*alpha|| > 1/(2*q_{k+1}).  Any violation is an arithmetic
    bug and raises BestApproxViolationError.
    """
    if k + 1 >= len(table.convergents):
        raise ValueError("k+1 must lie within the table")
    alpha = table.alpha
    q_k = table.convergents[k].q
    q_next = table.convergents[k + 1].q
    base_norm = table.norm_q_alpha(k)
    best = base_norm
    arg = q_k
    y = alpha * q_k
    for q in range(q_k + 1, q_next):
        y = y + alpha
        norm = y.distance_to_integers()
        if norm < best:
            best, arg = norm, q
    if arg != q_k:
        raise BestApproxViolationError(
            f"||{arg}*alpha|| < ||{q_k}*alpha|| inside [{q_k}, {q_next})"
        )
    lower = ExactReal(1, 0, 2 * q_next)
    if not base_norm > lower:
        raise BestApproxViolationError(
            f"||{q_k}*alpha|| <= 1/(2*{q_next})"
        )
    return BestApproxWitness(q_k, q_next, best, arg)


def is_badly_approximable(table: ConvergentTable) -> BadlyApproximable:
    """Bounded-partial-quotient test; exact over one period when one was detected."""
    if table.finite:
        return BadlyApproximable(False, False, max(table.quotients, default=0), False)
    if table.period is not None:
        start, _ = table.period
        relevant = list(table.quotients[:start]) + list(table.period_quotients)
        return BadlyApproximable(True, True, max(relevant), False)
    return BadlyApproximable(True, True, max(table.quotients), True)


class SeparationWitness(NamedTuple):
    q: int
    min_norm: ExactReal
    argmin_j: int
    bound: ExactReal  # 1/(24q)


def half_point_separation(table: ConvergentTable, q: int) -> SeparationWitness:
    """Exact min of ||1/2 - j*alpha|| over |j| < q, checked against 1/(24q).

    ||1/2 - j*alpha|| = ||1/2 + j*alpha||, so only j >= 0 is enumerated.
    """
    if q not in table.denominators:
        raise ValueError(f"{q} is not a computed denominator")
    alpha = table.alpha
    best = HALF
    arg = 0
    y = HALF
    for j in range(1, q):
        y = y - alpha
        norm = y.distance_to_integers()
        if norm < best:
            best, arg = norm, j
    bound = ExactReal(1, 0, 24 * q)
    if best < bound:
        raise SeparationBoundViolationError(
            f"min ||1/2 - j*alpha|| = {best} < 1/(24*{q}) at j = {arg}"
        )
    return SeparationWitness(q, best, arg, bound)


def convergent_value(a0: int, quotients: list[int]) -> ExactReal:
    """Evaluate [a0; a_1, ..., a_k] as an exact rational (test oracle)."""
    num, den = 1, 0
    for a in reversed(quotients):
        num, den = a * num + den, num
    num, den = a0 * num + den, num
    g = math.gcd(num, den)
    return ExactReal(num // g, 0, den // g)


def table_to_dict(table: ConvergentTable) -> dict:
    """JSON-ready form of the table."""
    bad = is_badly_approximable(table)
    return {
        "alpha": str(table.alpha),
        "alpha_decimal": table.alpha.decimal(),
        "a0": table.a0,
        "quotients": list(table.quotients),
        "convergents": [{"k": r.k, "p": r.p, "q": r.q} for r in table.convergents],
        "finite": table.finite,
        "period_quotients": list(table.period_quotients),
        "badly_approximable": bad.bounded if bad.applicable else None,
        "max_quotient": bad.max_quotient,
        "depth_limited": bad.depth_limited,
    }
