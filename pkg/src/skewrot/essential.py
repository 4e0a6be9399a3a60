"""Orbit-proximity minima, the persistent-value detector, and subgroup classification.

epsilon(q) and theta(q) scale (by q) the distance from the orbit segment
{j*alpha : |j| < q} to -t and to 1/2 - t.  The detector walks the convergent
denominators, keeps pair values whose constancy classes stay above a measure
threshold for a window of consecutive denominators, and closes the survivors
into a subgroup of Z^2 in canonical form.  Classifications are empirical: every
report carries the depth and thresholds that produced it, never a claim of proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from . import cf, partition
from .cocycle import CocycleContext, PairValue, _lift
from .errors import PreconditionUnmetError
from .exact import HALF, CirclePoint, ExactReal

_FAST_MIN_Q = 4_096
_GUARD = 1 << 24
_M64 = 1 << 64
_TWENTY_FOURTH = ExactReal(1, 0, 24)


class EpsilonTheta(NamedTuple):
    q: int
    epsilon: ExactReal
    theta: ExactReal
    i_q: int  # argmin for epsilon; ties: smaller |j|, then negative j
    j_q: int  # argmin for theta


def _min_norm_lifted(q: int, target: ExactReal, alpha: ExactReal) -> tuple:
    """Exact (min ||target - j*alpha||, argmin) over |j| < q on integer coordinates."""
    d, L, (A0, B0), (Aa, Ba) = _lift(alpha, target)

    def dist_pair(A, B):
        # distance of (A + B*sqrt(d))/L in [0, L) to {0, L}
        a2, b2 = 2 * A - L, 2 * B
        if a2 < 0:
            lower = True if b2 <= 0 else a2 * a2 > b2 * b2 * d
        elif a2 > 0:
            lower = False if b2 >= 0 else a2 * a2 < b2 * b2 * d
        else:
            lower = b2 < 0
        return (A, B) if lower else (L - A, -B)

    def less(x, y):
        a, b = x[0] - y[0], x[1] - y[1]
        if b == 0 or d == 0:
            return a < 0
        if a == 0:
            return b < 0
        if a < 0 and b <= 0:
            return True
        if a > 0 and b >= 0:
            return False
        return (a * a > b * b * d) if a < 0 else (a * a < b * b * d)

    def wrap_down(A, B):
        # value moved up by alpha < 1: subtract L when it left [0, L)
        a3 = A - L
        if a3 >= 0:
            high = True if B >= 0 else a3 * a3 >= B * B * d
        else:
            high = B > 0 and a3 * a3 <= B * B * d
        return (A - L, B) if high else (A, B)

    def wrap_up(A, B):
        # value moved down by alpha < 1: add L when it went below 0
        if A >= 0:
            neg = B < 0 and A * A < B * B * d
        else:
            neg = B <= 0 or A * A > B * B * d
        return (A + L, B) if neg else (A, B)

    best = dist_pair(A0, B0)
    best_j = 0
    neg_A, neg_B = A0, B0
    pos_A, pos_B = A0, B0
    for j in range(1, q):
        # j = -j first (tie rule), then +j
        neg_A += Aa
        neg_B += Ba
        neg_A, neg_B = wrap_down(neg_A, neg_B)
        cand = dist_pair(neg_A, neg_B)
        if less(cand, best):
            best, best_j = cand, -j
        pos_A -= Aa
        pos_B -= Ba
        pos_A, pos_B = wrap_up(pos_A, pos_B)
        cand = dist_pair(pos_A, pos_B)
        if less(cand, best):
            best, best_j = cand, j
    return ExactReal(best[0], best[1], L, d), best_j


def _exact_norm_at(target: ExactReal, alpha: ExactReal, j: int) -> ExactReal:
    return CirclePoint(target - alpha * j).norm()


def _min_norm_fast(q: int, target: ExactReal, alpha: ExactReal) -> tuple:
    """uint64-key approximate scan with exact confirmation of all near-minimal j."""
    with np.errstate(over="ignore"):
        k_alpha = np.uint64(partition._circle_key64(alpha))
        k0 = np.uint64(partition._circle_key64(CirclePoint(target).value))
        j = np.arange(q, dtype=np.uint64)
        keys_pos = k0 - j * k_alpha  # j = 0..q-1
        keys_neg = k0 + j[1:] * k_alpha  # j = -1..-(q-1)
        dist_pos = np.minimum(keys_pos, np.uint64(0) - keys_pos)
        dist_neg = np.minimum(keys_neg, np.uint64(0) - keys_neg)
    approx = min(int(dist_pos.min()), int(dist_neg.min()))
    cut = np.uint64(min(approx + 2 * _GUARD, _M64 - 1))
    cand = [int(i) for i in np.nonzero(dist_pos <= cut)[0]]
    cand += [-(int(i) + 1) for i in np.nonzero(dist_neg <= cut)[0]]
    if len(cand) > 256:
        return _min_norm_lifted(q, target, alpha)
    best = None
    best_j = 0
    for jj in sorted(cand, key=lambda v: (abs(v), v >= 0)):
        norm = _exact_norm_at(target, alpha, jj)
        if best is None or norm < best:
            best, best_j = norm, jj
    return best, best_j


def epsilon_theta(q: int, ctx: CocycleContext, *, path: str = "auto") -> EpsilonTheta:
    """Exact epsilon(q), theta(q) and their argmins by enumeration over |j| < q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    cached = ctx._eps_cache.get(q) if path == "auto" else None
    if cached is not None:
        return cached
    eps_target = CirclePoint(-ctx.t.value).value
    theta_target = CirclePoint(HALF - ctx.t.value).value
    use_fast = path == "fast" or (
        path == "auto"
        and q >= _FAST_MIN_Q
        and not ctx.alpha.is_rational
        and partition._fast_guards_ok(q, ctx, True)
    )
    minimize = _min_norm_fast if use_fast else _min_norm_lifted
    eps_norm, i_q = minimize(q, eps_target, ctx.alpha)
    theta_norm, j_q = minimize(q, theta_target, ctx.alpha)
    result = EpsilonTheta(q, eps_norm * q, theta_norm * q, i_q, j_q)
    if path == "auto":
        ctx._eps_cache[q] = result
    return result


def epsilon_theta_table(ctx: CocycleContext, depth: int, *, path: str = "auto") -> list:
    table = ctx.table(depth=depth)
    return [epsilon_theta(q, ctx, path=path) for q in table.denominators]


# -- detector --------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateValue:
    """A pair value with the trail of denominators and class measures that back it."""

    value: PairValue
    evidence: tuple  # ((q, measure: ExactReal), ...) over all hits, q increasing
    min_measure: ExactReal

    def to_dict(self):
        return {
            "value": [self.value.first, self.value.second],
            "evidence": [{"q": q, "measure": str(m), "measure_decimal": m.decimal(12)} for q, m in self.evidence],
            "min_measure": str(self.min_measure),
        }


def _coerce_threshold(delta) -> ExactReal:
    if isinstance(delta, ExactReal):
        return delta
    if isinstance(delta, Fraction):
        return ExactReal.from_fraction(delta)
    if isinstance(delta, int):
        return ExactReal(delta)
    raise TypeError("delta must be exact (int, Fraction or ExactReal)")


def detect(q_sequence, ctx: CocycleContext, delta, window: int, *,
           seed: int = 0, partition_path: str = "auto") -> list:
    """Pair values whose classes stay above `delta` for `window` consecutive denominators.

    Per q the hit set is every histogram class with measure >= delta, plus the
    right-neighbor classes of the dominant class whose measure reaches
    min{1/24, epsilon(q), theta(q)}/128 (skipped when that bound is exactly 0,
    as happens when t sits on the orbit or its half shift).
    """
    delta = _coerce_threshold(delta)
    if not delta.sign() > 0:
        raise PreconditionUnmetError("delta must be positive")
    if window < 2:
        raise PreconditionUnmetError("window must be >= 2")
    q_sequence = list(q_sequence)
    if any(b <= a for a, b in zip(q_sequence, q_sequence[1:])):
        raise PreconditionUnmetError("q_sequence must be strictly increasing")
    hits: dict = {}
    for idx, q in enumerate(q_sequence):
        part = partition.build(q, ctx, seed=seed, path=partition_path)
        hist = part.value_histogram()
        hit_values = {v for v, m in hist.items() if m >= delta}
        et = epsilon_theta(q, ctx)
        floor_bound = _TWENTY_FOURTH
        for other in (et.epsilon, et.theta):
            if other < floor_bound:
                floor_bound = other
        if floor_bound.sign() > 0:
            tau = floor_bound * Fraction(1, 128)
            neighbors = part.right_neighbor_classes(part.dominant_value())
            for v, m in neighbors.measures.items():
                if m >= tau:
                    hit_values.add(v)
        for v in hit_values:
            hits.setdefault(v, []).append((idx, q, hist[v]))
    out = []
    for v in sorted(hits):
        rows = hits[v]
        run = best_run = 1
        for (i0, _, _), (i1, _, _) in zip(rows, rows[1:]):
            run = run + 1 if i1 == i0 + 1 else 1
            best_run = max(best_run, run)
        if best_run >= window:
            evidence = tuple((q, m) for _, q, m in rows)
            mn = evidence[0][1]
            for _, m in evidence[1:]:
                if m < mn:
                    mn = m
            out.append(CandidateValue(PairValue(*v), evidence, mn))
    return out


# -- subgroup closure ---------------------------------------------------------------


def _xgcd(a: int, b: int) -> tuple:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        qq = g // ng
        x, nx = nx, x - qq * nx
        y, ny = ny, y - qq * ny
        g, ng = ng, g - qq * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


@dataclass(frozen=True)
class SubgroupZ2:
    """A subgroup of Z^2 in canonical row form: [(a, b)] and/or [(0, c)], a, c > 0, 0 <= b < c."""

    basis: tuple

    def __contains__(self, v) -> bool:
        v1, v2 = int(v[0]), int(v[1])
        rows = self.basis
        if not rows:
            return v1 == 0 and v2 == 0
        if rows[0][0] == 0:
            return v1 == 0 and v2 % rows[0][1] == 0
        a, b = rows[0]
        if v1 % a != 0:
            return False
        rest = v2 - (v1 // a) * b
        if len(rows) == 2:
            return rest % rows[1][1] == 0
        return rest == 0

    @property
    def classification(self) -> str:
        rows = self.basis
        if not rows:
            return "TrivialZero"
        if rows == ((1, 1), (0, 2)):
            return "FullG"
        if rows == ((1, 1),):
            return "Diagonal"
        if rows == ((1, -1),):
            return "AntiDiagonal"
        return "Other"

    def to_dict(self):
        return {"basis": [list(r) for r in self.basis], "classification": self.classification}


def close_subgroup(values) -> SubgroupZ2:
    """Canonical basis of the subgroup of Z^2 generated by the given pairs.

    The result is independent of ordering and of the choice of generating set
    (Hermite-style row reduction with a final off-diagonal reduction).
    """
    r1 = None  # (a, b) with a > 0
    c = 0
    for v in values:
        if isinstance(v, CandidateValue):
            v = v.value
        v1, v2 = int(v[0]), int(v[1])
        if v1 == 0 and v2 == 0:
            continue
        if v1 == 0:
            c = math.gcd(c, abs(v2))
            continue
        if v1 < 0:
            v1, v2 = -v1, -v2
        if r1 is None:
            r1 = (v1, v2)
            continue
        a, b = r1
        g, x, y = _xgcd(a, v1)
        r1 = (g, x * b + y * v2)
        c = math.gcd(c, abs((a // g) * v2 - (v1 // g) * b))
    rows = []
    if r1 is not None:
        a, b = r1
        if c:
            b %= c
        rows.append((a, b))
    if c:
        rows.append((0, c))
    return SubgroupZ2(tuple(rows))


# -- table-level criteria ---------------------------------------------------------


class LimsupReport(NamedTuple):
    holds_empirically: bool
    best_delta: ExactReal  # min over the tail of min{eps, theta}
    tail_qs: tuple
    depth: int


def _tail(rows):
    n = len(rows)
    return rows[n - max(1, math.ceil(n / 3)):]


def limsup_criterion(ctx: CocycleContext, depth: int, *, table=None) -> LimsupReport:
    """Empirical stand-in for a positive limsup of min{eps(q), theta(q)}.

    The last third of the computed denominators is the proxy for "infinitely
    many"; best_delta is the exact minimum of min{eps, theta} over that tail.
    """
    if depth < 3:
        raise PreconditionUnmetError("depth must be >= 3")
    rows = table if table is not None else epsilon_theta_table(ctx, depth)
    tail = _tail(rows)
    best = None
    for row in tail:
        m = row.epsilon if row.epsilon < row.theta else row.theta
        if best is None or m < best:
            best = m
    return LimsupReport(best.sign() > 0, best, tuple(r.q for r in tail), depth)


class DecayReport(NamedTuple):
    argmin_stabilizes: str  # "no" | "i_q" | "j_q"
    witness: Optional[int]  # k with t = <k*alpha> (or <1/2 + k*alpha>)
    inferred: Optional[str]  # "t_in_orbit" | "t_in_half_orbit"
    confirmed: Optional[bool]  # exact membership re-check of the witness
    tail_qs: tuple


def decay_diagnosis(ctx: CocycleContext, depth: int, *, table=None) -> DecayReport:
    """Dichotomy readout: a constant argmin with exactly vanishing product names a witness.

    Requires alpha badly approximable and depth >= 5.  The verdict demands exact
    zeros on the tail, so it can never coincide with a positive limsup report on
    the same table; slow non-zero decay is reported as "no" at desk scale.
    """
    if depth < 5:
        raise PreconditionUnmetError("depth must be >= 5")
    bad = cf.is_badly_approximable(ctx.table(depth=depth))
    if not (bad.applicable and bad.bounded):
        raise PreconditionUnmetError("alpha is not flagged badly approximable")
    rows = table if table is not None else epsilon_theta_table(ctx, depth)
    tail = _tail(rows)
    tail_qs = tuple(r.q for r in tail)
    if all(r.i_q == tail[0].i_q for r in tail) and all(r.epsilon.sign() == 0 for r in tail):
        witness = -tail[0].i_q
        confirmed = CirclePoint(ctx.alpha * witness) == ctx.t
        return DecayReport("i_q", witness, "t_in_orbit", confirmed, tail_qs)
    if all(r.j_q == tail[0].j_q for r in tail) and all(r.theta.sign() == 0 for r in tail):
        witness = -tail[0].j_q
        confirmed = CirclePoint(HALF + ctx.alpha * witness) == ctx.t
        return DecayReport("j_q", witness, "t_in_half_orbit", confirmed, tail_qs)
    return DecayReport("no", None, None, None, tail_qs)


# -- classification ----------------------------------------------------------------


@dataclass
class ClassificationReport:
    alpha: str
    t: str
    depth: int
    delta: str
    window: int
    search_bound: int
    approximate: bool
    badly_approximable: Optional[bool]
    t_in_orbit_witness: Optional[int]
    t_in_half_orbit_witness: Optional[int]
    expected: str
    expected_almost_sure_only: bool
    subgroup: SubgroupZ2
    candidates: list
    agreement: bool
    odd_denominators: list
    epsilon_theta_table: list
    candidates_even: Optional[list] = None
    alpha_decimal: str = ""
    t_decimal: str = ""

    def to_dict(self):
        out = {
            "alpha": self.alpha,
            "alpha_decimal": self.alpha_decimal,
            "t": self.t,
            "t_decimal": self.t_decimal,
            "depth": self.depth,
            "delta": self.delta,
            "window": self.window,
            "search_bound": self.search_bound,
            "approximate": self.approximate,
            "epsilon_theta_table": [
                {
                    "q": r.q,
                    "epsilon": str(r.epsilon),
                    "epsilon_decimal": r.epsilon.decimal(12),
                    "theta": str(r.theta),
                    "theta_decimal": r.theta.decimal(12),
                    "i_q": r.i_q,
                    "j_q": r.j_q,
                }
                for r in self.epsilon_theta_table
            ],
            "candidates": [c.to_dict() for c in self.candidates],
            "subgroup": self.subgroup.to_dict(),
            "predicate": {
                "t_in_Zalpha": self.t_in_orbit_witness is not None,
                "t_in_Zalpha_witness": self.t_in_orbit_witness,
                "t_in_Zalpha_plus_half": self.t_in_half_orbit_witness is not None,
                "t_in_Zalpha_plus_half_witness": self.t_in_half_orbit_witness,
                "badly_approximable": self.badly_approximable,
            },
            "expected": self.expected,
            "expected_almost_sure_only": self.expected_almost_sure_only,
            "odd_denominators": self.odd_denominators,
            "agreement": self.agreement,
        }
        if self.candidates_even is not None:
            out["candidates_even"] = [c.to_dict() for c in self.candidates_even]
        return out


def classify(ctx: CocycleContext, depth: int = 40, delta=Fraction(1, 128), window: int = 10,
             *, include_even: bool = False, seed: int = 0, partition_path: str = "auto") -> ClassificationReport:
    """Run the detector over the odd denominators, close the subgroup, compare with
    the exact membership predicate.

    Disagreement is reported, not raised; the caller decides what to do with it.
    """
    table = ctx.table(depth=depth)
    denominators = table.denominators
    odd = [q for q in denominators if q % 2 == 1]
    candidates = detect(odd, ctx, delta, window, seed=seed, partition_path=partition_path)
    candidates_even = None
    if include_even:
        even = [q for q in denominators if q % 2 == 0]
        candidates_even = detect(even, ctx, delta, window, seed=seed, partition_path=partition_path)
    subgroup = close_subgroup(candidates)
    flags = ctx.membership()
    bad = cf.is_badly_approximable(table)
    almost_sure_only = False
    if flags.orbit_witness is not None:
        expected = "Diagonal"
    elif flags.half_orbit_witness is not None:
        expected = "AntiDiagonal"
    else:
        expected = "FullG"
        almost_sure_only = not (bad.applicable and bad.bounded)
    delta_exact = _coerce_threshold(delta)
    return ClassificationReport(
        alpha=str(ctx.alpha),
        alpha_decimal=ctx.alpha.decimal(),
        t=str(ctx.t.value),
        t_decimal=ctx.t.value.decimal(),
        depth=depth,
        delta=str(delta_exact),
        window=window,
        search_bound=ctx.search_bound,
        approximate=ctx.approximate,
        badly_approximable=(bad.bounded if bad.applicable else None),
        t_in_orbit_witness=flags.orbit_witness,
        t_in_half_orbit_witness=flags.half_orbit_witness,
        expected=expected,
        expected_almost_sure_only=almost_sure_only,
        subgroup=subgroup,
        candidates=candidates,
        agreement=subgroup.classification == expected,
        odd_denominators=odd,
        epsilon_theta_table=epsilon_theta_table(ctx, depth),
        candidates_even=candidates_even,
    )
