"""Constancy partitions: the circle split into intervals where the paired walk is constant.

For a step count q the walk displacement x -> a_q(x) jumps by +2 at <-j*alpha> and
by -2 at <1/2 - j*alpha> (j = 0..q-1); the companion walk started at x + t jumps at
the same families shifted by -t.  Sorting the (up to) 4q jump locations, merging
exact coincidences, and propagating values across jumps yields the partition with
exact endpoints, exact lengths and the exact pair value on every interval.

Two construction paths produce identical results: a pure-object reference path
(exact big-integer sort keys, exact tie resolution, no height assumptions) and a
vectorized fast path for large q (uint64 circle keys with drift margins; every
merge decision, extreme length and midpoint count is re-derived exactly, and any
violated margin falls back to the reference path).
"""

from __future__ import annotations

import math
import random
from bisect import bisect_left
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .cocycle import CocycleContext, PairValue, displacement_pair
from .errors import FastPathGuardError, PreconditionUnmetError, VerificationError, WrapInconsistentError
from .exact import HALF, ONE, CirclePoint, ExactReal

_REF_KEY_BITS = 128
_FAST_MIN_Q = 4_096
_MAX_FAST_Q = 1 << 22
_GUARD = 1 << 24  # uint64 key units; > 2*drift for every admissible q
_M64 = 1 << 64
_LITERAL_MAX_Q = 64

# family table: (coordinate, jump); locations are <start_f - j*alpha>
_FAMILIES = ((0, 2), (0, -2), (1, 2), (1, -2))
_FAMILY_LETTER = "ABCD"


class Discontinuity(NamedTuple):
    location: CirclePoint
    coordinate: int  # 0: walk from x, 1: walk from x + t
    jump: int  # +2 or -2
    family: str  # "A".."D", matching (coordinate, jump sign)
    j: int


class Interval(NamedTuple):
    left: CirclePoint
    right: CirclePoint
    length: ExactReal
    value: PairValue


class NeighborClasses(NamedTuple):
    dominant: PairValue
    measures: dict  # PairValue -> ExactReal, total length of right-adjacent intervals
    composite: dict  # PairValue -> bool, True when the step is not a single +/-2 jump


def _family_starts(ctx: CocycleContext, include_pair: bool) -> list[ExactReal]:
    starts = [ExactReal(0), HALF]
    if include_pair:
        neg_t = CirclePoint(-ctx.t.value).value
        starts += [neg_t, CirclePoint(HALF - ctx.t.value).value]
    return starts


def discontinuities(q: int, ctx: CocycleContext, include_pair: bool = True) -> list[Discontinuity]:
    """All 4q jump records (2q without the t families), locations reduced to [0, 1)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    out = []
    for f, start in enumerate(_family_starts(ctx, include_pair)):
        coord, jump = _FAMILIES[f]
        y = CirclePoint(start)
        for j in range(q):
            out.append(Discontinuity(y, coord, jump, _FAMILY_LETTER[f], j))
            y = y - ctx.alpha
    return out


def _circle_key64(x: ExactReal) -> int:
    """round(x * 2^64) mod 2^64 for x in [0, 1); error at most 1/2 key unit."""
    return ((x.scaled_floor(65) + 1) >> 1) % _M64


class _OrbitCounter:
    """Exact evaluator of S_q(x) = #{i < q: <x + i*alpha> in [0, 1/2)}.

    Counts orbit points <i*alpha> inside the cyclic interval [<-x>, <1/2-x>) by
    rank queries on exact sort keys; collisions between an endpoint key and an
    orbit key trigger an exact recount.
    """

    def __init__(self, alpha: ExactReal, q: int, ctx: CocycleContext):
        self.q = q
        self.ctx = ctx
        keyed = []
        y = CirclePoint(0)
        for _ in range(q):
            keyed.append((y.value.scaled_floor(_REF_KEY_BITS), y))
            y = y + alpha
        keyed.sort(key=lambda kv: kv[0])
        self.keys = [kv[0] for kv in keyed]
        self.points = [kv[1] for kv in keyed]

    def _rank(self, endpoint: CirclePoint) -> int:
        """Number of orbit points strictly left of endpoint (cyclically from 0)."""
        k = endpoint.value.scaled_floor(_REF_KEY_BITS)
        i = bisect_left(self.keys, k)
        # resolve exact order against key-equal orbit points
        while i < self.q and self.keys[i] == k and self.points[i] < endpoint:
            i += 1
        return i

    def count(self, x: CirclePoint) -> int:
        left = CirclePoint(-x.value)
        right = CirclePoint(HALF - x.value)
        il, ir = self._rank(left), self._rank(right)
        if left < right:
            return ir - il
        return (self.q - il) + ir


def _direct_pair(q: int, mid: CirclePoint, ctx: CocycleContext, include_pair: bool,
                 counter: Optional[_OrbitCounter]) -> PairValue:
    if counter is None:
        first = 2 * _count_literal(q, mid, ctx) - q
        second = 2 * _count_literal(q, mid + ctx.t, ctx) - q if include_pair else 0
    else:
        first = 2 * counter.count(mid) - q
        second = 2 * counter.count(mid + ctx.t) - q if include_pair else 0
    return PairValue(first, second)


def _count_literal(q: int, x: CirclePoint, ctx: CocycleContext) -> int:
    from .cocycle import count_first_half

    return count_first_half(q, x, ctx)


class ConstancyPartition:
    """Cyclically ordered constancy intervals with exact endpoints, lengths and values."""

    def __init__(self, q, ctx, include_pair, path, lefts, values, jumps1, jumps2,
                 merged_count, lengths=None, fast_state=None):
        self.q = q
        self.ctx = ctx
        self.include_pair = include_pair
        self.path = path
        self._lefts = lefts  # list[CirclePoint] or None (fast, lazy)
        self._values = values  # list[PairValue] or None
        self._jumps1 = jumps1
        self._jumps2 = jumps2
        self.merged_count = merged_count
        self._lengths = lengths
        self._fast = fast_state
        self._histogram = None

    # -- basic shape ---------------------------------------------------------

    @property
    def interval_count(self) -> int:
        if self._fast is not None:
            return int(self._fast["m"])
        return len(self._lefts)

    @property
    def values(self) -> list:
        if self._values is None:
            fs = self._fast
            self._values = [PairValue(int(a), int(b)) for a, b in zip(fs["v1"], fs["v2"])]
        return self._values

    @property
    def lefts(self) -> list:
        if self._lefts is None:
            fs = self._fast
            starts = fs["starts"]
            alpha = self.ctx.alpha
            self._lefts = [
                CirclePoint(starts[f] - alpha * int(j)) for f, j in zip(fs["bfam"], fs["bj"])
            ]
        return self._lefts

    @property
    def lengths(self) -> list:
        if self._lengths is None:
            lefts = self.lefts
            m = len(lefts)
            out = []
            for i in range(m):
                if i + 1 < m:
                    out.append(lefts[i + 1].value - lefts[i].value)
                else:
                    out.append(lefts[0].value + 1 - lefts[i].value)
            self._lengths = out
        return self._lengths

    def intervals(self) -> list:
        lefts = self.lefts
        values = self.values
        lengths = self.lengths
        m = len(lefts)
        return [
            Interval(lefts[i], lefts[(i + 1) % m], lengths[i], values[i]) for i in range(m)
        ]

    # -- exact aggregates ------------------------------------------------------

    def value_histogram(self) -> dict:
        """Exact total measure per pair value; the measures sum to exactly 1."""
        if self._histogram is not None:
            return self._histogram
        if self._fast is not None:
            hist = _fast_histogram(self)
        else:
            hist = {}
            for val, length in zip(self._values, self.lengths):
                hist[val] = hist.get(val, ExactReal(0)) + length
        total = ExactReal(0)
        for v in hist.values():
            total = total + v
        if not total == 1:
            raise WrapInconsistentError("interval lengths do not sum to 1")
        self._histogram = hist
        return hist

    def dominant_value(self) -> PairValue:
        """Largest-measure class; ties resolved toward the smaller pair."""
        hist = self.value_histogram()
        best = None
        best_m = None
        for val in sorted(hist):
            m = hist[val]
            if best_m is None or m > best_m:
                best, best_m = val, m
        return best

    def right_neighbor_classes(self, dominant: PairValue) -> NeighborClasses:
        """Histogram of values on intervals immediately right of the dominant class."""
        hist = self.value_histogram()
        if dominant not in hist:
            raise PreconditionUnmetError(f"{dominant} is not a value of this partition")
        if self._fast is not None:
            measures = _fast_neighbors(self, dominant)
        else:
            measures = {}
            vals = self._values
            lens = self.lengths
            m = len(vals)
            for i in range(m):
                if vals[i] == dominant:
                    nxt = (i + 1) % m
                    v = vals[nxt]
                    measures[v] = measures.get(v, ExactReal(0)) + lens[nxt]
        composite = {}
        for v in measures:
            diff = (v.first - dominant.first, v.second - dominant.second)
            composite[v] = not (
                (abs(diff[0]), diff[1]) == (2, 0) or (diff[0], abs(diff[1])) == (0, 2)
            )
        return NeighborClasses(dominant, measures, composite)

    def max_abs_first(self) -> int:
        if self._fast is not None:
            return int(np.max(np.abs(self._fast["v1"])))
        return max(abs(v.first) for v in self._values)

    def extreme_lengths(self) -> tuple:
        """(exact min length, exact max length)."""
        if self._fast is None:
            lens = self.lengths
            mn = mx = lens[0]
            for v in lens[1:]:
                if v < mn:
                    mn = v
                if v > mx:
                    mx = v
            return mn, mx
        return _fast_extremes(self)

    def to_rows(self) -> list:
        """Serialization rows: (left, right, length, first, second) with exact strings."""
        rows = []
        for iv in self.intervals():
            rows.append(
                {
                    "left": str(iv.left.value),
                    "left_decimal": iv.left.value.decimal(),
                    "right": str(iv.right.value),
                    "right_decimal": iv.right.value.decimal(),
                    "length": str(iv.length),
                    "length_decimal": iv.length.decimal(),
                    "first": iv.value.first,
                    "second": iv.value.second,
                }
            )
        return rows


def value_histogram(p: ConstancyPartition) -> dict:
    return p.value_histogram()


def right_neighbor_classes(p: ConstancyPartition, dominant: PairValue) -> NeighborClasses:
    return p.right_neighbor_classes(dominant)


# -- reference construction ------------------------------------------------------


def _merge_records(recs: list) -> tuple:
    """Sort by location (exact) and merge coincident records into net jump vectors."""
    keyed = sorted(
        ((r.location.value.scaled_floor(_REF_KEY_BITS), r) for r in recs),
        key=lambda kv: kv[0],
    )
    groups = []
    i = 0
    n = len(keyed)
    while i < n:
        j = i + 1
        while j < n and keyed[j][0] == keyed[i][0]:
            j += 1
        block = [kv[1] for kv in keyed[i:j]]
        if j - i == 1:
            groups.append(block)
        else:
            # key ties: split by exact equality (exact order within a tie block)
            block.sort(key=lambda r: _ExactOrder(r.location))
            sub = [block[0]]
            for r in block[1:]:
                if r.location == sub[0].location:
                    sub.append(r)
                else:
                    groups.append(sub)
                    sub = [r]
            groups.append(sub)
        i = j
    lefts, jumps1, jumps2 = [], [], []
    dropped = 0
    for g in groups:
        d1 = sum(r.jump for r in g if r.coordinate == 0)
        d2 = sum(r.jump for r in g if r.coordinate == 1)
        if d1 == 0 and d2 == 0:
            dropped += len(g)
            continue
        lefts.append(g[0].location)
        jumps1.append(d1)
        jumps2.append(d2)
    merged_count = len(recs) - len(lefts)
    return lefts, jumps1, jumps2, merged_count


class _ExactOrder:
    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __lt__(self, other):
        return self.p < other.p


def _build_reference(q, ctx, include_pair, verify, seed):
    recs = discontinuities(q, ctx, include_pair)
    lefts, jumps1, jumps2, merged_count = _merge_records(recs)
    if not lefts:
        raise WrapInconsistentError("all jumps cancelled; no partition remains")
    m = len(lefts)
    counter = _OrbitCounter(ctx.alpha, q, ctx) if q > _LITERAL_MAX_Q else None
    if m == 1:
        mid = CirclePoint(lefts[0].value + HALF)
    else:
        mid = CirclePoint((lefts[0].value + lefts[1].value) * HALF)
    base = _direct_pair(q, mid, ctx, include_pair, counter)
    values = [base]
    for i in range(1, m):
        prev = values[-1]
        values.append(PairValue(prev.first + jumps1[i], prev.second + jumps2[i]))
    wrap = PairValue(values[-1].first + jumps1[0], values[-1].second + jumps2[0])
    if wrap != base or sum(jumps1) != 0 or sum(jumps2) != 0:
        raise WrapInconsistentError("propagated values do not close up around the circle")
    part = ConstancyPartition(
        q, ctx, include_pair, "reference", lefts, values, jumps1, jumps2, merged_count
    )
    _run_verification(part, verify, seed, counter)
    return part


def _run_verification(part, verify, seed, counter):
    if verify == "off":
        return
    m = part.interval_count
    if verify == "full":
        indices = range(m)
    else:
        rng = random.Random(seed)
        k = min(m, max(1, math.isqrt(m)))
        indices = sorted(rng.sample(range(m), k))
    q, ctx = part.q, part.ctx
    if counter is None and q > _LITERAL_MAX_Q:
        counter = _OrbitCounter(ctx.alpha, q, ctx)
    lefts = part.lefts
    values = part.values
    for i in indices:
        left = lefts[i]
        if i + 1 < m:
            mid = CirclePoint((left.value + lefts[i + 1].value) * HALF)
        else:
            mid = CirclePoint((left.value + lefts[0].value + 1) * HALF)
        direct = _direct_pair(q, mid, ctx, part.include_pair, counter)
        if direct != values[i]:
            raise VerificationError(
                f"interval {i}: propagated {values[i]} != direct {direct} at midpoint"
            )


# -- fast construction -------------------------------------------------------------


def _fast_guards_ok(q, ctx, include_pair):
    if ctx.alpha.is_rational or q > _MAX_FAST_Q:
        return False
    # keep every lifted integer small enough for exact float corrections
    vals = [ctx.alpha] + _family_starts(ctx, include_pair)
    return all(abs(v.a) <= 1 << 40 and abs(v.b) <= 1 << 40 and v.c <= 1 << 40 for v in vals)


def _exact_equal_location(starts, alpha, f1, j1, f2, j2) -> bool:
    diff = (starts[f1] - starts[f2]) - alpha * int(j1 - j2)
    return CirclePoint(diff).value.sign() == 0


def _build_fast(q, ctx, include_pair, verify, seed):
    with np.errstate(over="ignore"):
        return _build_fast_inner(q, ctx, include_pair, verify, seed)


def _build_fast_inner(q, ctx, include_pair, verify, seed):
    alpha = ctx.alpha
    starts = _family_starts(ctx, include_pair)
    nfam = len(starts)
    k_alpha = np.uint64(_circle_key64(alpha))
    k_starts = [np.uint64(_circle_key64(s)) for s in starts]

    j = np.arange(q, dtype=np.uint64)
    keys = np.concatenate([np.uint64(k) - j * k_alpha for k in k_starts])
    fam = np.repeat(np.arange(nfam, dtype=np.int8), q)
    jj = np.concatenate([np.arange(q, dtype=np.int64)] * nfam)

    order = np.argsort(keys, kind="stable")
    ks, fs, js = keys[order], fam[order], jj[order]
    n = ks.shape[0]

    gaps = np.empty(n, dtype=np.uint64)
    gaps[:-1] = ks[1:] - ks[:-1]
    gaps[-1] = ks[0] - ks[-1]
    close = gaps <= np.uint64(_GUARD)

    # rotate so any coincidence group straddling the 0/1 wrap becomes contiguous
    if close[-1]:
        r = 0
        while r < n and close[n - 1 - r]:
            r += 1
        if r >= n:
            raise FastPathGuardError("all breakpoints collapse; fast path refuses")
        ks, fs, js = np.roll(ks, r), np.roll(fs, r), np.roll(js, r)
        gaps = np.roll(gaps, r)
        close = np.roll(close, r)

    # pairs of adjacent sorted elements with nearly equal keys must be *exactly*
    # equal locations (verified per distinct (family pair, j difference) combo);
    # a close-but-distinct pair means the drift margin cannot separate points
    eq_pair = np.zeros(n, dtype=bool)  # eq_pair[i]: sorted element i equals element i+1
    idx = np.nonzero(close[:-1])[0]
    if idx.size:
        f1 = fs[idx].astype(np.int64)
        f2 = fs[idx + 1].astype(np.int64)
        dj = js[idx] - js[idx + 1]
        trip = (f1 * nfam + f2) * (1 << 25) + (dj + (1 << 24))
        verdicts = {}
        for tval in np.unique(trip):
            tval = int(tval)
            djv = (tval & ((1 << 25) - 1)) - (1 << 24)
            fpair = tval >> 25
            verdicts[tval] = _exact_equal_location(starts, alpha, fpair // nfam, djv, fpair % nfam, 0)
        eq_pair[idx] = np.array([verdicts[int(t)] for t in trip], dtype=bool)
        if not bool(np.all(eq_pair[idx])):
            raise FastPathGuardError("distinct breakpoints closer than the drift margin")

    starts_mask = np.empty(n, dtype=bool)
    starts_mask[0] = True
    starts_mask[1:] = ~eq_pair[:-1]
    gstart = np.nonzero(starts_mask)[0]

    jump1 = np.zeros(n, dtype=np.int64)
    jump2 = np.zeros(n, dtype=np.int64)
    jump1[fs == 0] = 2
    jump1[fs == 1] = -2
    if include_pair:
        jump2[fs == 2] = 2
        jump2[fs == 3] = -2
    gj1 = np.add.reduceat(jump1, gstart)
    gj2 = np.add.reduceat(jump2, gstart)
    nz = (gj1 != 0) | (gj2 != 0)
    if not bool(np.any(nz)):
        raise FastPathGuardError("all jumps cancelled; fast path refuses")
    bkey = ks[gstart][nz]
    bfam = fs[gstart][nz]
    bj = js[gstart][nz]
    gj1, gj2 = gj1[nz], gj2[nz]
    m = int(bkey.shape[0])
    merged_count = n - m

    # exact endpoints of the base interval and base value by exact rank counts
    rank = _FastRanks(alpha, q, ctx)
    loc0 = CirclePoint(starts[int(bfam[0])] - alpha * int(bj[0]))
    if m > 1:
        loc1 = CirclePoint(starts[int(bfam[1])] - alpha * int(bj[1]))
        mid = CirclePoint((loc0.value + loc1.value) * HALF)
    else:
        mid = CirclePoint(loc0.value + HALF)
    base1 = 2 * rank.count(mid) - q
    base2 = 2 * rank.count(mid + ctx.t) - q if include_pair else 0

    if int(gj1.sum()) != 0 or int(gj2.sum()) != 0:
        raise WrapInconsistentError("net jump around the circle is nonzero")
    v1 = base1 + np.cumsum(gj1) - gj1[0]
    v2 = base2 + np.cumsum(gj2) - gj2[0]

    # exact reduction shifts r with x = start_f - j*alpha + r on each breakpoint
    s_f64 = np.array([float(s) for s in starts])[bfam]
    r_shift = np.rint(bkey.astype(np.float64) / float(_M64) - (s_f64 - bj.astype(np.float64) * float(alpha))).astype(np.int64)

    fast_state = {
        "m": m,
        "starts": starts,
        "bkey": bkey,
        "bfam": bfam.astype(np.int64),
        "bj": bj,
        "v1": v1,
        "v2": v2,
        "r": r_shift,
        "rank": rank,
    }
    part = ConstancyPartition(
        q, ctx, include_pair, "fast", None, None, gj1, gj2, merged_count, fast_state=fast_state
    )
    # closure check through the exact histogram (also validates r_shift)
    part.value_histogram()
    _run_fast_verification(part, verify, seed)
    return part


class _FastRanks:
    """uint64-key rank counter with margin guards and literal fallback."""

    def __init__(self, alpha, q, ctx):
        self.q = q
        self.ctx = ctx
        k_alpha = np.uint64(_circle_key64(alpha))
        self.keys = np.sort(np.arange(q, dtype=np.uint64) * k_alpha)

    def _rank_key(self, endpoint: CirclePoint):
        k = np.uint64(_circle_key64(endpoint.value))
        i = int(np.searchsorted(self.keys, k, side="left"))
        with np.errstate(over="ignore"):
            for nb in (i - 1, i):
                if 0 <= nb < self.q:
                    if int(min(self.keys[nb] - k, k - self.keys[nb])) <= _GUARD:
                        return None  # endpoint too close to an orbit point for key ranks
        return i

    def count(self, x: CirclePoint) -> int:
        left = CirclePoint(-x.value)
        right = CirclePoint(HALF - x.value)
        il = self._rank_key(left)
        ir = self._rank_key(right)
        if il is None or ir is None:
            return _count_literal(self.q, x, self.ctx)
        kl = _circle_key64(left.value)
        kr = _circle_key64(right.value)
        if kl <= kr:
            return ir - il
        return (self.q - il) + ir


def _run_fast_verification(part, verify, seed):
    if verify == "off":
        return
    fs = part._fast
    m = fs["m"]
    rng = random.Random(seed)
    k = min(m, max(1, math.isqrt(m))) if verify != "full" else m
    indices = sorted(rng.sample(range(m), k)) if k < m else range(m)
    starts, alpha = fs["starts"], part.ctx.alpha
    rank = fs["rank"]
    q = part.q
    for i in indices:
        loc = CirclePoint(starts[int(fs["bfam"][i])] - alpha * int(fs["bj"][i]))
        ni = (i + 1) % m
        nxt = CirclePoint(starts[int(fs["bfam"][ni])] - alpha * int(fs["bj"][ni]))
        if ni:
            mid = CirclePoint((loc.value + nxt.value) * HALF)
        else:
            mid = CirclePoint((loc.value + nxt.value + 1) * HALF)
        d1 = 2 * rank.count(mid) - q
        d2 = 2 * rank.count(mid + part.ctx.t) - q if part.include_pair else 0
        if d1 != int(fs["v1"][i]) or d2 != int(fs["v2"][i]):
            raise VerificationError(
                f"interval {i}: propagated ({int(fs['v1'][i])}, {int(fs['v2'][i])}) "
                f"!= direct ({d1}, {d2})"
            )


def _interval_decomposition(part):
    """Integer aggregates describing each interval length exactly.

    length_i = (start[f_next] - start[f_i]) + (j_i - j_next)*alpha + (r_next - r_i) + wrap_i.
    """
    fs = part._fast
    if "decomp" in fs:
        return fs["decomp"]
    m = fs["m"]
    fown = fs["bfam"]
    fnext = np.roll(fown, -1)
    jd = fs["bj"].astype(np.int64) - np.roll(fs["bj"], -1).astype(np.int64)
    rd = np.roll(fs["r"], -1) - fs["r"]
    w = np.zeros(m, dtype=np.int64)
    w[m - 1] = 1
    fs["decomp"] = (fown, fnext, jd, rd, w)
    return fs["decomp"]


def _assemble_measure(part, cnt_next, cnt_own, jd_sum, rd_sum, w_sum) -> ExactReal:
    starts = part._fast["starts"]
    total = ExactReal(0)
    for f, s in enumerate(starts):
        coeff = int(cnt_next[f]) - int(cnt_own[f])
        if coeff:
            total = total + s * coeff
    total = total + part.ctx.alpha * int(jd_sum)
    return total + int(rd_sum) + int(w_sum)


def _fast_histogram(part):
    fs = part._fast
    m = fs["m"]
    v1, v2 = fs["v1"], fs["v2"]
    span = int(v2.max() - v2.min()) + 1 if part.include_pair else 1
    lab_raw = (v1 - v1.min()) * span + (v2 - v2.min())
    classes, first_idx, lab = np.unique(lab_raw, return_index=True, return_inverse=True)
    ncls = classes.shape[0]
    fown, fnext, jd, rd, w = _interval_decomposition(part)
    nfam = len(fs["starts"])
    cnt_next = np.zeros((ncls, nfam), dtype=np.int64)
    cnt_own = np.zeros((ncls, nfam), dtype=np.int64)
    np.add.at(cnt_next, (lab, fnext), 1)
    np.add.at(cnt_own, (lab, fown), 1)
    jd_sum = np.zeros(ncls, dtype=np.int64)
    rd_sum = np.zeros(ncls, dtype=np.int64)
    w_sum = np.zeros(ncls, dtype=np.int64)
    np.add.at(jd_sum, lab, jd)
    np.add.at(rd_sum, lab, rd)
    np.add.at(w_sum, lab, w)
    hist = {}
    for c in range(ncls):
        i = int(first_idx[c])
        val = PairValue(int(v1[i]), int(v2[i]))
        hist[val] = _assemble_measure(part, cnt_next[c], cnt_own[c], jd_sum[c], rd_sum[c], w_sum[c])
    part._fast["lab"] = lab
    return hist


def _fast_neighbors(part, dominant):
    fs = part._fast
    part.value_histogram()
    lab = fs["lab"]
    m = fs["m"]
    v1, v2 = fs["v1"], fs["v2"]
    dom_mask = (v1 == dominant.first) & (v2 == dominant.second)
    nxt_idx = (np.nonzero(dom_mask)[0] + 1) % m
    fown, fnext, jd, rd, w = _interval_decomposition(part)
    nfam = len(fs["starts"])
    measures = {}
    nxt_labels = lab[nxt_idx]
    for c in np.unique(nxt_labels):
        sel = nxt_idx[nxt_labels == c]
        cn = np.zeros(nfam, dtype=np.int64)
        co = np.zeros(nfam, dtype=np.int64)
        np.add.at(cn, fnext[sel], 1)
        np.add.at(co, fown[sel], 1)
        val = PairValue(int(v1[sel[0]]), int(v2[sel[0]]))
        measures[val] = _assemble_measure(
            part, cn, co, int(jd[sel].sum()), int(rd[sel].sum()), int(w[sel].sum())
        )
    return measures


def _fast_extremes(part):
    fs = part._fast
    bkey = fs["bkey"]
    m = fs["m"]
    gaps = np.empty(m, dtype=np.uint64)
    gaps[:-1] = bkey[1:] - bkey[:-1]
    with np.errstate(over="ignore"):
        gaps[-1] = bkey[0] - bkey[-1]
    fown, fnext, jd, rd, w = _interval_decomposition(part)
    starts, alpha = fs["starts"], part.ctx.alpha
    mn = mx = None
    for target, want_min in ((int(gaps.min()), True), (int(gaps.max()), False)):
        lo = np.uint64(max(0, target - 2 * _GUARD))
        hi = np.uint64(min(_M64 - 1, target + 2 * _GUARD))
        cand = np.nonzero((gaps >= lo) & (gaps <= hi))[0]
        # distinct exact lengths among candidates are determined by these tuples
        combos = {
            (int(fown[i]), int(fnext[i]), int(jd[i]), int(rd[i]), int(w[i])) for i in cand
        }
        for fo, fn, jdv, rdv, wv in combos:
            length = (starts[fn] - starts[fo]) + alpha * jdv + rdv + wv
            if want_min and (mn is None or length < mn):
                mn = length
            if not want_min and (mx is None or length > mx):
                mx = length
    return mn, mx


def build(q: int, ctx: CocycleContext, *, include_pair: bool = True, verify: Optional[str] = None,
          seed: int = 0, path: str = "auto") -> ConstancyPartition:
    """Construct the partition for q steps.

    verify: None (auto: full midpoint re-check for q <= 10^4, sampled sqrt(q)
    above), or "full" / "sampled" / "off".  path: "auto", "reference" or "fast".
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if verify is None:
        verify = "full" if q <= 10_000 else "sampled"
    if verify not in ("full", "sampled", "off"):
        raise ValueError(f"unknown verify mode {verify!r}")
    if path == "reference":
        return _build_reference(q, ctx, include_pair, verify, seed)
    if path == "fast" or (path == "auto" and q >= _FAST_MIN_Q and _fast_guards_ok(q, ctx, include_pair)):
        try:
            return _build_fast(q, ctx, include_pair, verify, seed)
        except FastPathGuardError:
            if path == "fast":
                raise
            return _build_reference(q, ctx, include_pair, verify, seed)
    if path not in ("auto", "fast"):
        raise ValueError(f"unknown path {path!r}")
    return _build_reference(q, ctx, include_pair, verify, seed)


def uniform_distribution_check(q: int, ctx: CocycleContext) -> bool:
    """Each [i/q, (i+1)/q) contains exactly one orbit point <j*alpha>, 1 <= j <= q.

    The index range j = 1..q is the one that holds for both signs of
    alpha - p/q (when the convergent over-approximates alpha, the point
    <q*alpha> replaces 0 in the bucket count).  Rejects q outside the computed
    denominator set.
    """
    table = ctx.table(cover=q)
    if q not in table.denominators:
        raise PreconditionUnmetError(f"{q} is not a convergent denominator")
    seen = bytearray(q)
    y = CirclePoint(0)
    for _ in range(q):
        y = y + ctx.alpha
        bucket = (y.value * q).floor()
        if seen[bucket]:
            return False
        seen[bucket] = 1
    return True
