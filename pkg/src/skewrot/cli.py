"""Command-line front end.

Subcommands: cf, cocycle, partition, epsilon-theta, classify, scan, verify.
Exit codes: 0 success (and detector/predicate agreement), 1 verified
disagreement or failed check, 2 usage or parse error.  Identical configurations
produce byte-identical output, including under parallel scans.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction

from . import cf, cocycle, essential, partition
from .cocycle import CocycleContext
from .errors import RationalExhaustedError, SelfCheckError, SkewrotError
from .exact import HALF, CirclePoint, ExactReal, parse_real

_T_SHORTHAND = re.compile(r"^(1/2\+)?(-?\d+)a$")


@dataclass
class RunConfig:
    alpha_spec: str = ""
    t_spec: str = "0"
    depth: int = 40
    delta: Fraction = Fraction(1, 128)
    window: int = 10
    search_bound: int = 10_000
    format: str = "json"
    verify: bool = True
    seed: int = 0
    threads: int = 0  # 0: use available parallelism

    def resolved_threads(self) -> int:
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)


def parse_t_spec(spec: str, alpha: ExactReal) -> CirclePoint:
    """`p/q`, `(a+b*sqrt(d))/c`, or the shorthands `ka` = <k*alpha>, `1/2+ka`."""
    s = spec.strip().replace(" ", "")
    m = _T_SHORTHAND.match(s)
    if m:
        k = int(m.group(2))
        val = alpha * k
        if m.group(1):
            val = val + HALF
        return CirclePoint(val)
    return CirclePoint(parse_real(s))


def _load_config_file(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"config line without '=': {line!r}")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONFIG_KEYS = {
    "alpha": ("alpha_spec", str),
    "t": ("t_spec", str),
    "depth": ("depth", int),
    "delta": ("delta", Fraction),
    "window": ("window", int),
    "search_bound": ("search_bound", int),
    "format": ("format", str),
    "verify": ("verify", lambda v: v.lower() in ("1", "true", "yes", "on")),
    "seed": ("seed", int),
    "threads": ("threads", int),
}


def build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        for key, raw in _load_config_file(args.config).items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            field_name, conv = _CONFIG_KEYS[key]
            setattr(config, field_name, conv(raw))
    if getattr(args, "alpha", None) is not None:
        config.alpha_spec = args.alpha
    if getattr(args, "t", None) is not None:
        config.t_spec = args.t
    for name in ("depth", "window", "search_bound", "seed", "threads"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(config, name, v)
    if getattr(args, "delta", None) is not None:
        config.delta = Fraction(args.delta)
    if getattr(args, "format", None) is not None:
        config.format = args.format
    if getattr(args, "no_verify", False):
        config.verify = False
    if not config.alpha_spec:
        raise ValueError("--alpha is required (flag or config file)")
    if config.format not in ("json", "csv"):
        raise ValueError(f"unknown format {config.format!r}")
    if config.delta <= 0:
        raise ValueError("--delta must be positive")
    return config


def _context(config: RunConfig) -> CocycleContext:
    alpha = parse_real(config.alpha_spec)
    t = parse_t_spec(config.t_spec, alpha - alpha.floor())
    return CocycleContext(alpha, t, search_bound=config.search_bound)


def _emit_json(obj) -> None:
    print(json.dumps(obj, indent=2))


def _emit_csv(rows: list, header: list) -> None:
    sio = io.StringIO()
    writer = csv.writer(sio, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    print(sio.getvalue(), end="")


# -- subcommands -------------------------------------------------------------------


def cmd_cf(config: RunConfig) -> int:
    alpha = parse_real(config.alpha_spec)
    try:
        table = cf.expand(alpha, config.depth, allow_short=alpha.is_rational)
    except RationalExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = cf.table_to_dict(table)
    if config.format == "csv":
        rows = [
            [r.k, r.p, r.q, str(abs(table.alpha * r.q - r.p)), abs(table.alpha * r.q - r.p).decimal(30)]
            for r in table.convergents
        ]
        _emit_csv(rows, ["k", "p", "q", "norm_q_alpha", "norm_q_alpha_decimal"])
    else:
        _emit_json(payload)
    return 0


def cmd_cocycle(config: RunConfig, n: int, x_spec: str) -> int:
    ctx = _context(config)
    x = parse_t_spec(x_spec, ctx.alpha)
    pair = cocycle.displacement_pair(n, x, ctx)
    payload = {
        "alpha": str(ctx.alpha),
        "t": str(ctx.t.value),
        "n": n,
        "x": str(x.value),
        "x_decimal": x.value.decimal(),
        "first": pair.first,
        "second": pair.second,
        "parity_matches_n": (pair.first - n) % 2 == 0 and (pair.second - n) % 2 == 0,
        "approximate": ctx.approximate,
    }
    if config.format == "csv":
        _emit_csv([[n, str(x.value), pair.first, pair.second]], ["n", "x", "first", "second"])
    else:
        _emit_json(payload)
    return 0


def cmd_partition(config: RunConfig, q: int) -> int:
    ctx = _context(config)
    part = partition.build(q, ctx, verify="full" if config.verify and q <= 10_000 else ("sampled" if config.verify else "off"), seed=config.seed)
    rows = part.to_rows()
    if config.format == "csv":
        _emit_csv(
            [
                [r["left"], r["left_decimal"], r["right"], r["right_decimal"], r["length"], r["length_decimal"], r["first"], r["second"]]
                for r in rows
            ],
            ["left", "left_decimal", "right", "right_decimal", "length", "length_decimal", "first", "second"],
        )
    else:
        hist = part.value_histogram()
        _emit_json(
            {
                "alpha": str(ctx.alpha),
                "t": str(ctx.t.value),
                "q": q,
                "interval_count": part.interval_count,
                "merged_count": part.merged_count,
                "histogram": [
                    {"first": v.first, "second": v.second, "measure": str(m), "measure_decimal": m.decimal(12)}
                    for v, m in sorted(hist.items())
                ],
                "intervals": rows,
                "approximate": ctx.approximate,
            }
        )
    return 0


def _eps_rows(ctx, depth):
    rows = essential.epsilon_theta_table(ctx, depth)
    return [
        [r.q, str(r.epsilon), r.epsilon.decimal(30), str(r.theta), r.theta.decimal(30), r.i_q, r.j_q]
        for r in rows
    ]


def cmd_epsilon_theta(config: RunConfig, q: int | None) -> int:
    ctx = _context(config)
    if q is not None:
        r = essential.epsilon_theta(q, ctx)
        rows = [[r.q, str(r.epsilon), r.epsilon.decimal(30), str(r.theta), r.theta.decimal(30), r.i_q, r.j_q]]
    else:
        rows = _eps_rows(ctx, config.depth)
    if config.format == "csv":
        _emit_csv(rows, ["q", "epsilon", "epsilon_decimal", "theta", "theta_decimal", "i_q", "j_q"])
    else:
        _emit_json(
            {
                "alpha": str(ctx.alpha),
                "t": str(ctx.t.value),
                "rows": [
                    {"q": r[0], "epsilon": r[1], "epsilon_decimal": r[2], "theta": r[3], "theta_decimal": r[4], "i_q": r[5], "j_q": r[6]}
                    for r in rows
                ],
            }
        )
    return 0


def cmd_classify(config: RunConfig) -> int:
    ctx = _context(config)
    report = essential.classify(
        ctx, depth=config.depth, delta=config.delta, window=config.window, seed=config.seed
    )
    if config.format == "csv":
        et = report.epsilon_theta_table
        min_eps = min((r.epsilon for r in et), default=None)
        min_theta = min((r.theta for r in et), default=None)
        _emit_csv(
            [[report.t, report.subgroup.classification, report.expected, report.agreement,
              str(min_eps), str(min_theta)]],
            ["t", "classification", "expected", "agreement", "min_epsilon", "min_theta"],
        )
    else:
        _emit_json(report.to_dict())
    return 0 if report.agreement else 1


def _scan_row(packed) -> list:
    (alpha_spec, t_text, depth, delta_text, window, search_bound, seed) = packed
    alpha = parse_real(alpha_spec)
    t = parse_t_spec(t_text, alpha - alpha.floor())
    ctx = CocycleContext(alpha, t, search_bound=search_bound)
    report = essential.classify(
        ctx, depth=depth, delta=Fraction(delta_text), window=window, seed=seed
    )
    et = report.epsilon_theta_table
    min_eps = min(r.epsilon for r in et)
    min_theta = min(r.theta for r in et)
    return [
        report.t,
        report.t_decimal,
        report.subgroup.classification,
        report.expected,
        str(report.agreement).lower(),
        str(min_eps),
        min_eps.decimal(30),
        str(min_theta),
        min_theta.decimal(30),
    ]


def cmd_scan(config: RunConfig, grid: int, jitter: bool) -> int:
    if grid < 1:
        print("error: --grid must be >= 1", file=sys.stderr)
        return 2
    alpha = parse_real(config.alpha_spec)
    import random

    rng = random.Random(config.seed)
    t_specs = []
    for k in range(grid):
        spec = f"{k}/{grid}" if k else "0"
        if jitter and alpha.d:
            b = rng.randint(1, 9)
            c = rng.randint(10_000, 99_999)
            t_val = CirclePoint(ExactReal(k, 0, grid) + ExactReal(0, b, c, alpha.d))
            spec = str(t_val.value)
        t_specs.append(spec)
    packed = [
        (config.alpha_spec, spec, config.depth, str(config.delta), config.window,
         config.search_bound, config.seed)
        for spec in t_specs
    ]
    threads = config.resolved_threads()
    if threads > 1 and grid > 1:
        with ProcessPoolExecutor(max_workers=min(threads, grid)) as pool:
            rows = list(pool.map(_scan_row, packed))
    else:
        rows = [_scan_row(p) for p in packed]
    _emit_csv(
        rows,
        ["t", "t_decimal", "classification", "expected", "agreement",
         "min_epsilon", "min_epsilon_decimal", "min_theta", "min_theta_decimal"],
    )
    return 0


def _verify_checks(config: RunConfig, ctx: CocycleContext):
    """Yield (check name, passed, witness) rows for the invariant suite."""
    import random

    alpha = ctx.alpha
    table = ctx.table(depth=config.depth)
    denominators = table.denominators

    # convergent recurrences against direct evaluation of [a0; a1..ak]
    ok, witness = True, "all rows"
    for row in table.convergents:
        if row.k == 0:
            continue
        direct = cf.convergent_value(table.a0, list(table.quotients[: row.k]))
        if not direct == ExactReal(row.p, 0, row.q):
            ok, witness = False, f"k={row.k}"
            break
    yield "convergent_recurrence", ok, witness

    ok, witness = True, "all rows"
    for prev, cur in zip(table.convergents, table.convergents[1:]):
        if cur.q * prev.p - cur.p * prev.q != (-1) ** cur.k:
            ok, witness = False, f"k={cur.k}"
            break
    yield "determinant_identity", ok, witness

    ok, witness = True, "all rows"
    for i in range(len(table.convergents) - 1):
        norm = table.norm_q_alpha(i)
        q_next = table.convergents[i + 1].q
        q_cur = table.convergents[i].q
        if not (norm < ExactReal(1, 0, q_next) and q_next > q_cur):
            ok, witness = False, f"row {i}"
            break
    yield "norm_chain", ok, witness

    ok, witness = True, "none checked"
    for i in range(len(table.convergents) - 1):
        if table.convergents[i + 1].q > 50_000:
            break
        try:
            cf.verify_best_approx(table, i)
            witness = f"rows 0..{i}"
        except SelfCheckError as exc:
            ok, witness = False, str(exc)
            break
    yield "best_approximation", ok, witness

    ok, witness = True, "none checked"
    for q in denominators:
        if q > 10_000:
            break
        try:
            cf.half_point_separation(table, q)
            witness = f"q<= {q}"
        except SelfCheckError as exc:
            ok, witness = False, str(exc)
            break
    yield "half_point_separation", ok, witness

    if not ctx.approximate:
        ok, witness = True, "none checked"
        for q in denominators:
            if q > 10_000:
                break
            try:
                w = cocycle.denjoy_koksma_check(q, ctx)
                witness = f"q <= {q}, max |a_q| = {w.max_abs}"
            except SkewrotError as exc:
                ok, witness = False, str(exc)
                break
        yield "denjoy_koksma", ok, witness

        ok, witness = True, "none checked"
        for q in denominators:
            if q > 10_000:
                break
            if not partition.uniform_distribution_check(q, ctx):
                ok, witness = False, f"q = {q}"
                break
            witness = f"q <= {q}"
        yield "uniform_distribution", ok, witness

    rng = random.Random(config.seed)
    ok, witness = True, "200 samples"
    for _ in range(200):
        n = rng.randint(-80, 80)
        x = CirclePoint(ExactReal(rng.randint(0, 999), 0, 1000) + alpha * rng.randint(-20, 20))
        a_n = cocycle.birkhoff_sum(n, x, ctx)
        if (a_n - n) % 2 != 0:
            ok, witness = False, f"parity broke at n={n}, x={x}"
            break
        if cocycle.birkhoff_sum(n, x.antipode(), ctx) != -a_n:
            ok, witness = False, f"antisymmetry broke at n={n}, x={x}"
            break
        m = rng.randint(-40, 40)
        if not cocycle.check_cocycle_identity(m, n, x, ctx):
            ok, witness = False, f"cocycle identity broke at m={m}, n={n}, x={x}"
            break
        ms = rng.randint(0, 10)
        ns = rng.randint(ms + 1, 200)
        if not cocycle.check_shift_bound(ms, ns, x, ctx):
            ok, witness = False, f"shift bound broke at m={ms}, n={ns}, x={x}"
            break
    yield "walk_identities", ok, witness

    ok, witness = True, "10 partitions"
    for _ in range(10):
        q = rng.randint(1, 400)
        try:
            part = partition.build(q, ctx, verify="full", seed=config.seed)
            part.value_histogram()  # raises unless lengths sum to exactly 1
        except SkewrotError as exc:
            ok, witness = False, f"q={q}: {exc}"
            break
    yield "partition_soundness", ok, witness

    ok, witness = True, "all q"
    for q in denominators:
        if q > 20_000:
            break
        row = essential.epsilon_theta(q, ctx)
        if not (row.epsilon < 1 and row.theta < 1):
            ok, witness = False, f"q={q}"
            break
    yield "epsilon_theta_below_one", ok, witness


def cmd_verify(config: RunConfig) -> int:
    ctx = _context(config)
    rows = list(_verify_checks(config, ctx))
    all_ok = all(ok for _, ok, _ in rows)
    if config.format == "csv":
        _emit_csv([[n, "pass" if ok else "fail", w] for n, ok, w in rows], ["check", "status", "witness"])
    elif config.format == "json":
        _emit_json(
            {
                "alpha": str(ctx.alpha),
                "t": str(ctx.t.value),
                "approximate": ctx.approximate,
                "approximation_warning": (
                    "alpha is rational: results describe the truncation, not a limit"
                    if ctx.approximate
                    else None
                ),
                "checks": [{"check": n, "passed": ok, "witness": w} for n, ok, w in rows],
                "all_passed": all_ok,
            }
        )
    return 0 if all_ok else 1


# -- parser ------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha", help="rotation angle: p/q or (a+b*sqrt(d))/c")
    sub.add_argument("--t", help="offset: p/q, (a+b*sqrt(d))/c, ka, or 1/2+ka")
    sub.add_argument("--depth", type=int, help="convergent table depth (default 40)")
    sub.add_argument("--delta", help="measure threshold, a rational like 1/128")
    sub.add_argument("--window", type=int, help="consecutive denominators required (default 10)")
    sub.add_argument("--search-bound", type=int, dest="search_bound", help="membership search bound (default 10000)")
    sub.add_argument("--format", choices=["json", "csv"], help="output format (default json)")
    sub.add_argument("--no-verify", action="store_true", help="disable partition midpoint re-checks")
    sub.add_argument("--seed", type=int, help="seed for sampled verification and jitter (default 0)")
    sub.add_argument("--threads", type=int, help="scan worker count (default: available parallelism)")
    sub.add_argument("--config", help="key=value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewrot",
        description="Exact continued fractions, rotation walks, constancy partitions and "
        "group classification of persistent pair values.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("cf", help="continued-fraction table of alpha")
    _add_common(p)

    p = subs.add_parser("cocycle", help="walk displacements after n steps")
    _add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", default="0", help="starting point (same formats as --t)")

    p = subs.add_parser("partition", help="constancy partition for q steps")
    _add_common(p)
    p.add_argument("--q", type=int, required=True)

    p = subs.add_parser("epsilon-theta", help="scaled orbit-proximity minima over the denominator set")
    _add_common(p)
    p.add_argument("--q", type=int, help="single q instead of the whole table")

    p = subs.add_parser("classify", help="detector vs membership predicate for (alpha, t)")
    _add_common(p)

    p = subs.add_parser("scan", help="classify a grid of offsets t = k/N in parallel")
    _add_common(p)
    p.add_argument("--grid", type=int, required=True, help="number of grid points")
    p.add_argument("--jitter", action="store_true", help="add small seeded surd offsets to the grid")

    p = subs.add_parser("verify", help="run the invariant suite for alpha (and t)")
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "cf":
            return cmd_cf(config)
        if args.command == "cocycle":
            return cmd_cocycle(config, args.n, args.x)
        if args.command == "partition":
            return cmd_partition(config, args.q)
        if args.command == "epsilon-theta":
            return cmd_epsilon_theta(config, args.q)
        if args.command == "classify":
            return cmd_classify(config)
        if args.command == "scan":
            return cmd_scan(config, args.grid, args.jitter)
        if args.command == "verify":
            return cmd_verify(config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SelfCheckError as exc:
        print(f"self-check failure: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
