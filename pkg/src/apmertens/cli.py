"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 range or resource error (for
example x beyond the sieve limit), 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import chebotarev as cheb
from . import mertens as mt
from ._arith import coprime_residues
from .characters import orthogonality_residual
from .errors import CacheCorruptError, ConsistencyError, TableRangeError
from .pliable import PliableQuery, pliable_report
from .report import Report
from .ap_constants import (DEFAULT_CUTOFF, ap_constants, g_constant, mertens_constant,
                           sum_identity_residual)
from .sieve import (APTarget, DEFAULT_SEGMENT_BYTES, MAX_LIMIT, PrimeTable, build_table, cache_path,
                    default_cache_dir, register_table)
from .special_functions import (EULER_GAMMA, exp_integral_residual, harmonic_gamma_estimate,
                                l_one)

log = logging.getLogger("apmertens")

EXIT_OK, EXIT_USAGE, EXIT_RANGE, EXIT_CONSISTENCY = 0, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    sieve_limit: int = 10**8
    cache_dir: Path | None = None
    use_cache: bool = True
    output_format: str = "csv"
    correction_cutoff: int = DEFAULT_CUTOFF
    tolerances: dict[str, float] = field(default_factory=dict)
    meta: bool = True

    def __post_init__(self):
        if self.sieve_limit < 10**3:
            raise UsageError(f"--limit must be at least 1000, got {self.sieve_limit}")
        if self.correction_cutoff > self.sieve_limit:
            raise UsageError(f"--P={self.correction_cutoff} exceeds --limit={self.sieve_limit}")

    def tolerance(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)


def parse_number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return value


def parse_int(text: str) -> int:
    value = parse_number(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_grid(text: str) -> list[float]:
    """``start:end:Kx`` (multiplicative steps), a comma list, or a single value."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].endswith("x"):
            raise argparse.ArgumentTypeError(f"grid must look like 1e4:1e8:10x, got {text!r}")
        start, end, step = parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2][:-1])
        if start < 2 or end < start or step <= 1:
            raise argparse.ArgumentTypeError(f"bad grid {text!r}")
        out, x = [], start
        while x <= end * (1 + 1e-12):
            out.append(float(round(x)) if abs(x - round(x)) < 1e-6 * x else x)
            x *= step
        return out
    return [parse_number(t) for t in text.split(",") if t]


def parse_tolerances(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, _, value = item.partition("=")
        if not value:
            raise argparse.ArgumentTypeError(f"tolerance must be NAME=VALUE, got {item!r}")
        out[name] = parse_number(value)
    return out


def get_table(cfg: RunConfig, needed: float) -> PrimeTable:
    needed = int(math.floor(needed))
    if needed > cfg.sieve_limit:
        raise TableRangeError(f"x={needed:g} exceeds the sieve limit {cfg.sieve_limit:g}; raise --limit")
    if needed > MAX_LIMIT:
        raise TableRangeError(f"x={needed:g} exceeds 2**40")
    limit = max(needed, 10**4)
    cache_dir = cfg.cache_dir if cfg.cache_dir is not None else default_cache_dir()
    if not cfg.use_cache:
        table = build_table(limit)
    else:
        try:
            table = build_table(limit, cache_dir=cache_dir)
        except CacheCorruptError as exc:
            log.warning("%s; rebuilding", exc)
            cache_path(cache_dir, limit, DEFAULT_SEGMENT_BYTES).unlink(missing_ok=True)
            table = build_table(limit, cache_dir=cache_dir)
    register_table(table)
    return table


def _target(q: int, a: int) -> APTarget:
    try:
        return APTarget(q, a)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# subcommands


def cmd_constants(args, cfg: RunConfig) -> Report:
    P = cfg.correction_cutoff
    if args.q < 1:
        raise UsageError("q must be positive")
    residues = [args.a] if args.a is not None else coprime_residues(args.q)
    targets = [_target(args.q, a) for a in residues]
    table = get_table(cfg, max(P, args.q))
    report = Report("ap-constants/1",
                    ["quantity", "q", "a", "script_L", "g", "G", "g_star", "G_star", "value", "tail_bound"],
                    metadata={"correction_cutoff": P, "tail_bound": 1.0 / P})
    for t in targets:
        c = ap_constants(t.q, t.a, P, table)
        report.add(quantity="progression-constants", q=t.q, a=t.a, script_L=c.script_L, g=c.g, G=c.G,
                   g_star=c.g_star, G_star=c.G_star, tail_bound=c.tail_bound)
    if args.a is None and args.q > 1:
        report.add(quantity="sum-identity-residual", q=args.q,
                   value=sum_identity_residual(args.q, P, table), tail_bound=len(targets) / P)
    return report


def _mertens_rows(args, cfg, product: bool) -> Report:
    t = _target(args.q, args.a)
    xs = args.x_grid
    tail = getattr(args, "tail", None)
    if min(xs) < 3:
        raise UsageError("x values must be at least 3")
    table = get_table(cfg, max(xs + [tail or 0, cfg.correction_cutoff]))
    c = ap_constants(t.q, t.a, cfg.correction_cutoff, table)
    cols = ["quantity", "x", "q", "a", "sum", "predicted", "residual", "tail_bound", "envelope",
            "uniformity_exponent"]
    if tail and not product:
        cols.append("closure")
    report = Report("prime-product/1" if product else "prime-reciprocal-sum/1", cols,
                    metadata={"correction_cutoff": cfg.correction_cutoff,
                              "envelope": "x^(-1/2) log x, shown for comparison only",
                              "uniformity_exponent": "smallest A with q <= (log x)^A"})
    for x in xs:
        env = math.log(x) / math.sqrt(x)
        unif = math.log(t.q) / math.log(math.log(x))
        if product:
            row = mt.product_report(table, x, t, c)
            report.add(quantity="prime-product-log", x=x, q=t.q, a=t.a, sum=row.product_log,
                       predicted=row.predicted_product_log, residual=row.residual_product,
                       tail_bound=row.tail_bound, envelope=env, uniformity_exponent=unif)
        elif tail:
            row = mt.tail_identity_report(table, x, tail, t, c)
            report.add(quantity="prime-reciprocal-sum-tail", x=x, q=t.q, a=t.a, sum=row.sum_recip,
                       predicted=row.predicted_sum, residual=row.residual_sum, tail_bound=c.tail_bound,
                       envelope=env, uniformity_exponent=unif, closure=row.closure)
        else:
            row = mt.mertens_row(table, x, t, c)
            report.add(quantity="prime-reciprocal-sum", x=x, q=t.q, a=t.a, sum=row.sum_recip,
                       predicted=row.predicted_sum, residual=row.residual_sum, tail_bound=c.tail_bound,
                       envelope=env, uniformity_exponent=unif)
    return report


def cmd_mertens(args, cfg):
    if args.tail is not None and args.tail < max(args.x_grid):
        raise UsageError("--tail must be at least the largest x")
    return _mertens_rows(args, cfg, product=False)


def cmd_product(args, cfg):
    return _mertens_rows(args, cfg, product=True)


def cmd_integral(args, cfg) -> Report:
    t = _target(args.q, args.a)
    Xs = args.X
    table = get_table(cfg, max(Xs + [cfg.correction_cutoff]))
    c = ap_constants(t.q, t.a, cfg.correction_cutoff, table)
    limit = mt.error_integral_limit(t, c)
    report = Report("error-integral/1", ["quantity", "X", "q", "a", "value", "limit", "residual"],
                    metadata={"correction_cutoff": cfg.correction_cutoff})
    for X in Xs:
        v = mt.error_integral(table, X, t)
        report.add(quantity="error-integral", X=X, q=t.q, a=t.a, value=v, limit=limit, residual=v - limit)
    return report


def cmd_pliable(args, cfg) -> Report:
    t = _target(args.q, args.a)
    if args.x < 3 or args.y < 1:
        raise UsageError("need x >= 3 and y >= 1")
    table = get_table(cfg, max(args.x, cfg.correction_cutoff))
    consts = {(t.q, t.a): ap_constants(t.q, t.a, cfg.correction_cutoff, table)}
    return pliable_report(table, [PliableQuery(int(args.x), args.y, t)], A=args.A, constants=consts)


def cmd_chebotarev(args, cfg) -> Report:
    try:
        setting = cheb.parse_setting(args.setting)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    classes = [args.cls] if args.cls else list(setting.class_ids)
    for c in classes:
        if c not in setting.class_ids:
            raise UsageError(f"unknown class {c!r}; classes are {', '.join(setting.class_ids)}")
    x = args.x
    if x < 1e4:
        raise UsageError("--x must be at least 1e4")
    table = get_table(cfg, max(x, cfg.correction_cutoff))
    grid = [10.0**k for k in range(4, int(math.log10(x)) + 1)]
    if grid[-1] < x:
        grid.append(x)
    report = Report("chebotarev/1",
                    ["quantity", "setting", "class", "x", "value", "reference", "residual",
                     "density", "expected_density", "slope", "drift"],
                    metadata={"setting": str(setting), "group_order": setting.group_order,
                              "discriminant": setting.discriminant,
                              "correction_cutoff": cfg.correction_cutoff})
    for c in classes:
        est = cheb.g_bruteforce_estimate(table, setting, c, x)
        ref = None
        if setting.kind == "quadratic":
            ref = cheb.g_quadratic_exact(setting.parameter, c, cfg.correction_cutoff).g
        elif setting.kind == "cyclotomic":
            ref = g_constant(setting.parameter, int(c), cfg.correction_cutoff, table)
        slope = cheb.mertens_slope(table, setting, c, grid) if len(grid) >= 2 else None
        report.add(quantity="class-constant-estimate", setting=str(setting), **{"class": c}, x=x,
                   value=est.g, reference=ref, residual=None if ref is None else est.g - ref,
                   density=cheb.class_density(table, setting, c, x),
                   expected_density=setting.density(c), slope=slope, drift=est.confidence)
    report.add(quantity="class-partition-residual", setting=str(setting), x=x,
               value=cheb.class_sum_residual(table, setting, x))
    return report


def cmd_selftest(args, cfg) -> Report:
    """Fast internal checks; exit code 4 if any fails."""
    report = Report("selftest/1", ["quantity", "value", "expected", "tolerance", "ok"])

    def check(name, value, expected, tol):
        report.add(quantity=name, value=value, expected=expected, tolerance=tol,
                   ok=abs(value - expected) <= tol)

    table = get_table(cfg, 10**6)
    check("prime-count-1e6", table.pi(10**6), 78498, 0)
    check("euler-gamma-harmonic", harmonic_gamma_estimate(10**6), EULER_GAMMA, 1e-7 + 5e-7)
    first, second = orthogonality_residual(30)
    check("orthogonality-residual-q30", max(first, second), 0.0, 1e-12)
    from .characters import characters_mod
    check("l-one-mod-4", l_one(characters_mod(4)[1]).real, math.pi / 4, 1e-10)
    check("exp-integral-residual", exp_integral_residual(math.log(2), 1e-3), 0.0, 1e-2)
    check("mertens-constant-P1e6", mertens_constant(10**6, table), 0.2614972128, 2e-6)
    check("sum-identity-q12", sum_identity_residual(12, 10**6, table), 0.0, 1e-6)
    if not all(report.column("ok")):
        raise ConsistencyError("selftest failed:\n" + report.to_csv(meta=False))
    return report


# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limit", type=parse_int, default=10**8, help="largest sieve bound allowed")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help="sieve cache directory (default $MERTENS_CACHE_DIR or ~/.cache/apmertens)")
    common.add_argument("--no-cache", action="store_true", help="always sieve, never read or write the cache")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--P", dest="P", type=parse_int, default=DEFAULT_CUTOFF,
                        help="prime cutoff for prime-power corrections")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="tolerance override (repeatable)")
    common.add_argument("--no-meta", action="store_true", help="omit the timestamp line")
    common.add_argument("-o", "--output", type=Path, default=None, help="write here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="apmertens",
                                     description="Mertens constants in progressions and Chebotarev classes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common], help="L(q,a), g, G, g*, G*")
    p.add_argument("--q", type=parse_int, required=True)
    p.add_argument("--a", type=parse_int, default=None, help="one residue (default: all)")
    p.set_defaults(func=cmd_constants)

    for name, func, helptext in (("mertens", cmd_mertens, "sum of 1/p against its limit law"),
                                 ("product", cmd_product, "product of (1-1/p)^-1 against its limit law")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--q", type=parse_int, required=True)
        p.add_argument("--a", type=parse_int, required=True)
        p.add_argument("--x-grid", type=parse_grid, default=parse_grid("1e4:1e8:10x"))
        if name == "mertens":
            p.add_argument("--tail", type=parse_number, default=None,
                           help="cut the infinite tail integral here instead of using g")
        p.set_defaults(func=func)

    p = sub.add_parser("integral", parents=[common], help="int_2^X t^-2 E(t;q,a) dt")
    p.add_argument("--q", type=parse_int, required=True)
    p.add_argument("--a", type=parse_int, default=1)
    p.add_argument("--X", type=parse_grid, default=[1e8])
    p.set_defaults(func=cmd_integral)

    p = sub.add_parser("pliable", parents=[common], help="exact count vs main term")
    p.add_argument("--x", type=parse_number, required=True)
    p.add_argument("--y", type=parse_number, default=1.0)
    p.add_argument("--q", type=parse_int, required=True)
    p.add_argument("--a", type=parse_int, required=True)
    p.add_argument("--A", type=parse_number, default=1.0, help="exponent in the error envelope")
    p.set_defaults(func=cmd_pliable)

    p = sub.add_parser("chebotarev", parents=[common], help="Frobenius class constants")
    p.add_argument("setting", help="cyclo:q, quad:D or cubic-s3")
    p.add_argument("--class", dest="cls", default=None)
    p.add_argument("--x", type=parse_number, default=1e8)
    p.set_defaults(func=cmd_chebotarev)

    p = sub.add_parser("selftest", parents=[common], help="fast internal checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig(sieve_limit=args.limit, cache_dir=args.cache_dir, use_cache=not args.no_cache,
                        output_format=args.format, correction_cutoff=args.P,
                        tolerances=parse_tolerances(args.tol), meta=not args.no_meta)
        report = args.func(args, cfg)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        print(f"apmertens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TableRangeError as exc:
        print(f"apmertens: out of range: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except MemoryError:
        print("apmertens: out of memory; lower --limit", file=sys.stderr)
        return EXIT_RANGE
    except ConsistencyError as exc:
        print(f"apmertens: consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    text = report.render(cfg.output_format, cfg.meta)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
