"""Command-line front end: ``heckeavg <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path

from .arith import is_square
from .cache import ENV_VAR, TraceCache, default_cache_dir
from .horizontal import (
    DEFAULT_R_GRID,
    DELTA_PETERSSON_NORM,
    LimitMeasure,
    atkin_serre_scan,
    avf_limit,
    convergence_trace,
    measure_moment,
    normalize,
    rth_mean_comparison,
)
from .level1 import format_coefficients, read_coefficient_file, tau_series
from .trace import LevelWeight, normalized_trace, trace_hecke
from .vertical import LARGE_LEVEL, av, classify_av2_le_1, to_decimal

log = logging.getLogger("heckeavg")


@dataclass
class RunConfig:
    command: str
    fmt: str
    out: Path | None
    threads: int
    cache_dir: Path | None


class CliError(Exception):
    pass


def _fmt(x, digits: int = 10) -> str:
    if isinstance(x, Decimal):
        return format(x, f".{digits}g")
    return format(float(x), f".{digits}g")


def _frac_json(q):
    return {"num": q.numerator, "den": q.denominator}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _space(args) -> LevelWeight:
    try:
        return LevelWeight(args.N, args.k)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def cmd_trace(args, cfg: RunConfig) -> str:
    space = _space(args)
    tv = trace_hecke(space, args.m)
    norm = normalized_trace(space, args.m).value if is_square(args.m) else None
    if cfg.fmt == "json":
        return _json(
            {"N": space.N, "k": space.k, "m": args.m, "trace": tv.value,
             "normalized": _frac_json(norm) if norm is not None else None}
        )
    if cfg.fmt == "csv":
        return _csv(["N", "k", "m", "trace", "normalized"],
                    [[space.N, space.k, args.m, tv.value, "" if norm is None else str(norm)]])
    lines = [f"Tr T_{args.m} on S_{space.k}(Gamma0({space.N})) = {tv.value}"]
    if norm is not None:
        lines.append(f"normalized: {norm}")
    return "\n".join(lines) + "\n"


def cmd_av(args, cfg: RunConfig) -> str:
    space = _space(args)
    res = av(space, args.m)
    if cfg.fmt == "json":
        return _json(
            {"N": space.N, "k": space.k, "m": args.m, "av_squared": _frac_json(res.squared),
             "av_exact": res.radical.as_json(), "av_decimal": str(res.decimal)}
        )
    if cfg.fmt == "csv":
        return _csv(["N", "k", "m", "av_squared", "av_exact", "av_decimal"],
                    [[space.N, space.k, args.m, str(res.squared), res.radical.render(), res.decimal]])
    return (f"Av_{args.m}{space} = {res.radical.render('·')} ~ {res.decimal}\n"
            f"Av^2 = {res.squared}\n")


def cmd_classify(args, cfg: RunConfig) -> str:
    cache = TraceCache(cfg.cache_dir) if cfg.cache_dir else None

    def progress(done, total):
        print(f"classify: levels N <= {done} of {total} done", file=sys.stderr)

    result = classify_av2_le_1(workers=cfg.threads, max_level=args.max_level,
                               known=cache, progress=progress)
    if cache is not None and cache.dirty:
        cache.save()
    print(f"classify: {result.checked_pairs} spaces checked exactly, "
          f"{len(result.pairs)} with Av_2 <= 1", file=sys.stderr)
    rows = [(s.N, s.k, rf.render(), str(_decimal_of(rf))) for s, rf in result.pairs]
    if cfg.fmt == "json":
        return _json(
            {"pairs": [{"N": s.N, "k": s.k, "av_exact": rf.as_json(), "av_decimal": str(_decimal_of(rf))}
                       for s, rf in result.pairs],
             "checked_pairs": result.checked_pairs,
             "max_level": result.max_level,
             "max_cutoff_weight": max((c.cutoff for c in result.certificate), default=None)}
        )
    if cfg.fmt == "csv":
        return _csv(["N", "k", "av_exact", "av_decimal"], rows)
    lines = [f"{'(N, k)':>10}  {'Av_2':<28} decimal"]
    for s, rf in result.pairs:
        lines.append(f"{str(s):>10}  {rf.render('·'):<28} {_decimal_of(rf)}")
    return "\n".join(lines) + "\n"


def _decimal_of(rf):
    return to_decimal(rf.squared())


def cmd_tau(args, cfg: RunConfig) -> str:
    series = tau_series(args.x)
    if cfg.fmt == "json":
        return _json({"label": series.label, "weight": series.weight, "values": series.values})
    if cfg.fmt == "csv":
        return _csv(["m", "a"], list(enumerate(series.values, start=1)))
    return format_coefficients(series)


def _load_form(form: str, x: int):
    if form.lower() == "delta":
        return tau_series(x)
    series = read_coefficient_file(form)
    if series.length < x:
        raise CliError(f"{form} has {series.length} coefficients, {x} requested")
    series.values = series.values[:x]
    return series


def cmd_horizontal(args, cfg: RunConfig) -> str:
    series = _load_form(args.form, args.x)
    if args.norm is None and args.norm_sq is None:
        if args.form.lower() != "delta":
            raise CliError("user-supplied forms need --norm or --norm-sq")
        limit = avf_limit(12, DELTA_PETERSSON_NORM)
    elif args.norm is not None:
        limit = avf_limit(series.weight, Decimal(args.norm))
    else:
        limit = avf_limit(series.weight, petersson_norm_sq=Decimal(args.norm_sq))
    checkpoints = args.checkpoints or [args.x]
    rows = convergence_trace(normalize(series), checkpoints, limit)
    if args.gnuplot:
        lines = [f"# x Av_f(x) gap   limit={_fmt(limit.value, 12)}"]
        lines += [f"{r.x} {_fmt(r.av, 12)} {_fmt(r.gap, 12)}" for r in rows]
        return "\n".join(lines) + "\n"
    if cfg.fmt == "json":
        return _json({"label": series.label, "weight": series.weight, "limit": _fmt(limit.value, 12),
                      "rows": [{"x": r.x, "av": _fmt(r.av, 12), "gap": _fmt(r.gap, 12)} for r in rows]})
    if cfg.fmt == "csv":
        return _csv(["x", "av", "gap"], [[r.x, _fmt(r.av, 12), _fmt(r.gap, 12)] for r in rows])
    lines = [f"{series.label} (weight {series.weight}): limit {_fmt(limit.value, 12)}"]
    lines += [f"  x={r.x:<10} Av_f={_fmt(r.av, 12):<16} gap={_fmt(r.gap, 6)}" for r in rows]
    return "\n".join(lines) + "\n"


def cmd_scan(args, cfg: RunConfig) -> str:
    series = _load_form(args.form, args.x)
    res = atkin_serre_scan(series, args.epsilon, args.x)
    payload = {"label": series.label, "weight": series.weight, "epsilon": args.epsilon,
               "x_max": res.x_max, "min_ratio": None if res.min_ratio is None else _fmt(res.min_ratio),
               "argmin": res.argmin, "zero_count": res.zero_count}
    if cfg.fmt == "json":
        return _json(payload)
    if cfg.fmt == "csv":
        keys = ["label", "weight", "epsilon", "x_max", "min_ratio", "argmin", "zero_count"]
        return _csv(keys, [[payload[k] for k in keys]])
    return (f"{series.label}: min |a(m)|/m^((k-3)/2-eps) over m <= {res.x_max} (a(m) != 0) "
            f"= {payload['min_ratio']} at m = {res.argmin}; {res.zero_count} vanishing coefficients\n")


def cmd_measures(args, cfg: RunConfig) -> str:
    r_values = args.r or [2.0]
    measures = [LimitMeasure("serre", p) for p in (args.p or [2])]
    measures += [LimitMeasure("sato_tate"), LimitMeasure("cm")]
    rows = [(str(mu), r, measure_moment(mu, r)) for r in r_values for mu in measures]
    comparison = rth_mean_comparison(args.compare) if args.compare else []
    if cfg.fmt == "json":
        return _json({"moments": [{"measure": n, "r": r, "moment": _fmt(v, 12)} for n, r, v in rows],
                      "comparison": [{"r": c.r, "sato_tate": _fmt(c.sato_tate, 12), "cm": _fmt(c.cm, 12),
                                      "difference": _fmt(c.difference, 6), "agree": c.agree}
                                     for c in comparison]})
    if cfg.fmt == "csv":
        out = _csv(["measure", "r", "moment"], [[n, r, _fmt(v, 12)] for n, r, v in rows])
        if comparison:
            out += _csv(["r", "sato_tate_mean", "cm_mean", "difference", "agree"],
                        [[c.r, _fmt(c.sato_tate, 12), _fmt(c.cm, 12), _fmt(c.difference, 6), c.agree]
                         for c in comparison])
        return out
    lines = [f"{n:<12} r={r:<5g} moment={_fmt(v, 12)}" for n, r, v in rows]
    for c in comparison:
        flag = "agree" if c.agree else "differ"
        lines.append(f"r={c.r:<5g} ST mean={_fmt(c.sato_tate, 10)} CM mean={_fmt(c.cm, 10)} {flag}")
    return "\n".join(lines) + "\n"


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v]


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("csv", "json", "human"), default="human")
    common.add_argument("--out", type=Path, default=None, help="write data here instead of stdout")
    common.add_argument("--threads", type=int, default=1, help="worker processes for classify")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help=f"trace cache directory (default: ${ENV_VAR})")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="heckeavg", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def space_args(p, default_m):
        p.add_argument("-N", type=int, required=True, help="level")
        p.add_argument("-k", type=int, required=True, help="even weight")
        p.add_argument("-m", type=int, default=default_m, help="Hecke index, coprime to N")

    p = sub.add_parser("trace", parents=[common], help="exact Tr T_m on S_k(Gamma0(N))")
    space_args(p, 1)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("av", parents=[common], help="vertical quadratic mean Av_m(N,k)")
    space_args(p, 2)
    p.set_defaults(func=cmd_av)

    p = sub.add_parser("classify", parents=[common], help="all (N,k), N odd, with Av_2(N,k) <= 1")
    p.add_argument("--max-level", type=int, default=LARGE_LEVEL, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("tau", parents=[common], help="Ramanujan tau(1..x)")
    p.add_argument("-x", type=int, required=True)
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("horizontal", parents=[common], help="Av_f(x) convergence table")
    p.add_argument("--form", default="delta", help="'delta' or a coefficient file")
    p.add_argument("-x", type=int, required=True)
    p.add_argument("--checkpoints", type=_ints, default=None, help="comma-separated x values")
    p.add_argument("--norm", default=None, help="Petersson norm ||f||")
    p.add_argument("--norm-sq", default=None, help="Petersson inner product <f,f>")
    p.add_argument("--gnuplot", action="store_true", help="emit whitespace-separated columns")
    p.set_defaults(func=cmd_horizontal)

    p = sub.add_parser("scan", parents=[common], help="lower-bound scan of |a(m)|")
    p.add_argument("--form", default="delta")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("-x", type=int, default=100_000)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("measures", parents=[common], help="moments of the limiting measures")
    p.add_argument("--r", type=float, action="append", help="moment order (repeatable)")
    p.add_argument("--p", type=int, action="append", help="prime for the Serre measure (repeatable)")
    p.add_argument("--compare", type=_floats, nargs="?", const=list(DEFAULT_R_GRID), default=None,
                   help="also compare ST and CM r-th means on this comma-separated grid")
    p.set_defaults(func=cmd_measures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    cfg = RunConfig(args.command, args.fmt, args.out, args.threads,
                    args.cache_dir or default_cache_dir())
    try:
        text = args.func(args, cfg)
    except (CliError, ValueError, ArithmeticError, OSError) as exc:
        print(f"heckeavg {args.command}: error: {exc}", file=sys.stderr)
        return 1
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
