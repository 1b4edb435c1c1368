"""``dnacap`` command-line entry point.

Exit codes: 0 success, 1 domain or data error, 2 usage error.  Scalars go to
stdout with 10 significant digits; labels go to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bounds, coupon
from .codec import CodecConfig, decode, encode
from .errors import DnacapError, FormatError
from .experiments import ExperimentResult, fmt, load_specs, run_specs
from .fileio import (
    POOL_MAGIC,
    SAMPLE_MAGIC,
    atomic_write,
    pool_from_bytes,
    pool_to_bytes,
    read_pool,
    samples_from_bytes,
    samples_to_bytes,
)
from .genie import sample_tagged, tag_pool
from .model import SampleSet, sample_with_replacement


def _scalar(label: str, value) -> None:
    print(label, file=sys.stderr)
    print(fmt(value))


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_capacity(args):
    pt = bounds.capacity_point(args.beta, args.c)
    _scalar("capacity", pt.capacity)
    _scalar("bound1 (1 - e^-c)", pt.index_genie_bound)
    _scalar("bound2 (1 - 1/beta)", pt.type_count_bound)


def cmd_bounds(args):
    pe = args.pe
    if pe is None:
        pe = min(1.0, coupon.chebyshev_tail_bound(coupon.TailBoundInputs(args.m, args.c, args.delta)))
    _scalar("finite-M rate upper bound", bounds.rate_upper_bound_finite_M(args.m, args.beta, args.c, args.delta, pe))
    _scalar("P_E used", pe)


def cmd_typecount(args):
    if args.mode == "log-bound":
        _scalar("ln upper bound", bounds.type_count_upper_log(args.a, args.b))
    elif args.mode == "enumerate":
        res = ExperimentResult("types", [f"x{i + 1}" for i in range(args.a)])
        res.rows = [dict(zip(res.columns, v)) for v in bounds.enumerate_types(args.a, args.b)]
        _emit(res.to_csv(), args.out)
    else:
        _scalar("exact count", bounds.type_count_exact(args.a, args.b))


def cmd_coupon(args):
    s = coupon.simulate_distinct(args.m, args.c, args.trials, args.seed, args.delta or ())
    if args.out:
        atomic_write(args.out, s.to_csv())
    print(s.to_json())


def cmd_tail(args):
    inputs = coupon.TailBoundInputs(args.m, args.c, args.delta)
    _scalar("tail bound", coupon.chebyshev_tail_bound(inputs, displayed_form=args.displayed_form))


def _read_input(path: str) -> bytes:
    return sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()


def _load_config(path: str) -> CodecConfig:
    return CodecConfig.from_json(Path(path).read_text())


def cmd_encode(args):
    cfg = _load_config(args.config)
    atomic_write(args.out, pool_to_bytes(encode(_read_input(args.input), cfg)))


def cmd_decode(args):
    cfg = _load_config(args.config)
    raw = _read_input(args.input)
    if raw[:4] == SAMPLE_MAGIC:
        samples = samples_from_bytes(raw, cfg.M)
    elif raw[:4] == POOL_MAGIC:
        pool = pool_from_bytes(raw)
        samples = SampleSet(pool.params, pool.molecules)
    else:
        raise FormatError(f"unrecognised file magic {raw[:4]!r}")
    data = decode(samples, cfg)
    if args.out == "-":
        sys.stdout.buffer.write(data)
    else:
        atomic_write(args.out, data)


def cmd_channel(args):
    pool = read_pool(args.input, args.c)
    if args.genie:
        samples = sample_tagged(tag_pool(pool), args.seed)
    else:
        samples = sample_with_replacement(pool, args.seed)
    atomic_write(args.out, samples_to_bytes(samples))


def cmd_experiment(args):
    summary = run_specs(load_specs(args.spec), args.out)
    failed = [a for a in summary["assertions"] if not a["passed"]]
    for a in failed:
        print(f"FAIL {a['experiment']}: {a['name']} ({a['detail']})", file=sys.stderr)
    print(json.dumps({"pass": summary["pass"], "assertions": len(summary["assertions"]), "failed": len(failed)}))
    return 0 if summary["pass"] else 1


def _seed(text: str) -> int:
    v = int(text, 0)
    if not -(1 << 63) <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v & ((1 << 64) - 1)


def _real(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"{text} is not a finite number")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dnacap", description="DNA storage channel capacity toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity and the two simple bounds")
    p.add_argument("--beta", type=_real, required=True)
    p.add_argument("--c", type=_real, required=True)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("bounds", help="finite-M converse rate bound")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--beta", type=_real, required=True)
    p.add_argument("--c", type=_real, required=True)
    p.add_argument("--delta", type=_real, required=True)
    p.add_argument("--pe", type=_real, help="P(E); defaults to the Chebyshev tail bound")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("typecount", help="count or enumerate length-a vectors summing to b")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", dest="mode", action="store_const", const="exact")
    g.add_argument("--log-bound", dest="mode", action="store_const", const="log-bound")
    g.add_argument("--enumerate", dest="mode", action="store_const", const="enumerate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_typecount, mode="exact")

    p = sub.add_parser("coupon", help="simulate distinct-coupon counts")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=_real, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--delta", type=_real, action="append")
    p.add_argument("--out", help="per-trial CSV")
    p.set_defaults(func=cmd_coupon)

    p = sub.add_parser("tail", help="Chebyshev bound on the distinct-count tail")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c", type=_real, required=True)
    p.add_argument("--delta", type=_real, required=True)
    p.add_argument("--displayed-form", action="store_true")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("encode", help="encode bytes into a pool file")
    p.add_argument("--config", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a sample or pool file")
    p.add_argument("--config", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("channel", help="sample a pool file with replacement")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--c", type=_real, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--genie", action="store_true", help="attach source-index tags")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("experiment", help="run experiments from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
    except (DnacapError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
