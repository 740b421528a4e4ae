"""Command-line drivers. Each subcommand parses input, calls one library entry point and prints JSON lines.

Exit codes: 0 success, 1 usage, 2 unsupported or capped, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time

from . import __version__
from .bilinear import bounds as bd
from .bilinear.moduli import DEFAULT_CD, DEFAULT_TRIPLE_CAP, z0, z1_product, z_de
from .bilinear.system import hadamard_factor_bound
from .bilinear.variety import exceptional_report, rational_witness
from .counting import (
    ALGOS,
    KINDS,
    ModInstance,
    count_modp,
    pigeonhole_witness,
    reduce_kloosterman,
    reduce_squares,
)
from .errors import GapfieldError, InvariantViolation, ResourceError, UnsupportedError, UsageError
from .exact.arith import primes_between
from .gap import DEFAULT_ENUM_CAP, parse_gap
from .io import digest, dumps, instance_from_dict, instance_to_dict, load_config, load_instance, load_set, load_system
from .reduction import reduce_chain, reduce_once
from .sumproduct import KINDS as SET_KINDS
from .sumproduct import analyze, generate_small_doubling, regime_check
from .sweep import SweepJob, run_sweep

SCHEMA = 1
EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_INVARIANT = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Capped(Exception):
    """A result was produced but a cap truncated it; printed, then exit 2."""


class Context:
    """Resolved settings: flags override the config file, which overrides defaults."""

    def __init__(self, args):
        cfg = load_config(args.config)
        caps = cfg.get("caps", {})

        def pick(flag, key, default):
            return flag if flag is not None else cfg.get(key, default)

        self.seed = int(pick(args.seed, "seed", 0))
        self.width = int(pick(args.width, "width", 1))
        self.C_d = int(pick(getattr(args, "C_d", None), "C_d", DEFAULT_CD))
        self.enum_cap = int(caps.get("enum", DEFAULT_ENUM_CAP))
        self.witness_cap = int(caps.get("witness", 10**4))
        self.triple_cap = int(caps.get("triples", DEFAULT_TRIPLE_CAP))
        self.timing = args.timing
        self.out = sys.stdout

    def emit(self, op: str, params: dict, result, elapsed: float | None = None):
        rec = {
            "schema": SCHEMA,
            "version": __version__,
            "op": op,
            "digest": digest(params),
            "params": params,
            "seed": self.seed,
            "result": result,
            "elapsed": elapsed if self.timing else None,
        }
        self.out.write(dumps(rec) + "\n")


def _timed(fn, *a, **kw):
    t0 = time.perf_counter()
    r = fn(*a, **kw)
    return r, time.perf_counter() - t0


def _range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected lo:hi, got {text!r}") from None


def _instance(args) -> ModInstance:
    if args.instance:
        return load_instance(args.instance)
    missing = [f for f, v in (("--p", args.p), ("--lambda", args.lam), ("--gap-a", args.gap_a), ("--gap-b", args.gap_b)) if v is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)} (or give --instance)")
    return instance_from_dict({"p": args.p, "lambda": args.lam, "kind": args.kind, "A": args.gap_a, "B": args.gap_b})


# -- subcommands --------------------------------------------------------------


def cmd_count(args, ctx: Context) -> int:
    inst = _instance(args)
    params = {**instance_to_dict(inst), "algo": args.algo, "via_reduction": args.via_reduction}
    t0 = time.perf_counter()
    if args.via_reduction:
        if inst.kind == "product":
            raise UsageError("--via-reduction applies to kloosterman and squares")
        if inst.kind == "kloosterman":
            red, offset = reduce_kloosterman(inst)
            n = count_modp(red, args.algo, ctx.witness_cap, ctx.enum_cap).count + offset
            result = {"count": n, "reduced": instance_to_dict(red), "offset": offset}
        else:
            sq = reduce_squares(inst)
            result = {"count": sq.count(), "upper": instance_to_dict(sq.upper), "upper_count": count_modp(sq.upper, args.algo).count}
    else:
        result = count_modp(inst, args.algo, ctx.witness_cap, ctx.enum_cap).payload()
    ctx.emit("count", params, result, time.perf_counter() - t0)
    return 0


def cmd_sweep(args, ctx: Context) -> int:
    if args.job:
        data = load_config(args.job)
    else:
        if not args.template_a or not (args.primes or args.prime_list):
            raise UsageError("sweep needs --job, or --template-a with --primes / --prime-list")
        if args.primes:
            lo, hi = _range(args.primes)
            primes = {"lo": lo, "hi": hi}
        else:
            primes = [int(t) for t in args.prime_list.split(",") if t.strip()]
        data = {"primes": primes, "A": args.template_a, "B": args.template_b or args.template_a, "kind": args.kind, "lambda": args.lam, "threshold": args.threshold}
    data = {**data, "seed": args.seed if args.seed is not None else data.get("seed", ctx.seed)}
    job = SweepJob.from_dict(data)
    width = args.width if args.width is not None else data.get("width", ctx.width)
    rows, summary = run_sweep(job, width, ctx.enum_cap)
    base = job.params()
    for r in rows:
        ctx.emit("sweep.prime", {**base, "primes": [r["p"]]}, r)
    ctx.emit("sweep.summary", base, summary)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fields = ["p", "size_a", "size_b", "lambda", "count", "nonzero_pairs", "average_bound", "exceeds"]
            w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
    return 0


def cmd_zde(args, ctx: Context) -> int:
    params = {"d": args.d, "e": args.e, "H": args.H, "C_d": ctx.C_d, "cap": ctx.triple_cap, "full": args.full}
    t0 = time.perf_counter()
    if args.full:
        rep = z_de(args.d, args.e, args.H, ctx.C_d, ctx.triple_cap, ctx.width)
        result = rep.payload()
        truncated = rep.z1.truncated
    else:
        f0 = z0(args.d, args.H, ctx.C_d)
        f1 = z1_product(args.d, args.e, args.H, ctx.triple_cap, ctx.width)
        result = {
            "z0": f0.report(),
            "z1": f1.report(),
            "logz_bound": str(bd.logz_bound(args.d, args.e, args.H)),
            "hadamard_bound": hadamard_factor_bound(args.d, args.e, args.H),
        }
        truncated = f1.truncated
    ctx.emit("zde", params, result, time.perf_counter() - t0)
    if truncated:
        raise _Capped("triple cap reached; Z1 is truncated")
    return 0


def cmd_exceptional(args, ctx: Context) -> int:
    system = load_system(args.system)
    rep, el = _timed(exceptional_report, system, args.limit, args.sweep)
    result = rep.payload()
    if args.witness:
        w = rational_witness(system)
        result["witness"] = None if w is None else w.payload()
    ctx.emit("exceptional", {"system": system.payload(), "limit": args.limit, "sweep": args.sweep}, result, el)
    return 0


def cmd_reduce(args, ctx: Context) -> int:
    inst = _instance(args)
    cert, el = _timed(reduce_once, inst, ctx.C_d)
    ctx.emit("reduce", {**instance_to_dict(inst), "C_d": ctx.C_d}, cert.payload(), el)
    return 0


def cmd_chain(args, ctx: Context) -> int:
    inst = _instance(args)
    res, el = _timed(reduce_chain, inst, ctx.C_d, args.max_steps)
    ctx.emit("chain", {**instance_to_dict(inst), "C_d": ctx.C_d, "max_steps": args.max_steps}, res.payload(), el)
    if res.aborted:
        raise _Capped("; ".join(res.aborted))
    return 0


def cmd_sumproduct(args, ctx: Context) -> int:
    if args.set:
        A, src = load_set(args.set), {"set": args.set}
    elif args.gap:
        A, src = parse_gap(args.gap).enumerate(ctx.enum_cap), {"gap": args.gap}
    elif args.generate:
        if args.size is None or args.p is None:
            raise UsageError("--generate needs --size and --p")
        A = generate_small_doubling(args.generate, args.size, args.p, ctx.seed)
        src = {"generate": args.generate, "size": args.size, "p": args.p}
    else:
        raise UsageError("give --set, --gap or --generate")
    rep, el = _timed(analyze, A)
    result = rep.payload()
    if args.K is not None:
        result["regime"] = regime_check(rep.size, args.K, rep.p, args.c0)
    ctx.emit("sumproduct", {**src, "K": args.K, "c0": args.c0}, result, el)
    return 0


def _need(args, *names):
    miss = [n for n in names if getattr(args, n) is None]
    if miss:
        raise UsageError(f"--what {args.what} needs " + ", ".join("--" + n.replace("_", "-") for n in miss))
    return [getattr(args, n) for n in names]


BOUNDS = {
    "gamma": (("s",), lambda s: bd.gamma(s)),
    "delta": (("K",), lambda K: bd.delta(K)),
    "doss": (("n", "r", "count", "h"), lambda n, r, s, h: bd.doss_log_bound(n, r, s, h)),
    "logz": (("d", "e", "H"), lambda d, e, H: bd.logz_bound(d, e, H)),
    "main-exponent": (("d", "e"), lambda d, e: bd.main_logz_exponent(d, e)),
    "smoothness": (("d", "e"), lambda d, e: bd.smoothness_exponent(d, e)),
    "exceptions-gap": (("d", "e"), lambda d, e: bd.exception_exponent_gap(d, e)),
    "exceptions-doubling": (("K",), lambda K: bd.exception_exponent_doubling(K)),
    "cs-rank": (("K",), lambda K: bd.cs_rank(K)),
    "cs-size": (("K", "c"), lambda K, c: bd.cs_size_log(K, c)),
    "all-prime": (("H", "d", "e", "p", "c"), lambda H, d, e, p, c: bd.all_prime_regime(H, d, e, p, c)),
    "regime": (("size", "K", "p", "c"), lambda n, K, p, c: regime_check(n, K, p, c)),
}


def cmd_bounds(args, ctx: Context) -> int:
    names, fn = BOUNDS[args.what]
    vals = _need(args, *names)
    v = fn(*vals)
    value = v if isinstance(v, dict) else str(v)
    if args.plain:
        ctx.out.write((dumps(value) if isinstance(value, dict) else value) + "\n")
        return 0
    ctx.emit("bounds", {"what": args.what, **dict(zip(names, map(str, vals)))}, {"value": value})
    return 0


def cmd_pigeonhole(args, ctx: Context) -> int:
    if args.p_range:
        primes = primes_between(*_range(args.p_range))
    elif args.p is not None:
        primes = [args.p]
    else:
        raise UsageError("give --p or --p-range")
    for p in primes:
        res, el = _timed(pigeonhole_witness, args.H, args.d, args.e, p, ctx.enum_cap)
        ctx.emit("pigeonhole", {"H": args.H, "d": args.d, "e": args.e, "p": p}, res.payload(), el)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with seed, width, C_d and caps {enum, witness, triples}")
    common.add_argument("--seed", type=int)
    common.add_argument("--width", type=int, help="worker processes (GAPFIELD_THREADS overrides)")
    common.add_argument("--timing", action="store_true", help="record elapsed seconds (output is then not byte-stable)")

    inst = _Parser(add_help=False)
    inst.add_argument("--instance", help="instance JSON file")
    inst.add_argument("--p", type=int)
    inst.add_argument("--lambda", dest="lam", type=int)
    inst.add_argument("--kind", choices=KINDS, default="product")
    inst.add_argument("--gap-a")
    inst.add_argument("--gap-b")

    cd = _Parser(add_help=False)
    cd.add_argument("--C-d", dest="C_d", type=int)

    ap = _Parser(prog="gapfield", description="Exact counting over GAPs mod p.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("count", parents=[common, inst], help="solution count I_p(A, B, λ)")
    s.add_argument("--algo", choices=ALGOS, default="lookup")
    s.add_argument("--via-reduction", action="store_true")
    s.set_defaults(fn=cmd_count)

    s = sub.add_parser("sweep", parents=[common], help="per-prime max_λ I_p over a templated instance")
    s.add_argument("--job", help="sweep job JSON")
    s.add_argument("--primes", help="lo:hi, primes in (lo, hi]")
    s.add_argument("--prime-list")
    s.add_argument("--template-a", help="GAP with a {p} placeholder, e.g. F{p}:0|1|-10..10")
    s.add_argument("--template-b")
    s.add_argument("--kind", choices=KINDS, default="product")
    s.add_argument("--lambda", dest="lam", default="argmax", type=lambda t: t if t in ("argmax", "random") else int(t))
    s.add_argument("--threshold", type=int, default=1)
    s.add_argument("--csv", help="also write the per-prime table to this CSV file")
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("zde", parents=[common, cd], help="factored exceptional modulus")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--H", type=int, required=True)
    s.add_argument("--full", action="store_true", help="assemble Z0 Z1 Z2 (d = e = 1 only)")
    s.set_defaults(fn=cmd_zde)

    s = sub.add_parser("exceptional", parents=[common], help="exceptional primes of a coefficient system")
    s.add_argument("--system", required=True, help="system JSON file")
    s.add_argument("--limit", type=int)
    s.add_argument("--sweep", action="store_true", help="cross-check by per-prime recount up to --limit")
    s.add_argument("--witness", action="store_true", help="also search for a rational point")
    s.set_defaults(fn=cmd_exceptional)

    s = sub.add_parser("reduce", parents=[common, inst, cd], help="one certified rank-reduction step")
    s.set_defaults(fn=cmd_reduce)

    s = sub.add_parser("chain", parents=[common, inst, cd], help="reduce down to rank-1 leaves")
    s.add_argument("--max-steps", type=int, default=10000)
    s.set_defaults(fn=cmd_chain)

    s = sub.add_parser("sumproduct", parents=[common], help="sum-product statistics of a set mod p")
    s.add_argument("--set", help="set file: p=<prime> header, one element per line")
    s.add_argument("--gap")
    s.add_argument("--generate", choices=SET_KINDS)
    s.add_argument("--size", type=int)
    s.add_argument("--p", type=int)
    s.add_argument("--K", type=int, help="also evaluate both parameter regimes for doubling K")
    s.add_argument("--c0", default="1")
    s.set_defaults(fn=cmd_sumproduct)

    s = sub.add_parser("bounds", parents=[common], help="closed-form bound evaluators")
    s.add_argument("--what", choices=sorted(BOUNDS), required=True)
    for name in ("s", "K", "n", "r", "count", "d", "e", "H", "p", "size"):
        s.add_argument(f"--{name}", type=int)
    s.add_argument("--h", type=float, help="logarithmic height")
    s.add_argument("--c", default="1", help="constant (decimal)")
    s.add_argument("--plain", action="store_true", help="print only the value")
    s.set_defaults(fn=cmd_bounds)

    s = sub.add_parser("pigeonhole", parents=[common], help="popular product class of the base progressions")
    s.add_argument("--H", type=int, required=True)
    s.add_argument("--d", type=int, default=1)
    s.add_argument("--e", type=int, default=1)
    s.add_argument("--p", type=int)
    s.add_argument("--p-range", help="lo:hi, primes in (lo, hi]")
    s.set_defaults(fn=cmd_pigeonhole)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        ctx = Context(args)
        return args.fn(args, ctx)
    except _Capped as exc:
        print(f"gapfield: capped: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InvariantViolation, AssertionError) as exc:
        print(f"gapfield: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except UsageError as exc:
        sub = ap._subparsers._group_actions[0].choices.get(args.cmd) if args.cmd else ap
        (sub or ap).print_usage(sys.stderr)
        print(f"gapfield: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UnsupportedError, ResourceError) as exc:
        print(f"gapfield: unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except GapfieldError as exc:
        print(f"gapfield: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
