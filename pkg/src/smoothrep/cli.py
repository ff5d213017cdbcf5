"""Command-line entry point.

Exit codes: 0 success, 1 mathematical failure, 2 usage error, 3 budget
exhaustion.  Output is JSON lines (numbers as decimal strings) unless
``--csv`` is given for tabular commands.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from typing import Sequence, TextIO

from smoothrep import generators, represent, spectra
from smoothrep.arith import get_sieve
from smoothrep.errors import (
    CapExceeded,
    FactorBudgetExceeded,
    NonResidue,
    NotFound,
    NotInvertible,
    NotRepresentable,
    SearchExhausted,
    UsageError,
    VerificationFailure,
)

EXIT_OK, EXIT_MATH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _emit(out: TextIO, obj: dict) -> None:
    out.write(json.dumps(obj, separators=(",", ":")) + "\n")


def _error(out: TextIO, exc: Exception, **extra) -> None:
    _emit(out, {"error": type(exc).__name__, "message": str(exc), **extra})


def _primes_in(lo: int, hi: int) -> list[int]:
    return [q for q in get_sieve(hi).primes_upto(hi) if q >= lo]


def _cmd_verify(args, out: TextIO) -> int:
    threads = args.threads or represent.default_workers()
    reports = represent.verify_theorem_range(
        args.lo, args.hi, args.method, workers=threads, certificates=args.certificates, raise_on_failure=False
    )
    for r in reports:
        _emit(out, r.to_json())
    if any(r.status == "fail" for r in reports):
        failed = [r.p for r in reports if r.status == "fail"]
        raise VerificationFailure(f"failed primes: {failed[:10]}", failed[0])
    return EXIT_OK


def _cmd_represent(args, out: TextIO) -> int:
    p, a = args.p, args.a
    if args.method == "brute":
        rep = represent.brute_force_representative(p, a)
    elif args.method == "chain":
        if a % p == 0:
            rep = represent.brute_force_representative(p, 0)
        else:
            rep = represent.represent_with_chain(represent.build_chain(p), a)
    else:
        rep = represent.represent(p, a)
    _emit(out, {**rep.to_json(), "value": str(rep.value)})
    return EXIT_OK


def _cmd_chain(args, out: TextIO) -> int:
    chain = represent.build_chain(args.p, args.q_scan_limit)
    ok = represent.validate_chain(chain)
    _emit(out, {**chain.to_json(), "valid": ok})
    return EXIT_OK if ok else EXIT_MATH


def _targets(args) -> list[int]:
    if args.p is not None:
        return [args.p]
    if args.lo is None or args.hi is None:
        raise UsageError("give -p or both --from and --to")
    return _primes_in(args.lo, args.hi)


def _cmd_mp(args, out: TextIO) -> int:
    primes = _targets(args)
    if args.p is None:
        primes = [q for q in primes if q not in (5, 7)]
    rows = [(p, spectra.compute_M(p)) for p in primes]
    if args.csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["p", "M(p)", "M(p)/p"])
        for p, m in rows:
            w.writerow([p, m, f"{m / p:.6f}"])
    else:
        for p, m in rows:
            _emit(out, {"p": str(p), "M": str(m), "ratio": f"{m / p:.6f}"})
    return EXIT_OK


def _cmd_yp(args, out: TextIO) -> int:
    rows = [(p, spectra.compute_y(p)) for p in _targets(args)]
    if args.csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["p", "y(p)"])
        w.writerows(rows)
    else:
        for p, y in rows:
            _emit(out, {"p": str(p), "y": str(y)})
    return EXIT_OK


def _load_checkpoint(path: str | None) -> generators.GeneratorState | None:
    if not path or not os.path.exists(path):
        return None
    with open(path) as fh:
        state = generators.GeneratorState.from_jsonl(fh.read())
    result = generators.replay_validate(state)
    if not result:
        raise VerificationFailure(f"checkpoint step {result.failed_step} fails replay: {result.reason}")
    return state


def _cmd_gen(args, out: TextIO) -> int:
    state = _load_checkpoint(args.checkpoint)
    start = len(state.steps) if state else 0
    stalled: FactorBudgetExceeded | None = None
    try:
        if args.rule == "mullin":
            state = generators.mullin_state(args.steps, state, seed=args.seed)
        elif args.rule == "d1":
            state = generators.d_plus_one_generator(args.steps, state)
        else:
            state = generators.d_plus_n_over_d_generator(args.steps, state=state, seed=args.seed)
    except FactorBudgetExceeded as exc:
        stalled = exc
        state = exc.state
    if state is None:
        state = generators.GeneratorState()
    for i, rec in enumerate(state.steps):
        if i >= start or not args.checkpoint:
            _emit(out, {"index": str(i + 1), **rec.to_json()})
    if args.checkpoint:
        with open(args.checkpoint, "w") as fh:
            fh.write(state.to_jsonl())
    if stalled is not None:
        _error(out, stalled, composite=str(stalled.composite), steps=str(len(state.steps)))
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_check(args, out: TextIO) -> int:
    if args.kind == "density":
        reports = [spectra.squarefree_density_check(args.limit)]
    elif args.kind == "omega":
        reports = [spectra.omega_bound_check(args.limit)]
    else:
        pairs = [(args.p, args.d)] if args.p is not None and args.d is not None else [
            (p, d)
            for p in _primes_in(3, args.p_max)
            for d in range(2, args.d_max + 1)
            if (p - 1) % d == 0
        ]
        reports = [spectra.pv_partial_sum_check(p, d) for p, d in pairs]
    for r in reports:
        _emit(out, r.to_json())
    return EXIT_OK if all(r.ok for r in reports) else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smoothrep",
        description="Squarefree smooth representatives mod p and Euclidean prime generators.",
        epilog="Budgets can be overridden with SMOOTHREP_TRIAL_BOUND, SMOOTHREP_FACTOR_ITERATIONS, "
        "SMOOTHREP_SIEVE_LIMIT, SMOOTHREP_Q_SCAN_LIMIT, SMOOTHREP_SCAN_CAP, SMOOTHREP_HEAP_BUDGET, "
        "SMOOTHREP_SUBSET_CAP and SMOOTHREP_PRIMALITY_ROUNDS.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify representability for every prime in a range")
    p.add_argument("--from", dest="lo", type=int, required=True)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--method", choices=["auto", "brute", "chain"], default="auto")
    p.add_argument("--threads", type=int, default=0, help="worker processes (default: CPU count)")
    p.add_argument("--certificates", action="store_true", help="include witnesses or chains")
    p.add_argument("--json", action="store_true", help="JSON lines output (the default)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("represent", help="squarefree p-smooth representative of a mod p")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-a", type=int, required=True)
    p.add_argument("--method", choices=["auto", "brute", "chain"], default="auto")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_represent)

    p = sub.add_parser("chain", help="build and validate a representation chain")
    p.add_argument("-p", type=int, required=True)
    p.add_argument("--q-scan-limit", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_chain)

    for name, func, help_text in (
        ("mp", _cmd_mp, "M(p): least bound covering every class"),
        ("yp", _cmd_yp, "y(p): least smoothness covering every nonzero class"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-p", type=int, default=None)
        p.add_argument("--from", dest="lo", type=int, default=None)
        p.add_argument("--to", dest="hi", type=int, default=None)
        p.add_argument("--threads", type=int, default=0)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true")
        fmt.add_argument("--csv", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("gen", help="run a prime generator")
    p.add_argument("rule", choices=["mullin", "d1", "dnd"])
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--checkpoint", default=None, help="JSON-lines file to resume from and save to")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("check", help="numerical checks of the analytic ingredients")
    p.add_argument("kind", choices=["density", "omega", "pv"])
    p.add_argument("--limit", type=int, default=10**6)
    p.add_argument("-p", type=int, default=None)
    p.add_argument("-d", type=int, default=None)
    p.add_argument("--p-max", type=int, default=1000)
    p.add_argument("--d-max", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_check)
    return parser


def run(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, CapExceeded) as exc:
        print(f"smoothrep: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FactorBudgetExceeded, SearchExhausted) as exc:
        _error(out, exc)
        return EXIT_BUDGET
    except NotRepresentable as exc:
        _error(out, exc, p=str(exc.p), a=str(exc.a))
        return EXIT_MATH
    except (VerificationFailure, NonResidue, NotInvertible, NotFound) as exc:
        _error(out, exc)
        return EXIT_MATH


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
