"""Command-line interface: count, gen, verify, bench.

Exit codes: 0 success, 1 usage or input error, 2 counting failure (every
estimation round failed).  With --json the report is schema-stable: the same
keys appear for every algorithm, with null where a field does not apply.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from decimal import Context, Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from typing import List, Optional, Sequence

from . import _kernels
from .baselines import approxmc2_dnf_count, klm_count
from .bench import BENCH_SUITES
from .counter import approx_count
from .formula import (
    DnfParseError,
    exact_count,
    gen_random,
    parse_dnf,
    serialize_dnf,
)
from .verify import SUITES

__all__ = ["RunReport", "main", "console_main"]

_DECIMAL_CTX = Context(prec=15, rounding=ROUND_HALF_EVEN)

_JSON_KEYS = [
    "algo", "n", "m", "epsilon", "delta", "seed",
    "estimate_rational", "estimate_decimal",
    "rounds", "failed_rounds", "trials", "probes", "wall_ms",
]


def format_decimal(value: Fraction) -> str:
    """15 significant digits, banker's rounding; deterministic."""
    return str(
        _DECIMAL_CTX.divide(Decimal(value.numerator), Decimal(value.denominator))
    )


@dataclass
class RunReport:
    """One counting run; the estimate fields are None when the run failed."""

    algo: str
    n: int
    m: int
    epsilon: Optional[float]
    delta: Optional[float]
    seed: int
    estimate: Optional[Fraction]
    rounds: int
    failed_rounds: int
    trials: int
    probes: int
    wall_ms: float

    def to_json(self) -> str:
        data = {
            "algo": self.algo,
            "n": self.n,
            "m": self.m,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "seed": self.seed,
            "estimate_rational": (
                str(self.estimate) if self.estimate is not None else None
            ),
            "estimate_decimal": (
                format_decimal(self.estimate) if self.estimate is not None else None
            ),
            "rounds": self.rounds,
            "failed_rounds": self.failed_rounds,
            "trials": self.trials,
            "probes": self.probes,
            "wall_ms": self.wall_ms,
        }
        return json.dumps({k: data[k] for k in _JSON_KEYS})

    def to_text(self) -> str:
        lines = [f"algo: {self.algo}", f"n: {self.n}", f"m: {self.m}"]
        if self.epsilon is not None:
            lines.append(f"epsilon: {self.epsilon}")
            lines.append(f"delta: {self.delta}")
        lines.append(f"seed: {self.seed}")
        if self.estimate is not None:
            lines.append(f"estimate: {format_decimal(self.estimate)}"
                         f" (= {self.estimate})")
        else:
            lines.append("estimate: unavailable (all rounds failed)")
        lines.append(
            f"rounds: {self.rounds} ({self.failed_rounds} failed), "
            f"trials: {self.trials}, probes: {self.probes}, "
            f"wall: {self.wall_ms:.1f} ms"
        )
        return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="hashcount", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_count = sub.add_parser("count", help="count satisfying assignments")
    p_count.add_argument("file", help="DNF input file")
    p_count.add_argument(
        "--algo",
        choices=["symbolic", "klm", "approxmc2", "exact"],
        default="symbolic",
    )
    p_count.add_argument("--epsilon", type=float, default=0.8)
    p_count.add_argument("--delta", type=float, default=0.2)
    p_count.add_argument("--seed", type=int, default=None)
    p_count.add_argument("--threads", type=int, default=1)
    p_count.add_argument("--limit", type=int, default=26,
                         help="brute-force variable limit for --algo exact")
    p_count.add_argument("--impl", choices=["auto", "native", "python"],
                         default="auto", help="kernel selection")
    p_count.add_argument("--json", action="store_true")

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--wmin", type=int, required=True)
    p_gen.add_argument("--wmax", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--out", default=None, help="output file (default stdout)")

    p_verify = sub.add_parser("verify", help="run a self-check suite")
    p_verify.add_argument("--suite", choices=sorted(SUITES), required=True)
    p_verify.add_argument("--seed", type=int, default=None)

    p_bench = sub.add_parser("bench", help="run a benchmark suite")
    p_bench.add_argument("--suite", choices=sorted(BENCH_SUITES), required=True)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--json", action="store_true")
    return parser


def _resolve_seed(arg_seed: Optional[int]) -> int:
    if arg_seed is not None:
        return arg_seed
    env = os.environ.get("HASHCOUNT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise SystemExit(f"hashcount: invalid HASHCOUNT_SEED: {env!r}") from exc
    return 1


def _cmd_count(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"hashcount: cannot read {args.file}: {exc}", file=sys.stderr)
        return 1
    try:
        phi = parse_dnf(text)
    except DnfParseError as exc:
        print(f"hashcount: {args.file}: {exc}", file=sys.stderr)
        return 1
    seed = _resolve_seed(args.seed)
    t0 = time.perf_counter()
    epsilon: Optional[float] = args.epsilon
    delta: Optional[float] = args.delta
    if args.algo == "exact":
        epsilon = delta = None
        estimate = Fraction(exact_count(phi, args.limit))
        rounds = failed = trials = probes = 0
    elif args.algo == "symbolic":
        est = approx_count(
            phi, args.epsilon, args.delta, seed,
            threads=args.threads,
            impl=None if args.impl == "auto" else args.impl,
        )
        estimate = est.value
        rounds, failed = est.rounds_used, est.failed_rounds
        trials, probes = est.trials, est.probes
    elif args.algo == "klm":
        mc = klm_count(phi, args.epsilon, args.delta, seed)
        estimate = mc.value
        rounds, failed, trials, probes = 1, 0, mc.trial_sum, 0
    else:
        est = approxmc2_dnf_count(
            phi, args.epsilon, args.delta, seed, threads=args.threads
        )
        estimate = est.value
        rounds, failed = est.rounds_used, est.failed_rounds
        trials, probes = est.trials, est.probes
    wall = (time.perf_counter() - t0) * 1000.0
    report = RunReport(
        args.algo, phi.n, phi.m, epsilon, delta, seed,
        estimate, rounds, failed, trials, probes, round(wall, 3),
    )
    print(report.to_json() if args.json else report.to_text())
    return 0 if estimate is not None else 2


def _cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    try:
        phi = gen_random(args.n, args.m, args.wmin, args.wmax, seed)
    except ValueError as exc:
        print(f"hashcount: {exc}", file=sys.stderr)
        return 1
    text = serialize_dnf(phi)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def _cmd_verify(args) -> int:
    seed = _resolve_seed(args.seed)
    result = SUITES[args.suite](seed)
    for line in result.lines:
        print(line)
    print(f"suite {result.name}: {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 2


def _cmd_bench(args) -> int:
    seed = _resolve_seed(args.seed)
    rows = BENCH_SUITES[args.suite](seed)
    violations = sum(1 for r in rows if r.cap_violated)
    if args.json:
        payload = [
            {
                "suite": r.suite,
                "algo": r.algo,
                "impl": r.impl,
                "n": r.n,
                "m": r.m,
                "wall_ms": round(r.wall_ms, 3),
                "trials": r.trials,
                "probes": r.probes,
                "max_bsat_trials": r.max_bsat_trials,
                "threshold_trials": r.threshold_trials,
                "rounds": r.rounds_used,
                "failed_rounds": r.failed_rounds,
                "estimate_rational": str(r.estimate) if r.estimate is not None else None,
            }
            for r in rows
        ]
        print(json.dumps({"rows": payload, "cap_violations": violations}))
    else:
        header = (
            f"{'algo':<10} {'impl':<7} {'n':>4} {'m':>4} {'wall_ms':>10} "
            f"{'trials':>10} {'probes':>7} {'max/cell':>9} {'cap':>9}"
        )
        print(header)
        for r in rows:
            cap = r.threshold_trials if r.threshold_trials is not None else "-"
            print(
                f"{r.algo:<10} {r.impl:<7} {r.n:>4} {r.m:>4} {r.wall_ms:>10.1f} "
                f"{r.trials:>10} {r.probes:>7} {r.max_bsat_trials:>9} {cap:>9}"
            )
        if violations:
            print(f"cap violations: {violations}")
    return 0 if violations == 0 else 2


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "count":
            return _cmd_count(args)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_bench(args)
    except SystemExit as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"hashcount: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())
