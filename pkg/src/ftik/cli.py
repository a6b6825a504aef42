"""Command-line surface: compute the census, evaluate functionals, verify
fast against brute, benchmark scaling, and generate test diagrams.

Everything on stdout is data (JSON lines or CSV) and is byte-deterministic
for fixed flags and seeds; timings, engine choices and other diagnostics go
to stderr.  Exit codes: 0 success, 1 verification mismatch, 2 parse error,
3 non-integral division guard, 4 unknown functional.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor

from .dyadic import selftest
from .engine import (
    NonIntegralResult,
    SplitChoice,
    phi_k_brute,
    phi_k_fast,
)
from .gauss import GaussCodeError, GaussDiagram, parse_gauss_code, serialize
from .invariants import evaluate, load_functional, random_diagram
from .linear import coeff_to_str

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_NONINTEGRAL = 3
EXIT_BAD_FUNCTIONAL = 4

_JSON_SEP = (",", ":")


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _workers() -> int:
    """Worker cap from FTIK_THREADS; 0 or unset means one per CPU."""
    raw = os.environ.get("FTIK_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise CLIError(EXIT_PARSE, f"FTIK_THREADS must be an integer, got {raw!r}")
    if cap < 0:
        raise CLIError(EXIT_PARSE, "FTIK_THREADS must be non-negative")
    return cap if cap > 0 else (os.cpu_count() or 1)


def _read_lines(infile: str | None) -> list[str]:
    if infile is None:
        text = sys.stdin.read()
    else:
        with open(infile, "r", encoding="utf-8") as fh:
            text = fh.read()
    return text.splitlines()


def _parse_line(code: str, lineno: int) -> GaussDiagram:
    try:
        return parse_gauss_code(code)
    except GaussCodeError as exc:
        raise CLIError(EXIT_PARSE, f"line {lineno}: {exc}") from exc


def _emit_lines(fn, lines: list[str]) -> None:
    """Run fn over (lineno, code) pairs, possibly fanned out over threads,
    and print results in input order.  fn returns (stdout_line, stderr_line)."""
    items = list(enumerate(lines, start=1))
    workers = _workers()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(fn, items)
            for out, diag in results:
                print(out)
                if diag:
                    print(diag, file=sys.stderr)
    else:
        for item in items:
            out, diag = fn(item)
            print(out)
            if diag:
                print(diag, file=sys.stderr)


def _resolve_method(method: str, n: int, k: int) -> str:
    """auto: brute force wins below the crossover where the split overhead
    costs more than the plain C(n,k) enumeration."""
    if method != "auto":
        return method
    return "brute" if n < 2 * k else "fast"


def cmd_phi(args) -> int:
    k = args.k
    if k < 0:
        raise CLIError(EXIT_PARSE, "--k must be non-negative")
    split = None
    if args.e is not None:
        if not 0 <= args.e <= k:
            raise CLIError(EXIT_PARSE, f"--e must lie in 0..{k}")
        split = SplitChoice(args.e, k - args.e)

    def work(item):
        lineno, code = item
        K = _parse_line(code, lineno)
        method = _resolve_method(args.method, K.n, k)
        if method == "brute":
            res = phi_k_brute(K, k)
        else:
            res = phi_k_fast(K, k, split=split)
        obj = {
            "input": code,
            "k": k,
            "method": res.method,
            "e": res.stats["e"],
            "f": res.stats["f"],
            "terms": [
                {"diagram": key, "coeff": coeff_to_str(c)}
                for key, c in sorted(res.vector.items())
            ],
        }
        diag = (
            f"line {lineno}: n={K.n} engine={res.stats['engine']}"
            f" wall_ns={res.stats['wall_ns']}"
            f" entries={res.stats['table_entries']}"
            f" queries={res.stats['table_queries']}"
        )
        return json.dumps(obj, separators=_JSON_SEP), diag

    _emit_lines(work, _read_lines(args.infile))
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        omega = load_functional(args.functional)
    except KeyError as exc:
        raise CLIError(EXIT_BAD_FUNCTIONAL, str(exc.args[0])) from exc
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise CLIError(
            EXIT_BAD_FUNCTIONAL, f"bad functional {args.functional!r}: {exc}"
        ) from exc

    def work(item):
        lineno, code = item
        K = _parse_line(code, lineno)
        method = _resolve_method(args.method, K.n, omega.k)
        value = evaluate(omega, K, method=method)
        obj = {"input": code, "value": coeff_to_str(value)}
        return json.dumps(obj, separators=_JSON_SEP), None

    _emit_lines(work, _read_lines(args.infile))
    return EXIT_OK


def cmd_verify(args) -> int:
    passes = 0
    failures = []
    for t in range(args.trials):
        seed = args.seed + t
        K = random_diagram(args.n, seed=seed)
        ok = True
        for k in range(args.k + 1):
            want = phi_k_brute(K, k).vector
            for e in range(k + 1):
                got = phi_k_fast(K, k, split=SplitChoice(e, k - e))
                if got.vector != want:
                    ok = False
                    failures.append((seed, k, e, serialize(K)))
        if ok:
            passes += 1
    print(f"{passes}/{args.trials} pass")
    for seed, k, e, code in failures:
        print(
            f"MISMATCH seed={seed} k={k} split=({e},{k - e}) code={code!r}",
            file=sys.stderr,
        )
    return EXIT_OK if not failures else EXIT_MISMATCH


def _bench_sizes(nmin: int, nmax: int, steps: int) -> list[int]:
    if nmin < 1 or nmax < nmin or steps < 1:
        raise CLIError(EXIT_PARSE, "need 1 <= nmin <= nmax and steps >= 1")
    if steps == 1 or nmin == nmax:
        raw = [nmin]
    else:
        ratio = (nmax / nmin) ** (1 / (steps - 1))
        raw = [round(nmin * ratio**i) for i in range(steps)]
        raw[-1] = nmax
    sizes = []
    for n in raw:
        if n not in sizes:
            sizes.append(n)
    return sizes


def _fit_slope(xs: list[int], ys: list[int]) -> float:
    lx = [math.log(x) for x in xs]
    ly = [math.log(max(y, 1)) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    var = sum((x - mx) ** 2 for x in lx)
    if var == 0:
        return float("nan")
    return sum((x - mx) * (y - my) for x, y in zip(lx, ly)) / var


def cmd_bench(args) -> int:
    methods = ["fast", "brute"] if args.method == "both" else [args.method]
    sizes = _bench_sizes(args.nmin, args.nmax, args.steps)
    print("n,k,method,e,f,wall_ns,table_entries,table_queries,terms")

    def run(K: GaussDiagram, method: str):
        if method == "brute":
            return phi_k_brute(K, args.k)
        return phi_k_fast(K, args.k)

    # One throwaway run per method at the smallest size pays the one-time
    # costs (jit compilation, key caches) outside the timed region.
    for method in methods:
        run(random_diagram(sizes[0], seed=args.seed), method)

    times: dict[str, list[int]] = {m: [] for m in methods}
    for n in sizes:
        K = random_diagram(n, seed=args.seed)
        for method in methods:
            walls = []
            res = None
            for _ in range(max(args.reps, 1)):
                res = run(K, method)
                walls.append(res.stats["wall_ns"])
            wall = int(statistics.median(walls))
            times[method].append(wall)
            row = (
                n,
                args.k,
                method,
                res.stats["e"],
                res.stats["f"],
                wall,
                res.stats["table_entries"],
                res.stats["table_queries"],
                len(res.vector),
            )
            print(",".join(str(x) for x in row))
            print(
                f"bench n={n} method={method} engine={res.stats['engine']}"
                f" wall_ns={wall}",
                file=sys.stderr,
            )
    for method in methods:
        if len(sizes) >= 2:
            slope = _fit_slope(sizes, times[method])
            print(f"slope {method} = {slope:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.n < 0 or args.count < 0:
        raise CLIError(EXIT_PARSE, "--n and --count must be non-negative")
    for i in range(args.count):
        print(serialize(random_diagram(args.n, seed=args.seed + i)))
    return EXIT_OK


def cmd_table_selftest(args) -> int:
    passed, failed = selftest(
        seed=args.seed, cases=args.cases, rectangles=args.rectangles
    )
    print(f"{passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_MISMATCH


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftik",
        description="Finite type invariants of knots from Gauss diagrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p):
        p.add_argument(
            "--in",
            dest="infile",
            default=None,
            help="input file, one Gauss code per line (default: stdin)",
        )

    def add_method(p):
        p.add_argument(
            "--method",
            choices=("auto", "fast", "brute"),
            default="auto",
            help="census method (auto picks brute below the crossover)",
        )

    p = sub.add_parser("phi", help="compute phi_k per input line")
    p.add_argument("--k", type=int, required=True)
    add_method(p)
    p.add_argument(
        "--e", type=int, default=None, help="override the split e (f = k - e)"
    )
    add_io(p)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("eval", help="evaluate a functional per input line")
    p.add_argument(
        "--functional",
        required=True,
        help="built-in name (v2) or path to a functional JSON file",
    )
    add_method(p)
    add_io(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare fast against brute on random diagrams")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="CSV timings over geometrically spaced n")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--nmin", type=int, default=64)
    p.add_argument("--nmax", type=int, default=1024)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--method", choices=("fast", "brute", "both"), default="fast")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=3)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="emit seeded random Gauss codes")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("table-selftest", help="randomized dyadic table check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=200)
    p.add_argument("--rectangles", type=int, default=50)
    p.set_defaults(func=cmd_table_selftest)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(exc.message, file=sys.stderr)
        return exc.code
    except NonIntegralResult as exc:
        print(f"non-integral result: {exc}", file=sys.stderr)
        return EXIT_NONINTEGRAL
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
