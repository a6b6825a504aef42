"""Acceptance gate: one test per shipping criterion, exact tolerances.

Each test here is a self-contained pass/fail check of one promise the
package makes: oracle equivalence of the census engines, the binomial mass
identity, the dyadic range layer against naive filtering, v2 invariance
along move orbits, the asymptotic separation between the fast and brute
census paths, and byte-determinism of the CLI.  Expected total runtime is
a few minutes; the timing test dominates.
"""

import math
import random
import statistics
import subprocess
import sys
import time
from fractions import Fraction

from ftik import (
    SplitChoice,
    evaluate,
    mass,
    parse_gauss_code,
    phi_k_brute,
    phi_k_fast,
    v2_functional,
)
from ftik.dyadic import maximal_decomposition, selftest
from ftik.invariants import MoveSpec, apply_move, random_diagram

from conftest import FIGURE_EIGHT, TREFOIL, all_diagrams

MAX_K = 5
RANDOM_CASES = 500
RANDOM_MAX_N = 10
MASTER_SEED = 20260819


def iter_test_diagrams():
    """The shared corpus: every diagram with n <= 4, then seeded random ones."""
    for n in range(5):
        yield from all_diagrams(n)
    rng = random.Random(MASTER_SEED)
    for _ in range(RANDOM_CASES):
        yield random_diagram(rng.randint(0, RANDOM_MAX_N), rng.randrange(2**32))


def test_oracle_equivalence():
    checked = 0
    for K in iter_test_diagrams():
        for k in range(MAX_K + 1):
            expected = phi_k_brute(K, k).vector
            for e in range(k + 1):
                got = phi_k_fast(K, k, split=SplitChoice(e, k - e)).vector
                assert got == expected, (
                    f"split ({e},{k - e}) disagrees with brute at k={k}, n={K.n}"
                )
                checked += 1
    print(f"oracle equivalence: {checked} fast-vs-brute comparisons, all exact")


def test_mass_identity():
    checked = 0
    for K in iter_test_diagrams():
        for k in range(MAX_K + 1):
            want = Fraction(math.comb(K.n, k))
            assert mass(phi_k_brute(K, k).vector) == want
            assert mass(phi_k_fast(K, k).vector) == want
            checked += 1
    print(f"mass identity: C(n,k) confirmed for {checked} (diagram, k) pairs")


def test_dyadic_layer():
    # 20 point sets x 50 rectangles = 1000 cases per dimension 1..4
    passed, failed = selftest(seed=MASTER_SEED, cases=20, rectangles=50)
    assert failed == 0
    assert passed == 4 * 20 * 50

    m = 10
    size = 1 << m
    for lo in range(size + 1):
        for hi in range(lo, size + 1):
            pieces = maximal_decomposition(lo, hi, m)
            cursor = lo
            for d in pieces:
                assert d.lo == cursor, "pieces overlap or leave a gap"
                cursor = d.hi
                # maximal: the dyadic parent must overhang an edge
                if d.p < m:
                    parent_lo = (d.q >> 1) << (d.p + 1)
                    assert parent_lo < lo or parent_lo + (2 << d.p) > hi
            assert cursor == hi, "pieces do not cover the interval"
            if hi - lo >= 2:
                assert len(pieces) <= 2 * math.log2(hi - lo)
            else:
                assert len(pieces) == hi - lo
    print(f"dyadic layer: {passed} query cases and all intervals in [0,{size}) verified")


def _random_insert(n2, rng):
    if rng.random() < 0.5:
        return MoveSpec(
            "R1_insert",
            gap=rng.randint(0, n2),
            orient=rng.choice(("OU", "UO")),
            sign=rng.choice((1, -1)),
        )
    return MoveSpec(
        "R2_insert",
        tails_gap=rng.randint(0, n2),
        heads_gap=rng.randint(0, n2),
        variant=rng.choice(("parallel", "antiparallel")),
        sign=rng.choice((1, -1)),
    )


def test_invariant_values():
    v2 = v2_functional()
    assert evaluate(v2, parse_gauss_code(TREFOIL)) == 1
    for n in (0, 1):
        for K in all_diagrams(n):
            assert evaluate(v2, K) == 0

    # the figure-eight target is pinned by the brute-force path first
    assert evaluate(v2, parse_gauss_code(FIGURE_EIGHT), method="brute") == -1

    moves = 0
    for code, target in ((TREFOIL, 1), (FIGURE_EIGHT, -1)):
        K = parse_gauss_code(code)
        rng = random.Random(MASTER_SEED)
        for _ in range(100):
            K = apply_move(K, _random_insert(2 * K.n, rng))
            assert evaluate(v2, K) == target
            moves += 1
    print(f"invariant values: v2 constant along {moves} insertions on both seeds")


def _median_time(fn, reps=3):
    out = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return statistics.median(out)


def _fit_slope(times):
    xs = [math.log(n) for n in times]
    ys = [math.log(t) for t in times.values()]
    mx = statistics.fmean(xs)
    my = statistics.fmean(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return num / sum((x - mx) ** 2 for x in xs)


def test_complexity_separation():
    phi_k_fast(random_diagram(64, 99), 4)  # warmup: jit + key cache

    fast_times = {}
    for n in (64, 128, 256, 512, 1024):
        K = random_diagram(n, 99)
        fast_times[n] = _median_time(lambda: phi_k_fast(K, 4))
    fast_slope = _fit_slope(fast_times)

    phi_k_brute(random_diagram(16, 99), 4)  # warmup
    brute_times = {}
    for n in (16, 32, 64):
        K = random_diagram(n, 99)
        brute_times[n] = _median_time(lambda: phi_k_brute(K, 4))
    brute_slope = _fit_slope(brute_times)

    print(
        f"complexity separation: fast slope {fast_slope:.2f}, "
        f"brute slope {brute_slope:.2f}, fast n=512 {fast_times[512]:.2f}s"
    )
    assert 1.5 <= fast_slope <= 2.7, f"fast slope {fast_slope:.3f}"
    assert 3.3 <= brute_slope <= 4.7, f"brute slope {brute_slope:.3f}"
    assert fast_times[512] < 60.0, f"fast n=512 took {fast_times[512]:.1f}s"


def _run_bytes(args, input_bytes=b""):
    r = subprocess.run(
        [sys.executable, "-m", "ftik.cli", *args],
        input=input_bytes,
        capture_output=True,
        timeout=300,
    )
    assert r.returncode == 0, r.stderr.decode()
    return r.stdout


def test_cli_determinism():
    gen_args = ["gen", "--n", "12", "--count", "5", "--seed", "7"]
    first = _run_bytes(gen_args)
    assert first == _run_bytes(gen_args)

    phi_args = ["phi", "--k", "3", "--method", "fast"]
    codes = first + (TREFOIL + "\n").encode()
    out = _run_bytes(phi_args, codes)
    assert out == _run_bytes(phi_args, codes)
    print("cli determinism: gen and phi byte-identical across repeat runs")
