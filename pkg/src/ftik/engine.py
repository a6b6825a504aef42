"""Subdiagram-census maps phi_k and phi_le_k, brute force and fast.

phi_k(K) is the formal sum, over all k-arrow subdiagrams of K, of the
reparametrized subdiagram; coefficients count how often each k-arrow type
occurs.  The brute method enumerates all C(n,k) subsets directly.

The fast method splits k = e + f and reorganizes the sum: enumerate only
the C(n,e) subsets E, and for each E add in all f-subsets F disjoint from
E, grouped by the placement map lambda that records which gap of E each F
endpoint falls into.  Every k-subset D then arises once per way of naming
e of its arrows "E", i.e. C(k,e) times, so dividing the accumulated sum by
C(k,e) recovers phi_k exactly; the division must come out integral, and a
failure raises NonIntegralResult instead of rounding.

The per-E inner sums are rectangle sums over the endpoint-tuple table
theta_K (one point per f-subset, weighted by its reparametrized diagram).
Three interchangeable engines realize them:

- "table": a dyadic-interval lookup table, queried per placement map with
  maximal dyadic decompositions (the structure the complexity argument is
  about).  Build cost grows like (m+1)^(2f) per point, so it only pays off
  at very large n; it is kept exact and selectable at any size.
- "bucket": one pass over the f-subsets per E, bucketing by lambda.  Same
  sums, cheap at the small and medium sizes the test suites sweep.
- "kernel": a vectorized pair-statistics kernel for k = 4 with the (2,2)
  split (the benchmark regime).  See ftik.accel.

All three agree exactly with brute force; the acceptance suite enforces it.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .dyadic import WeightTable, bits_for, build_table, query
from .gauss import (
    GaussDiagram,
    enumerate_placements,
    parse_gauss_code,
    serialize,
    subdiagram_key,
    superimpose,
)
from .linear import GDVector, add, scale

__all__ = [
    "PhiResult",
    "SplitChoice",
    "NonIntegralResult",
    "default_split",
    "phi_k_brute",
    "theta_K",
    "phi_k_fast",
    "phi_le_k",
]

# Below this arrow count the vectorized kernel is not worth dispatching to.
KERNEL_MIN_N = 16


class NonIntegralResult(ArithmeticError):
    """The final division by C(k,e) left a non-integer coefficient.

    This cannot happen for a correct implementation; it is surfaced as an
    error rather than silently rounded so that any regression is loud.
    """


@dataclass(frozen=True)
class SplitChoice:
    e: int
    f: int

    def __post_init__(self) -> None:
        if self.e < 0 or self.f < 0:
            raise ValueError("split parts must be non-negative")

    @property
    def k(self) -> int:
        return self.e + self.f


def default_split(k: int) -> SplitChoice:
    """The balanced split e = ceil(k/2), which minimizes n^e + n^f."""
    return SplitChoice((k + 1) // 2, k // 2)


@dataclass
class PhiResult:
    k: int
    vector: GDVector
    method: str
    stats: dict = field(default_factory=dict)


def _result(k: int, counts: dict, binom: int, method: str, stats: dict) -> PhiResult:
    vec = scale(GDVector(counts, k=k), Fraction(1, binom))
    for key, c in vec.items():
        if c.denominator != 1:
            raise NonIntegralResult(
                f"coefficient of {key!r} is {c} after dividing by {binom}"
            )
    return PhiResult(k=k, vector=vec, method=method, stats=stats)


def phi_k_brute(K: GaussDiagram, k: int) -> PhiResult:
    """Direct enumeration of all C(n,k) subdiagrams."""
    if k < 0:
        raise ValueError("k must be non-negative")
    t0 = time.perf_counter_ns()
    counts: dict[str, int] = {}
    seen = 0
    for combo in itertools.combinations(range(K.n), k):
        key = subdiagram_key(K, combo)
        counts[key] = counts.get(key, 0) + 1
        seen += 1
    stats = {
        "e": k,
        "f": 0,
        "engine": "enumerate",
        "subdiagrams": seen,
        "table_entries": 0,
        "table_queries": 0,
        "wall_ns": time.perf_counter_ns() - t0,
    }
    return _result(k, counts, 1, "brute", stats)


def theta_K(K: GaussDiagram, f: int, m: int | None = None) -> WeightTable:
    """The endpoint-tuple table: one point per f-subset F of K's arrows.

    The point's coordinates are F's 2f endpoint positions in increasing
    order and its weight is the one-term vector of F's reparametrized
    diagram.  Rectangle sums over this table are exactly the grouped inner
    sums of the fast method.
    """
    if f < 0:
        raise ValueError("f must be non-negative")
    if m is None:
        m = bits_for(max(2 * K.n, 1))

    def points():
        for combo in itertools.combinations(range(K.n), f):
            coords = []
            for i in combo:
                a = K.arrows[i]
                coords.append(a.tail)
                coords.append(a.head)
            coords.sort()
            yield tuple(coords), GDVector({subdiagram_key(K, combo): 1}, k=f)

    return build_table(points(), m=m, ell=2 * f, zero=GDVector(k=f))


@lru_cache(maxsize=1 << 16)
def _cached_diagram(key: str) -> GaussDiagram:
    return parse_gauss_code(key)


@lru_cache(maxsize=1 << 20)
def _superimpose_key(ekey: str, fkey: str, lam: tuple) -> str:
    return serialize(superimpose(_cached_diagram(ekey), _cached_diagram(fkey), lam))


def _gap_array(n2: int, epos: list[int]) -> list[int]:
    """gap[x] = index of the E-gap containing position x, -1 on E's own
    endpoints.  Gap g is the open stretch between the (g-1)-th and g-th
    E endpoint, with the outer stretches indexed 0 and 2e."""
    gap = [0] * n2
    g = 0
    eset = set(epos)
    for x in range(n2):
        if x in eset:
            gap[x] = -1
            g += 1
        else:
            gap[x] = g
    return gap


def _fast_bucket(K: GaussDiagram, e: int, f: int, stats: dict) -> dict[str, int]:
    n = K.n
    n2 = 2 * n
    arrows = K.arrows
    fsubs = []
    for combo in itertools.combinations(range(n), f):
        coords = []
        for i in combo:
            a = arrows[i]
            coords.append(a.tail)
            coords.append(a.head)
        coords.sort()
        fsubs.append((coords, subdiagram_key(K, combo)))
    stats["table_entries"] = len(fsubs)
    stats["subdiagrams"] = len(fsubs)

    acc: dict[str, int] = {}
    queries = 0
    for ecombo in itertools.combinations(range(n), e):
        epos = []
        for i in ecombo:
            a = arrows[i]
            epos.append(a.tail)
            epos.append(a.head)
        epos.sort()
        ekey = subdiagram_key(K, ecombo)
        gap = _gap_array(n2, epos)
        stats["subdiagrams"] += 1

        buckets: dict[tuple, dict[str, int]] = {}
        for coords, fkey in fsubs:
            lam = []
            for x in coords:
                g = gap[x]
                if g < 0:
                    break
                lam.append(g)
            else:
                b = buckets.setdefault(tuple(lam), {})
                b[fkey] = b.get(fkey, 0) + 1
        for lam, bucket in buckets.items():
            queries += 1
            for fkey, c in bucket.items():
                key = _superimpose_key(ekey, fkey, lam)
                acc[key] = acc.get(key, 0) + c
    stats["table_queries"] = queries
    return acc


def _fast_table(K: GaussDiagram, e: int, f: int, stats: dict) -> dict[str, int]:
    n = K.n
    n2 = 2 * n
    acc: dict[str, int] = {}
    queries = 0
    subdiagrams = 0
    if f == 0:
        # Degenerate split: the inner sum is the empty diagram and the only
        # placement is the empty one, so no table is needed at all.
        table = None
        stats["table_entries"] = 0
    else:
        table = theta_K(K, f)
        stats["table_entries"] = len(table.entries)
        subdiagrams += table.points

    placements = list(enumerate_placements(e, f))
    for ecombo in itertools.combinations(range(n), e):
        epos = []
        for i in ecombo:
            a = K.arrows[i]
            epos.append(a.tail)
            epos.append(a.head)
        epos.sort()
        ekey = subdiagram_key(K, ecombo)
        subdiagrams += 1
        if table is None:
            acc[ekey] = acc.get(ekey, 0) + 1
            continue
        # Sentinels turn gap g into the open interval (ext[g], ext[g+1]).
        ext = [-1] + epos + [n2]
        for lam in placements:
            rect = [(ext[g] + 1, ext[g + 1]) for g in lam]
            queries += 1
            wv = query(table, rect)
            if not wv:
                continue
            for fkey, c in wv.items():
                key = _superimpose_key(ekey, fkey, lam)
                acc[key] = acc.get(key, 0) + int(c)
    stats["table_queries"] = queries
    stats["subdiagrams"] = subdiagrams
    return acc


def _fast_kernel(K: GaussDiagram, stats: dict) -> dict[str, int]:
    from . import accel

    pe_keys, lams, pf_keys, idx, cnt, kstats = accel.phi4_pair_tensor(K)
    stats.update(kstats)
    acc: dict[str, int] = {}
    for row in range(idx.shape[0]):
        c = int(cnt[row])
        if c == 0:
            continue
        key = _superimpose_key(
            pe_keys[idx[row, 0]], pf_keys[idx[row, 2]], lams[idx[row, 1]]
        )
        acc[key] = acc.get(key, 0) + c
    return acc


def _kernel_eligible(K: GaussDiagram, e: int, f: int) -> bool:
    if (e, f) != (2, 2) or K.n < KERNEL_MIN_N:
        return False
    from . import accel

    return accel.fast_mode()


def phi_k_fast(
    K: GaussDiagram,
    k: int,
    split: SplitChoice | tuple[int, int] | None = None,
    engine: str = "auto",
) -> PhiResult:
    """Meet-in-the-middle computation of phi_k; exact match with brute."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if split is None:
        split = default_split(k)
    elif not isinstance(split, SplitChoice):
        split = SplitChoice(*split)
    if split.k != k:
        raise ValueError(f"split {split} does not sum to k={k}")
    e, f = split.e, split.f

    if engine == "auto":
        engine = "kernel" if _kernel_eligible(K, e, f) else "bucket"
    if engine not in ("bucket", "table", "kernel"):
        raise ValueError(f"unknown engine {engine!r}")

    t0 = time.perf_counter_ns()
    stats: dict = {"e": e, "f": f, "engine": engine}
    if engine == "table":
        counts = _fast_table(K, e, f, stats)
    elif engine == "kernel":
        if (e, f) != (2, 2):
            raise ValueError("the kernel engine only implements the (2,2) split")
        counts = _fast_kernel(K, stats)
    else:
        counts = _fast_bucket(K, e, f, stats)
    stats["wall_ns"] = time.perf_counter_ns() - t0
    return _result(k, counts, math.comb(k, e), "fast", stats)


def phi_le_k(K: GaussDiagram, k: int, method: str = "fast") -> PhiResult:
    """Sum of phi_i for i = 1..k.  phi_0 is available via phi_k with k=0."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if method not in ("fast", "brute"):
        raise ValueError(f"unknown method {method!r}")
    total = GDVector(k=k)
    stats: dict = {
        "e": None,
        "f": None,
        "engine": method,
        "subdiagrams": 0,
        "table_entries": 0,
        "table_queries": 0,
        "wall_ns": 0,
    }
    for i in range(1, k + 1):
        if method == "brute":
            part = phi_k_brute(K, i)
        else:
            part = phi_k_fast(K, i)
        total = add(total, part.vector)
        for key in ("subdiagrams", "table_entries", "table_queries", "wall_ns"):
            stats[key] += part.stats.get(key, 0)
    total.k = k
    return PhiResult(k=k, vector=total, method=method, stats=stats)
