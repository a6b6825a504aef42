"""Dyadic-interval machinery: truncations, maximal decompositions, and a
weighted multi-dimensional lookup table for exact rectangle sums.

A dyadic interval is [q*2^p, (q+1)*2^p): in binary, a fixed prefix followed
by p free bits.  Any two dyadic intervals either nest or are disjoint, which
gives two complementary facts this module is built on:

- every point x < 2^m lies in exactly m+1 dyadic intervals, one per number
  of freed low bits (its "truncations");
- every half-open interval [lo, hi) splits into at most 2*log2(hi-lo)
  disjoint maximal dyadic pieces.

The table accumulates each inserted point's weight into all (m+1)^ell
dyadic rectangles (products of truncations) containing it.  A rectangle
query then decomposes each coordinate interval into maximal dyadic pieces
and sums the table values over the product of the decompositions, touching
no individual points.  Weights are any client type with exact ``+`` and a
zero (ints for counting, diagram vectors in the engine).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "DyadicInterval",
    "DyadicRectangle",
    "WeightTable",
    "XOutOfRange",
    "BoundsOutOfRange",
    "CoordOutOfRange",
    "bits_for",
    "truncations",
    "maximal_decomposition",
    "build_table",
    "query",
    "naive_query",
    "selftest",
]


class XOutOfRange(ValueError):
    pass


class BoundsOutOfRange(ValueError):
    pass


class CoordOutOfRange(ValueError):
    pass


def bits_for(size: int) -> int:
    """Smallest m with 2^m >= size; the table resolution for a domain."""
    if size < 0:
        raise ValueError("domain size must be non-negative")
    return (size - 1).bit_length() if size > 1 else 0


@dataclass(frozen=True)
class DyadicInterval:
    """[q * 2^p, (q+1) * 2^p): block q at scale p."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise ValueError("p and q must be non-negative")

    @property
    def lo(self) -> int:
        return self.q << self.p

    @property
    def hi(self) -> int:
        return (self.q + 1) << self.p

    def __contains__(self, x: int) -> bool:
        return self.lo <= x < self.hi

    def __repr__(self) -> str:
        return f"[{self.lo},{self.hi})"


@dataclass(frozen=True)
class DyadicRectangle:
    """A product of dyadic intervals; dimension 0 is the empty product."""

    coords: tuple[DyadicInterval, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))


# Entry keys pack the (p, q) pair of every coordinate into fixed-width bit
# fields of one int: 8 bits for p, 32 for q.  Cheap to build and to hash.
_QBITS = 32
_PQBITS = 40


def _pack(pairs: Iterable[tuple[int, int]]) -> int:
    key = 1  # leading 1 distinguishes dimension-0 from an absent entry
    for p, q in pairs:
        key = (key << _PQBITS) | (p << _QBITS) | q
    return key


@dataclass
class WeightTable:
    """Built once by :func:`build_table`; immutable afterwards."""

    m: int
    ell: int
    entries: dict
    zero: object
    points: int

    @property
    def entry_count(self) -> int:
        return len(self.entries)


def truncations(x: int, m: int) -> list[DyadicInterval]:
    """The m+1 nested dyadic intervals containing x, smallest first.

    Freeing low bits one at a time walks from the singleton {x} up to the
    whole domain [0, 2^m):

    >>> truncations(7, 5)
    [[7,8), [6,8), [4,8), [0,8), [0,16), [0,32)]
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if not 0 <= x < (1 << m):
        raise XOutOfRange(f"x={x} outside [0, 2^{m})")
    return [DyadicInterval(j, x >> j) for j in range(m + 1)]


def maximal_decomposition(lo: int, hi: int, m: int) -> list[DyadicInterval]:
    """Disjoint maximal dyadic intervals covering [lo, hi), left to right.

    Greedy: from the left edge, repeatedly take the largest dyadic interval
    that starts there and fits.  Each piece is maximal in [lo, hi) (its
    dyadic parent always overhangs an edge), and there are at most
    2*log2(hi-lo) pieces.

    >>> maximal_decomposition(1, 7, 3)
    [[1,2), [2,4), [4,6), [6,7)]
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if not (0 <= lo <= hi <= (1 << m)):
        raise BoundsOutOfRange(f"[{lo},{hi}) not inside [0, 2^{m}]")
    out = []
    c = lo
    while c < hi:
        p = m if c == 0 else min(m, (c & -c).bit_length() - 1)
        while c + (1 << p) > hi:
            p -= 1
        out.append(DyadicInterval(p, c >> p))
        c += 1 << p
    return out


def build_table(
    points: Iterable[tuple[Sequence[int], object]],
    m: int,
    ell: int,
    zero: object = 0,
) -> WeightTable:
    """Accumulate each point's weight into every dyadic rectangle holding it.

    ``points`` yields (coords, weight) with coords an ell-tuple below 2^m.
    Each point touches (m+1)^ell entries.  Entries whose accumulated weight
    is the client's zero are dropped, so only rectangles that actually hold
    weight occupy space.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    limit = 1 << m
    entries: dict = {}
    count = 0
    for coords, w in points:
        if len(coords) != ell:
            raise ValueError(f"expected {ell} coordinates, got {len(coords)}")
        for x in coords:
            if not 0 <= x < limit:
                raise CoordOutOfRange(f"coordinate {x} outside [0, 2^{m})")
        count += 1
        if not w:
            continue
        per = [[(j, x >> j) for j in range(m + 1)] for x in coords]
        for combo in itertools.product(*per):
            key = _pack(combo)
            cur = entries.get(key)
            if cur is None:
                entries[key] = w
            else:
                cur = cur + w
                if cur:
                    entries[key] = cur
                else:
                    del entries[key]
    return WeightTable(m=m, ell=ell, entries=entries, zero=zero, points=count)


def query(table: WeightTable, rect: Sequence[tuple[int, int]]) -> object:
    """Exact sum of inserted weights over a product of half-open intervals.

    Each coordinate interval is decomposed into maximal dyadic pieces and
    the product combinations are looked up; absent entries contribute
    nothing.  Bounds are clamped into [0, 2^m]; an inverted interval is an
    error and an empty one yields the zero weight.
    """
    if len(rect) != table.ell:
        raise ValueError(f"expected {table.ell} intervals, got {len(rect)}")
    limit = 1 << table.m
    per = []
    for lo, hi in rect:
        if lo > hi:
            raise BoundsOutOfRange(f"inverted interval [{lo},{hi})")
        lo = max(lo, 0)
        hi = min(hi, limit)
        if lo >= hi:
            return table.zero
        per.append(
            [(d.p, d.q) for d in maximal_decomposition(lo, hi, table.m)]
        )
    entries = table.entries
    total = None
    for combo in itertools.product(*per):
        v = entries.get(_pack(combo))
        if v is not None:
            total = v if total is None else total + v
    return table.zero if total is None else total


def naive_query(
    points: Iterable[tuple[Sequence[int], object]],
    rect: Sequence[tuple[int, int]],
    zero: object = 0,
) -> object:
    """Filter-and-sum reference implementation used as the oracle."""
    total = None
    for coords, w in points:
        if all(lo <= x < hi for x, (lo, hi) in zip(coords, rect)):
            total = w if total is None else total + w
    return zero if total is None else total


def selftest(seed: int = 0, cases: int = 200, rectangles: int = 50) -> tuple[int, int]:
    """Randomized equivalence check of query against naive_query.

    Returns (passed, failed) counts over ``cases`` random point sets per
    dimension 1..4, each probed with ``rectangles`` random rectangles.
    """
    rng = random.Random(seed)
    passed = failed = 0
    for ell in range(1, 5):
        for _ in range(cases):
            m = rng.randint(1, 7)
            limit = 1 << m
            npts = rng.randint(0, 30)
            pts = [
                (
                    tuple(rng.randrange(limit) for _ in range(ell)),
                    rng.randint(-3, 3),
                )
                for _ in range(npts)
            ]
            table = build_table(pts, m=m, ell=ell)
            for _ in range(rectangles):
                rect = []
                for _ in range(ell):
                    a = rng.randint(0, limit)
                    b = rng.randint(0, limit)
                    rect.append((min(a, b), max(a, b)))
                if query(table, rect) == naive_query(pts, rect):
                    passed += 1
                else:
                    failed += 1
    return passed, failed
