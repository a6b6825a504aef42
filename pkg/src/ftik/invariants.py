"""Invariant evaluation as linear functionals on the subdiagram census,
plus the validation plumbing around it (Reidemeister-style move generators
and a seeded diagram generator).

A type-k invariant factors through phi_le_k: evaluating it is taking a
fixed weighted sum of the census coefficients.  The built-in "v2" weights
the interleaved two-arrow pattern whose endpoint roles read tail, head,
head, tail; each matching key weighs the product of its two crossing
signs.  On the standard trefoil code it evaluates to 1, on the figure
eight to -1, and it is unchanged by the move generators below.
"""

from __future__ import annotations

import json
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .engine import phi_k_fast, phi_le_k
from .gauss import Arrow, GaussDiagram
from .linear import GDVector, coeff_to_str

__all__ = [
    "Functional",
    "MoveSpec",
    "InvalidGap",
    "PatternNotFound",
    "evaluate",
    "v2_functional",
    "functional_from_obj",
    "functional_to_obj",
    "load_functional",
    "apply_move",
    "random_diagram",
]


class InvalidGap(ValueError):
    pass


class PatternNotFound(ValueError):
    pass


@dataclass(frozen=True)
class Functional:
    """Finite-support weights on diagram keys; evaluation is linear."""

    k: int
    weights: Mapping[str, Fraction]
    include_phi0: bool = False

    def __post_init__(self) -> None:
        clean = {
            key: (c if isinstance(c, Fraction) else Fraction(c))
            for key, c in self.weights.items()
        }
        object.__setattr__(self, "weights", clean)


def evaluate(omega: Functional, K: GaussDiagram, method: str = "fast") -> Fraction:
    """omega applied to phi_le_k(K), optionally seeing the phi_0 term."""
    total = Fraction(0)
    if omega.include_phi0:
        # phi_0 is the single empty diagram with coefficient 1.
        total += omega.weights.get("", Fraction(0))
    if omega.k >= 1:
        census = phi_le_k(K, omega.k, method=method).vector
        for key, coeff in census.items():
            w = omega.weights.get(key)
            if w is not None:
                total += w * coeff
    return total


def v2_functional() -> Functional:
    """The type-2 invariant: count interleaved pairs with roles
    (tail, head, head, tail), weighted by the product of the signs."""
    weights = {}
    for s1 in "+-":
        for s2 in "+-":
            key = f"O1{s1} U2{s2} U1{s1} O2{s2}"
            weights[key] = Fraction(1 if s1 == s2 else -1)
    return Functional(k=2, weights=weights, include_phi0=False)


def functional_to_obj(omega: Functional) -> dict:
    return {
        "k": omega.k,
        "include_phi0": omega.include_phi0,
        "weights": [
            {"diagram": key, "coeff": coeff_to_str(c)}
            for key, c in sorted(omega.weights.items())
        ],
    }


def functional_from_obj(obj: dict) -> Functional:
    weights = {
        item["diagram"]: Fraction(item["coeff"]) for item in obj.get("weights", [])
    }
    return Functional(
        k=int(obj["k"]),
        weights=weights,
        include_phi0=bool(obj.get("include_phi0", False)),
    )


def load_functional(name_or_path: str) -> Functional:
    """Resolve a built-in functional name or a JSON file path."""
    if name_or_path == "v2":
        return v2_functional()
    try:
        with open(name_or_path, "r", encoding="utf-8") as fh:
            return functional_from_obj(json.load(fh))
    except FileNotFoundError:
        raise KeyError(f"unknown functional {name_or_path!r}")


@dataclass(frozen=True)
class MoveSpec:
    """Parameters of one move.

    R1 kinds use ``gap``, ``orient`` ("OU" puts the tail first) and
    ``sign``.  R2 kinds use ``tails_gap`` and ``heads_gap`` (both tails
    adjacent in the first, both heads adjacent in the second), ``variant``
    ("parallel" keeps the heads in tail order, "antiparallel" reverses
    them) and ``sign`` (the first tail's arrow; the other arrow gets the
    opposite sign).  Deletes take the same parameters as the insert they
    undo and require the exact pattern to be present.
    """

    kind: str
    gap: int | None = None
    tails_gap: int | None = None
    heads_gap: int | None = None
    orient: str = "OU"
    variant: str = "parallel"
    sign: int = 1

    def __post_init__(self) -> None:
        if self.kind not in ("R1_insert", "R1_delete", "R2_insert", "R2_delete"):
            raise ValueError(f"unknown move kind {self.kind!r}")
        if self.orient not in ("OU", "UO"):
            raise ValueError(f"orient must be 'OU' or 'UO', got {self.orient!r}")
        if self.variant not in ("parallel", "antiparallel"):
            raise ValueError(f"unknown R2 variant {self.variant!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


def _shifted(arrows, gaps: list[int]) -> list[Arrow]:
    """Remap old endpoints after inserting one new endpoint per listed gap.
    An insertion into gap g lands before old position g, so an old position
    shifts by the number of gap entries at or below it."""
    gaps = sorted(gaps)

    def newpos(p: int) -> int:
        return p + bisect_right(gaps, p)

    return [Arrow(newpos(a.tail), newpos(a.head), a.sign) for a in arrows]


def _r2_slots(old_len: int, tails_gap: int, heads_gap: int):
    """Final positions (t_first, t_second, h_first, h_second) after laying
    out the old positions with both insertions applied.  When both gaps
    coincide the tails precede the heads."""
    t = h = None
    seq = []
    for x in range(old_len + 1):
        if x == tails_gap:
            t = len(seq)
            seq += ["t", "t"]
        if x == heads_gap:
            h = len(seq)
            seq += ["h", "h"]
        if x < old_len:
            seq.append("o")
    return t, t + 1, h, h + 1


def _delete_positions(K: GaussDiagram, remove: set[int]) -> GaussDiagram:
    keep = sorted(set(range(2 * K.n)) - remove)
    rank = {p: r for r, p in enumerate(keep)}
    arrows = [
        Arrow(rank[a.tail], rank[a.head], a.sign)
        for a in K.arrows
        if a.tail not in remove and a.head not in remove
    ]
    return GaussDiagram(tuple(arrows))


def apply_move(K: GaussDiagram, move: MoveSpec) -> GaussDiagram:
    n2 = 2 * K.n

    if move.kind == "R1_insert":
        g = move.gap
        if g is None or not 0 <= g <= n2:
            raise InvalidGap(f"gap {g} outside 0..{n2}")
        arrows = _shifted(K.arrows, [g, g])
        if move.orient == "OU":
            arrows.append(Arrow(g, g + 1, move.sign))
        else:
            arrows.append(Arrow(g + 1, g, move.sign))
        return GaussDiagram(tuple(arrows))

    if move.kind == "R1_delete":
        g = move.gap
        if g is None or not 0 <= g <= n2 - 2:
            raise InvalidGap(f"gap {g} does not address two positions")
        want_tail, want_head = (g, g + 1) if move.orient == "OU" else (g + 1, g)
        for a in K.arrows:
            if a.tail == want_tail and a.head == want_head and a.sign == move.sign:
                return _delete_positions(K, {g, g + 1})
        raise PatternNotFound(f"no matching kink at gap {g}")

    a_gap, b_gap = move.tails_gap, move.heads_gap

    if move.kind == "R2_insert":
        if a_gap is None or b_gap is None or not (
            0 <= a_gap <= n2 and 0 <= b_gap <= n2
        ):
            raise InvalidGap(f"gaps ({a_gap}, {b_gap}) outside 0..{n2}")
        t1, t2, h1, h2 = _r2_slots(n2, a_gap, b_gap)
        arrows = _shifted(K.arrows, [a_gap, a_gap, b_gap, b_gap])
        if move.variant == "parallel":
            arrows.append(Arrow(t1, h1, move.sign))
            arrows.append(Arrow(t2, h2, -move.sign))
        else:
            arrows.append(Arrow(t1, h2, move.sign))
            arrows.append(Arrow(t2, h1, -move.sign))
        return GaussDiagram(tuple(arrows))

    # R2_delete
    if a_gap is None or b_gap is None or n2 < 4 or not (
        0 <= a_gap <= n2 - 4 and 0 <= b_gap <= n2 - 4
    ):
        raise InvalidGap(f"gaps ({a_gap}, {b_gap}) do not address four positions")
    t1, t2, h1, h2 = _r2_slots(n2 - 4, a_gap, b_gap)
    if move.variant == "parallel":
        want = {(t1, h1, move.sign), (t2, h2, -move.sign)}
    else:
        want = {(t1, h2, move.sign), (t2, h1, -move.sign)}
    have = {(a.tail, a.head, a.sign) for a in K.arrows}
    if not want <= have:
        raise PatternNotFound(
            f"no matching R2 pair at gaps ({a_gap}, {b_gap})"
        )
    return _delete_positions(K, {t1, t2, h1, h2})


def random_diagram(n: int, seed: int) -> GaussDiagram:
    """Uniform random matching of 0..2n-1 with coin-flip roles and signs.
    Deterministic in (n, seed)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    positions = list(range(2 * n))
    rng.shuffle(positions)
    arrows = []
    for i in range(n):
        p, q = positions[2 * i], positions[2 * i + 1]
        if rng.random() < 0.5:
            p, q = q, p
        sign = 1 if rng.random() < 0.5 else -1
        arrows.append(Arrow(p, q, sign))
    arrows.sort(key=lambda a: min(a.tail, a.head))
    return GaussDiagram(tuple(arrows))
