"""Shared test helpers: exhaustive diagram enumeration and seed codes."""

from __future__ import annotations

import itertools

from ftik import Arrow, GaussDiagram

TREFOIL = "O1+ U2+ O3+ U1+ O2+ U3+"
FIGURE_EIGHT = "O1+ U2- O3- U1+ O4+ U3- O2- U4+"


def matchings(points: tuple[int, ...]):
    """All perfect matchings of an even point set, as tuples of pairs."""
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for i, other in enumerate(rest):
        pair = (first, other)
        remaining = rest[:i] + rest[i + 1 :]
        for sub in matchings(remaining):
            yield (pair,) + sub


def all_diagrams(n: int):
    """Every n-arrow diagram: matchings x orientations x signs."""
    for match in matchings(tuple(range(2 * n))):
        for orient in itertools.product((0, 1), repeat=n):
            for signs in itertools.product((1, -1), repeat=n):
                arrows = []
                for (a, b), o, s in zip(match, orient, signs):
                    tail, head = (a, b) if o == 0 else (b, a)
                    arrows.append(Arrow(tail, head, s))
                yield GaussDiagram(tuple(arrows))


def count_diagrams(n: int) -> int:
    double_fact = 1
    for i in range(2 * n - 1, 0, -2):
        double_fact *= i
    return double_fact * 4**n
