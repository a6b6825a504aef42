"""Gauss diagrams of long knots and the combinatorics on them.

A Gauss diagram records the crossing structure of a long-knot diagram: each
crossing becomes a signed arrow between the two points of the parameter line
that map to it, pointing from the over-strand passage (tail) to the
under-strand passage (head).  Only the linear order of the 2n endpoints
matters, so a diagram with n arrows lives on the integer positions
0..2n-1, each position used by exactly one arrow endpoint.

The text format used everywhere (files, CLI, dict keys) writes one token per
position: role letter ("O" for a tail, "U" for a head), an arrow label, and
the crossing sign, e.g. ``"O1+ U2+ U1+ O2+"``.  Labels are arbitrary positive
integers on input; canonical output numbers arrows 1, 2, 3, ... in order of
first appearance, which makes :func:`serialize` a canonical form: two
diagrams are equal iff their serializations are equal strings.

Virtual diagrams are accepted throughout: no planarity or realizability
check is performed.
"""

from __future__ import annotations

import itertools
import re
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "Arrow",
    "GaussDiagram",
    "Subdiagram",
    "PlacementMap",
    "GaussCodeError",
    "MalformedToken",
    "LabelNotPaired",
    "SignMismatch",
    "PlacementError",
    "LambdaLengthMismatch",
    "LambdaOutOfRange",
    "LambdaNotMonotone",
    "parse_gauss_code",
    "serialize",
    "psi",
    "subdiagram_key",
    "superimpose",
    "enumerate_placements",
    "enumerate_subdiagrams",
]

# Signs are plain ints, +1 or -1, so sign products stay ordinary arithmetic.
_SIGN_CHAR = {1: "+", -1: "-"}
_CHAR_SIGN = {"+": 1, "-": -1}

# A placement map is a non-decreasing tuple of gap indices; see superimpose().
PlacementMap = tuple


class GaussCodeError(ValueError):
    """Base class for Gauss-code parse failures."""


class MalformedToken(GaussCodeError):
    """A token does not match (O|U)<positive integer>(+|-)."""


class LabelNotPaired(GaussCodeError):
    """An arrow label does not occur exactly once as O and once as U."""


class SignMismatch(GaussCodeError):
    """The O and U tokens of one label carry different signs."""


class PlacementError(ValueError):
    """Base class for invalid placement maps."""


class LambdaLengthMismatch(PlacementError):
    pass


class LambdaOutOfRange(PlacementError):
    pass


class LambdaNotMonotone(PlacementError):
    pass


@dataclass(frozen=True)
class Arrow:
    """One crossing: tail at the over-strand endpoint, head at the under."""

    tail: int
    head: int
    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")
        if self.tail == self.head:
            raise ValueError("arrow endpoints must be distinct")


@dataclass(frozen=True)
class GaussDiagram:
    """An immutable diagram; arrow identity is the index in ``arrows``."""

    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "arrows", tuple(self.arrows))
        n = len(self.arrows)
        seen = set()
        for a in self.arrows:
            seen.add(a.tail)
            seen.add(a.head)
        if len(seen) != 2 * n or (n and (min(seen) != 0 or max(seen) != 2 * n - 1)):
            raise ValueError(
                "endpoint positions must be exactly 0..2n-1, each used once"
            )

    @property
    def n(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        return serialize(self)


@dataclass(frozen=True)
class Subdiagram:
    """A subset of a parent diagram's arrows, keeping parent positions."""

    parent: GaussDiagram
    chosen: tuple[int, ...]

    def __post_init__(self) -> None:
        chosen = tuple(self.chosen)
        object.__setattr__(self, "chosen", chosen)
        if list(chosen) != sorted(set(chosen)):
            raise ValueError("chosen arrow indices must be sorted and distinct")
        if chosen and not (0 <= chosen[0] and chosen[-1] < self.parent.n):
            raise ValueError("chosen arrow index out of range")

    @property
    def k(self) -> int:
        return len(self.chosen)


_TOKEN_RE = re.compile(r"([OU])([1-9][0-9]*)([+-])\Z")


def parse_gauss_code(text: str) -> GaussDiagram:
    """Parse a Gauss code string into a diagram.

    Tokens are whitespace separated; the i-th token describes position i.
    The empty string parses to the empty diagram.  Arrows come out ordered
    by the first appearance of their label, so parsing a canonical string
    and serializing again is the identity.

    >>> serialize(parse_gauss_code("O3+ U3+"))
    'O1+ U1+'
    """
    tokens = text.split()
    # label -> [tail position, head position, sign, first appearance]
    table: dict[str, list] = {}
    for pos, tok in enumerate(tokens):
        m = _TOKEN_RE.match(tok)
        if m is None:
            raise MalformedToken(f"token {pos + 1}: {tok!r}")
        role, label, schar = m.groups()
        entry = table.setdefault(label, [None, None, None, pos])
        slot = 0 if role == "O" else 1
        if entry[slot] is not None:
            raise LabelNotPaired(f"label {label}: more than one {role} token")
        entry[slot] = pos
        sign = _CHAR_SIGN[schar]
        if entry[2] is None:
            entry[2] = sign
        elif entry[2] != sign:
            raise SignMismatch(f"label {label}: O and U tokens disagree on sign")
    arrows = []
    for label, (tail, head, sign, _first) in sorted(
        table.items(), key=lambda kv: kv[1][3]
    ):
        if tail is None or head is None:
            raise LabelNotPaired(f"label {label}: needs exactly one O and one U token")
        arrows.append(Arrow(tail, head, sign))
    return GaussDiagram(tuple(arrows))


def serialize(D: GaussDiagram) -> str:
    """Canonical Gauss code of a diagram (labels by first appearance)."""
    role: dict[int, tuple[int, str, int]] = {}
    for i, a in enumerate(D.arrows):
        role[a.tail] = (i, "O", a.sign)
        role[a.head] = (i, "U", a.sign)
    labels: dict[int, int] = {}
    parts = []
    for p in range(2 * D.n):
        i, r, s = role[p]
        lab = labels.get(i)
        if lab is None:
            lab = len(labels) + 1
            labels[i] = lab
        parts.append(f"{r}{lab}{_SIGN_CHAR[s]}")
    return " ".join(parts)


def psi(S: Subdiagram) -> GaussDiagram:
    """Reparametrize a subdiagram onto positions 0..2k-1.

    Endpoint positions are replaced by their ranks within the subdiagram,
    forgetting how it sat inside the parent; order, roles and signs are
    kept.  Applying psi to the full diagram returns an equal diagram.
    """
    parent = S.parent
    positions = []
    for i in S.chosen:
        a = parent.arrows[i]
        positions.append(a.tail)
        positions.append(a.head)
    rank = {p: r for r, p in enumerate(sorted(positions))}
    arrows = tuple(
        Arrow(rank[parent.arrows[i].tail], rank[parent.arrows[i].head], parent.arrows[i].sign)
        for i in S.chosen
    )
    return GaussDiagram(arrows)


def subdiagram_key(D: GaussDiagram, chosen: Sequence[int]) -> str:
    """Canonical code of psi of the given arrow subset, without building
    intermediate objects.  Agrees with ``serialize(psi(Subdiagram(D, ...)))``;
    this is the hot path of the brute-force enumeration.
    """
    items = []
    for i in chosen:
        a = D.arrows[i]
        s = _SIGN_CHAR[a.sign]
        items.append((a.tail, i, "O", s))
        items.append((a.head, i, "U", s))
    items.sort()
    labels: dict[int, int] = {}
    parts = []
    for _pos, i, r, s in items:
        lab = labels.get(i)
        if lab is None:
            lab = len(labels) + 1
            labels[i] = lab
        parts.append(f"{r}{lab}{s}")
    return " ".join(parts)


def superimpose(D: GaussDiagram, D2: GaussDiagram, lam: Sequence[int]) -> GaussDiagram:
    """Merge D2 into the gaps of D according to the placement map ``lam``.

    D with k arrows has 2k+1 gaps: gap j sits immediately before D's
    position j, and gap 2k sits after the last position.  ``lam`` lists, for
    each D2 endpoint in D2's own position order, the gap receiving it; it
    must be non-decreasing, and endpoints sharing a gap keep D2's order.
    The result is renumbered to 0..2(k+l)-1; its arrow list is D's arrows
    followed by D2's.
    """
    k2 = 2 * D.n
    lam = tuple(lam)
    if len(lam) != 2 * D2.n:
        raise LambdaLengthMismatch(
            f"placement length {len(lam)} for a diagram with {2 * D2.n} endpoints"
        )
    for v in lam:
        if not 0 <= v <= k2:
            raise LambdaOutOfRange(f"gap {v} outside 0..{k2}")
    if any(lam[i] > lam[i + 1] for i in range(len(lam) - 1)):
        raise LambdaNotMonotone(f"placement {lam} is not non-decreasing")

    def new_d_pos(p: int) -> int:
        return p + bisect_right(lam, p)

    def new_d2_pos(i: int) -> int:
        return lam[i] + i

    arrows = [
        Arrow(new_d_pos(a.tail), new_d_pos(a.head), a.sign) for a in D.arrows
    ]
    arrows += [
        Arrow(new_d2_pos(a.tail), new_d2_pos(a.head), a.sign) for a in D2.arrows
    ]
    return GaussDiagram(tuple(arrows))


def enumerate_placements(k: int, ell: int) -> Iterator[PlacementMap]:
    """Yield all non-decreasing maps from 2*ell endpoints to the 2k+1 gaps,
    in lexicographic order.  There are C(2k+2*ell, 2*ell) of them.
    """
    if k < 0 or ell < 0:
        raise ValueError("k and ell must be non-negative")
    return itertools.combinations_with_replacement(range(2 * k + 1), 2 * ell)


def enumerate_subdiagrams(K: GaussDiagram, size: int) -> Iterator[Subdiagram]:
    """Yield every ``size``-arrow subdiagram of K once; empty if size > n."""
    if size < 0:
        raise ValueError("size must be non-negative")
    for combo in itertools.combinations(range(K.n), size):
        yield Subdiagram(K, combo)
