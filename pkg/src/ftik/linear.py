"""Exact formal linear combinations of diagram keys.

Coefficients are exact rationals (``fractions.Fraction``); no floats.
Vectors never store a zero coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

__all__ = ["GDVector", "add", "scale", "mass", "vector_to_obj", "coeff_to_str"]


class GDVector:
    """Immutable map from canonical diagram key to nonzero rational."""

    __slots__ = ("_terms", "k")

    def __init__(self, terms: Mapping[str, object] | None = None, k: int | None = None):
        clean: dict[str, Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = c if isinstance(c, Fraction) else Fraction(c)
                if c:
                    clean[key] = c
        self._terms = clean
        self.k = k

    def items(self) -> Iterable[tuple[str, Fraction]]:
        return self._terms.items()

    def keys(self):
        return self._terms.keys()

    def get(self, key: str, default: Fraction = Fraction(0)) -> Fraction:
        return self._terms.get(key, default)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GDVector):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        raise TypeError("GDVector is not hashable")

    def __add__(self, other: "GDVector") -> "GDVector":
        return add(self, other)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k!r}: {v}" for k, v in sorted(self._terms.items()))
        return f"GDVector({{{inner}}})"


def add(a: GDVector, b: GDVector) -> GDVector:
    merged = dict(a._terms)
    for key, c in b._terms.items():
        s = merged.get(key)
        if s is None:
            merged[key] = c
        else:
            s = s + c
            if s:
                merged[key] = s
            else:
                del merged[key]
    out = GDVector(k=a.k if a.k is not None else b.k)
    out._terms = merged
    return out


def scale(a: GDVector, c) -> GDVector:
    c = c if isinstance(c, Fraction) else Fraction(c)
    out = GDVector(k=a.k)
    if c:
        out._terms = {key: v * c for key, v in a._terms.items()}
    return out


def mass(a: GDVector) -> Fraction:
    return sum(a._terms.values(), Fraction(0))


def coeff_to_str(c: Fraction) -> str:
    # Fraction formats itself as "p" or "p/q", which is the wire format.
    return str(c)


def vector_to_obj(a: GDVector) -> dict:
    """JSON-ready form: terms sorted by key, coefficients as strings."""
    return {
        "k": a.k,
        "terms": [
            {"diagram": key, "coeff": coeff_to_str(c)}
            for key, c in sorted(a._terms.items())
        ],
    }
