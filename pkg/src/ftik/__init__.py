"""Finite type invariants of long knots from Gauss diagrams.

The package computes the subdiagram census maps phi_k / phi_le_k of a
Gauss diagram, both by brute-force enumeration and by a meet-in-the-middle
fast path backed by rectangle sums, evaluates invariants as linear
functionals on the census, and ships a CLI (``ftik``) for computing,
verifying and benchmarking.
"""

from .gauss import (
    Arrow,
    GaussDiagram,
    Subdiagram,
    GaussCodeError,
    MalformedToken,
    LabelNotPaired,
    SignMismatch,
    parse_gauss_code,
    serialize,
    psi,
    superimpose,
    enumerate_placements,
    enumerate_subdiagrams,
)
from .linear import GDVector, add, scale, mass
from .dyadic import (
    DyadicInterval,
    DyadicRectangle,
    WeightTable,
    truncations,
    maximal_decomposition,
    build_table,
    query,
)
from .engine import (
    NonIntegralResult,
    PhiResult,
    SplitChoice,
    default_split,
    phi_k_brute,
    phi_k_fast,
    phi_le_k,
    theta_K,
)
from .invariants import (
    Functional,
    MoveSpec,
    InvalidGap,
    PatternNotFound,
    evaluate,
    v2_functional,
    functional_from_obj,
    functional_to_obj,
    load_functional,
    apply_move,
    random_diagram,
)

__version__ = "0.1.0"
