"""Functionals, the v2 invariant, move generators, and invariance orbits."""

import json
import random
from fractions import Fraction

import pytest

from ftik import (
    Functional,
    InvalidGap,
    MoveSpec,
    PatternNotFound,
    apply_move,
    evaluate,
    functional_from_obj,
    functional_to_obj,
    load_functional,
    parse_gauss_code,
    phi_k_brute,
    random_diagram,
    serialize,
    v2_functional,
)

from conftest import FIGURE_EIGHT, TREFOIL


class TestV2Weights:
    def test_pattern_keys(self):
        w = v2_functional().weights
        assert w["O1+ U2+ U1+ O2+"] == 1
        assert w["O1- U2- U1- O2-"] == 1
        assert w["O1+ U2- U1+ O2-"] == -1
        assert w["O1- U2+ U1- O2+"] == -1
        assert len(w) == 4
        assert "O1+ O2+ U1+ U2+" not in w  # roles (t,t,h,h) do not match

    def test_trefoil_value(self):
        v2 = v2_functional()
        K = parse_gauss_code(TREFOIL)
        assert evaluate(v2, K) == 1
        assert evaluate(v2, K, method="brute") == 1

    def test_small_diagrams_vanish(self):
        v2 = v2_functional()
        for code in ("", "O1+ U1+", "U1+ O1+", "O1- U1-", "U1- O1-"):
            assert evaluate(v2, parse_gauss_code(code)) == 0

    def test_figure_eight_against_enumeration(self):
        # Anchor the seed's value with the plain enumeration before any
        # orbit test relies on it.
        K = parse_gauss_code(FIGURE_EIGHT)
        census = phi_k_brute(K, 2).vector
        weights = v2_functional().weights
        by_hand = sum(
            (weights.get(key, Fraction(0)) * c for key, c in census.items()),
            Fraction(0),
        )
        assert by_hand == -1
        assert evaluate(v2_functional(), K) == -1
        assert evaluate(v2_functional(), K, method="brute") == -1


class TestEvaluate:
    def test_zero_functional(self):
        omega = Functional(k=2, weights={})
        assert evaluate(omega, parse_gauss_code(TREFOIL)) == 0

    def test_indicator(self):
        # phi_1(trefoil) holds "O1+ U1+" twice and "U1+ O1+" once
        omega = Functional(k=1, weights={"O1+ U1+": Fraction(1)})
        assert evaluate(omega, parse_gauss_code(TREFOIL)) == 2
        rev = Functional(k=1, weights={"U1+ O1+": Fraction(1)})
        assert evaluate(rev, parse_gauss_code(TREFOIL)) == 1
        assert evaluate(omega, parse_gauss_code("U1+ O1+")) == 0

    def test_include_phi0(self):
        omega = Functional(k=1, weights={"": Fraction(5)}, include_phi0=True)
        assert evaluate(omega, parse_gauss_code("O1+ U1+")) == 5
        without = Functional(k=1, weights={"": Fraction(5)})
        assert evaluate(without, parse_gauss_code("O1+ U1+")) == 0

    def test_fractional_weights(self):
        omega = Functional(k=1, weights={"O1+ U1+": Fraction(1, 2)})
        assert evaluate(omega, parse_gauss_code(TREFOIL)) == 1

    def test_coerces_int_weights(self):
        omega = Functional(k=2, weights={"O1+ U1+": 2})
        assert omega.weights["O1+ U1+"] == Fraction(2)
        assert isinstance(omega.weights["O1+ U1+"], Fraction)


class TestSerialization:
    def test_round_trip(self):
        v2 = v2_functional()
        again = functional_from_obj(functional_to_obj(v2))
        assert again == v2

    def test_obj_shape(self):
        omega = Functional(k=1, weights={"O1+ U1+": Fraction(1, 3)})
        obj = functional_to_obj(omega)
        assert obj == {
            "k": 1,
            "include_phi0": False,
            "weights": [{"diagram": "O1+ U1+", "coeff": "1/3"}],
        }
        assert functional_from_obj(obj) == omega

    def test_json_stable(self):
        obj = functional_to_obj(v2_functional())
        assert json.loads(json.dumps(obj)) == obj

    def test_load_builtin(self):
        assert load_functional("v2") == v2_functional()

    def test_load_file(self, tmp_path):
        path = tmp_path / "omega.json"
        path.write_text(json.dumps(functional_to_obj(v2_functional())))
        assert load_functional(str(path)) == v2_functional()

    def test_load_unknown(self):
        with pytest.raises(KeyError):
            load_functional("no-such-functional")


class TestR1:
    def test_insert_into_empty(self):
        K = parse_gauss_code("")
        out = apply_move(K, MoveSpec("R1_insert", gap=0))
        assert serialize(out) == "O1+ U1+"
        out = apply_move(K, MoveSpec("R1_insert", gap=0, orient="UO"))
        assert serialize(out) == "U1+ O1+"
        out = apply_move(K, MoveSpec("R1_insert", gap=0, sign=-1))
        assert serialize(out) == "O1- U1-"

    def test_insert_positions_shift(self):
        K = parse_gauss_code("O1+ U1+")
        out = apply_move(K, MoveSpec("R1_insert", gap=1, sign=-1))
        assert serialize(out) == "O1+ O2- U2- U1+"

    def test_delete_undoes_insert(self):
        K = parse_gauss_code(TREFOIL)
        spec = MoveSpec("R1_insert", gap=3, orient="UO", sign=-1)
        K2 = apply_move(K, spec)
        back = apply_move(K2, MoveSpec("R1_delete", gap=3, orient="UO", sign=-1))
        assert back == K

    def test_delete_missing_pattern(self):
        with pytest.raises(PatternNotFound):
            apply_move(parse_gauss_code(TREFOIL), MoveSpec("R1_delete", gap=0))

    def test_delete_wrong_sign(self):
        K = apply_move(parse_gauss_code(""), MoveSpec("R1_insert", gap=0))
        with pytest.raises(PatternNotFound):
            apply_move(K, MoveSpec("R1_delete", gap=0, sign=-1))

    def test_gap_out_of_range(self):
        K = parse_gauss_code("O1+ U1+")
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R1_insert", gap=3))
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R1_insert", gap=-1))
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R1_delete", gap=1))
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R1_insert"))


class TestR2:
    def test_insert_into_empty_same_gap(self):
        K = parse_gauss_code("")
        out = apply_move(
            K, MoveSpec("R2_insert", tails_gap=0, heads_gap=0)
        )
        assert serialize(out) == "O1+ O2- U1+ U2-"

    def test_insert_antiparallel(self):
        K = parse_gauss_code("")
        out = apply_move(
            K,
            MoveSpec(
                "R2_insert", tails_gap=0, heads_gap=0, variant="antiparallel"
            ),
        )
        assert serialize(out) == "O1+ O2- U2- U1+"

    def test_insert_split_gaps(self):
        K = parse_gauss_code("O1+ U1+")
        out = apply_move(
            K, MoveSpec("R2_insert", tails_gap=0, heads_gap=2, sign=-1)
        )
        # tails land at 0,1; heads after the old two positions
        assert serialize(out) == "O1- O2+ O3+ U3+ U1- U2+"

    def test_delete_undoes_insert(self):
        K = parse_gauss_code(TREFOIL)
        for a in (0, 2, 6):
            for b in (0, 3, 6):
                for variant in ("parallel", "antiparallel"):
                    spec = MoveSpec(
                        "R2_insert",
                        tails_gap=a,
                        heads_gap=b,
                        variant=variant,
                        sign=-1,
                    )
                    K2 = apply_move(K, spec)
                    back = apply_move(
                        K2,
                        MoveSpec(
                            "R2_delete",
                            tails_gap=a,
                            heads_gap=b,
                            variant=variant,
                            sign=-1,
                        ),
                    )
                    assert back == K, (a, b, variant)

    def test_delete_missing_pattern(self):
        with pytest.raises(PatternNotFound):
            apply_move(
                parse_gauss_code(TREFOIL),
                MoveSpec("R2_delete", tails_gap=0, heads_gap=0),
            )

    def test_delete_too_small(self):
        with pytest.raises(InvalidGap):
            apply_move(
                parse_gauss_code("O1+ U1+"),
                MoveSpec("R2_delete", tails_gap=0, heads_gap=0),
            )

    def test_insert_gap_out_of_range(self):
        K = parse_gauss_code("O1+ U1+")
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R2_insert", tails_gap=5, heads_gap=0))
        with pytest.raises(InvalidGap):
            apply_move(K, MoveSpec("R2_insert", tails_gap=0))


class TestMoveSpecValidation:
    def test_bad_kind(self):
        with pytest.raises(ValueError):
            MoveSpec("R3_insert", gap=0)

    def test_bad_orient(self):
        with pytest.raises(ValueError):
            MoveSpec("R1_insert", gap=0, orient="XY")

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            MoveSpec("R2_insert", tails_gap=0, heads_gap=0, variant="twisted")

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            MoveSpec("R1_insert", gap=0, sign=0)


def random_insert(n2: int, rng: random.Random) -> MoveSpec:
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


def as_delete(spec: MoveSpec) -> MoveSpec:
    if spec.kind == "R1_insert":
        return MoveSpec(
            "R1_delete", gap=spec.gap, orient=spec.orient, sign=spec.sign
        )
    return MoveSpec(
        "R2_delete",
        tails_gap=spec.tails_gap,
        heads_gap=spec.heads_gap,
        variant=spec.variant,
        sign=spec.sign,
    )


class TestOrbits:
    @pytest.mark.parametrize(
        "code,value", [(TREFOIL, 1), (FIGURE_EIGHT, -1)]
    )
    def test_v2_constant_along_insertions(self, code, value):
        v2 = v2_functional()
        rng = random.Random(2024)
        K = parse_gauss_code(code)
        assert evaluate(v2, K) == value
        for step in range(50):
            K = apply_move(K, random_insert(2 * K.n, rng))
            assert evaluate(v2, K) == value, f"step {step}"

    def test_v2_constant_on_virtual_orbit(self):
        # The move generators never check realizability, so invariance
        # must hold starting from arbitrary diagrams too.
        v2 = v2_functional()
        for seed in (1, 2, 3):
            rng = random.Random(seed)
            K = random_diagram(5, seed=seed)
            value = evaluate(v2, K)
            for _ in range(25):
                K = apply_move(K, random_insert(2 * K.n, rng))
                assert evaluate(v2, K) == value

    def test_lifo_unwind_returns_seed(self):
        rng = random.Random(7)
        K0 = parse_gauss_code(FIGURE_EIGHT)
        K = K0
        stack = []
        for _ in range(12):
            spec = random_insert(2 * K.n, rng)
            stack.append(spec)
            K = apply_move(K, spec)
        while stack:
            K = apply_move(K, as_delete(stack.pop()))
        assert K == K0


class TestRandomDiagram:
    def test_deterministic(self):
        a = random_diagram(8, seed=5)
        b = random_diagram(8, seed=5)
        assert a == b
        assert serialize(a) == serialize(b)

    def test_seed_sensitivity(self):
        assert random_diagram(8, seed=5) != random_diagram(8, seed=6)

    def test_n0(self):
        assert random_diagram(0, seed=1).n == 0

    def test_negative_n(self):
        with pytest.raises(ValueError):
            random_diagram(-1, seed=0)

    def test_valid_structure(self):
        for seed in range(10):
            K = random_diagram(6, seed=seed)
            assert K.n == 6  # constructor validates the matching
