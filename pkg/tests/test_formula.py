"""Formula model, parsing, generation, and the brute-force counting oracle."""

import pytest

from hashcount.formula import (
    BRUTE_FORCE_LIMIT,
    BruteForceLimitError,
    Cube,
    DnfFormula,
    DnfParseError,
    Literal,
    coverage,
    cube_satisfies,
    exact_count,
    gen_random,
    parse_dnf,
    satisfies,
    serialize_dnf,
)
from hashcount.gf2 import BitVec

from conftest import bruteforce_models, example_formula


class TestModel:
    def test_cube_normalization_sorted_distinct(self):
        with pytest.raises(ValueError):
            Cube((Literal(2, True), Literal(1, False)))
        with pytest.raises(ValueError):
            Cube((Literal(1, True), Literal(1, False)))

    def test_cube_mask_pattern(self):
        c = Cube((Literal(0, True), Literal(2, False)))
        assert c.mask == 0b101 and c.pattern == 0b001 and c.width == 2

    def test_build_drops_contradictions_and_merges(self):
        phi = DnfFormula.build(
            2,
            [
                [Literal(0, True), Literal(0, False)],   # contradictory
                [Literal(1, True), Literal(1, True)],    # duplicate literal
            ],
        )
        assert phi.m == 1
        assert phi.cubes[0] == Cube((Literal(1, True),))

    def test_all_contradictory_is_false(self):
        phi = DnfFormula.build(2, [[Literal(0, True), Literal(0, False)]])
        assert phi.is_false and phi.m == 0 and exact_count(phi) == 0

    def test_variable_bound_checked(self):
        with pytest.raises(ValueError):
            DnfFormula(2, (Cube((Literal(5, True),)),))


class TestSatisfaction:
    def test_cube_satisfies_examples(self, phi_example):
        c = phi_example.cubes[0]
        assert cube_satisfies(BitVec.from_bits([1, 0, 1]), c)
        assert not cube_satisfies(BitVec.from_bits([0, 0, 1]), c)
        assert cube_satisfies(BitVec(3, 0), Cube(()))

    def test_coverage_examples(self, phi_example):
        assert coverage(phi_example, BitVec.from_bits([1, 0, 1])) == {0, 1}
        assert coverage(phi_example, BitVec.from_bits([1, 0, 0])) == {0}
        assert coverage(phi_example, BitVec.from_bits([0, 0, 0])) == set()

    def test_satisfies_iff_nonempty_coverage(self, phi_example):
        for xi in range(8):
            x = BitVec(3, xi)
            assert satisfies(phi_example, x) == bool(coverage(phi_example, x))


class TestExactCount:
    def test_three_variable_example(self, phi_example):
        assert exact_count(phi_example) == 5

    def test_single_cube(self):
        phi = DnfFormula(10, (Cube((Literal(2, True), Literal(5, False))),))
        assert exact_count(phi) == 1 << 8

    def test_tautology(self):
        phi = DnfFormula(12, (Cube(()),))
        assert exact_count(phi) == 1 << 12

    def test_limit_refusal(self):
        phi = DnfFormula(BRUTE_FORCE_LIMIT + 1, (Cube((Literal(0, True),)),))
        with pytest.raises(BruteForceLimitError):
            exact_count(phi)
        assert exact_count(phi, limit=BRUTE_FORCE_LIMIT + 1) == 1 << BRUTE_FORCE_LIMIT

    def test_matches_reference_enumeration(self):
        for seed in range(5):
            phi = gen_random(10, 5, 2, 4, seed)
            assert exact_count(phi) == len(bruteforce_models(phi))


class TestParse:
    def test_basic(self):
        phi = parse_dnf("p dnf 3 2\n1 -2 0\n3 0\n")
        assert phi == example_formula()

    def test_contradictory_cube_dropped(self):
        phi = parse_dnf("p dnf 2 1\n1 -1 0\n")
        assert phi.is_false and exact_count(phi) == 0

    def test_width_zero_tautology(self):
        phi = parse_dnf("p dnf 2 1\n0\n")
        assert phi.is_tautology and exact_count(phi) == 4

    def test_comments_and_blank_lines(self):
        phi = parse_dnf("c a comment\np dnf 3 2\nc another\n1 -2 0\n\n3 0\n")
        assert phi == example_formula()

    def test_duplicate_literal_merged(self):
        phi = parse_dnf("p dnf 3 1\n2 2 0\n")
        assert phi.cubes[0] == Cube((Literal(1, True),))

    @pytest.mark.parametrize(
        "text,line,needle",
        [
            ("", 1, "header"),
            ("p cnf 3 1\n1 0\n", 1, "header"),
            ("p dnf 0 1\n0\n", 1, "at least 1"),
            ("p dnf 3 0\n", 1, "at least 1"),
            ("p dnf 3 1\n4 0\n", 2, "outside"),
            ("p dnf 3 1\n1 x 0\n", 2, "integer"),
            ("p dnf 3 1\n1 2\n", 2, "end with 0"),
            ("p dnf 3 1\n1 0\n2 0\n", 3, "more than"),
            ("p dnf 3 2\n1 0\n", 2, "expected 2"),
            ("p dnf 3 1\n1 0 2 0\n", 2, "before the end"),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line, needle):
        with pytest.raises(DnfParseError) as exc:
            parse_dnf(text)
        assert exc.value.line == line
        assert needle in str(exc.value)


class TestSerialize:
    def test_round_trip_example(self, phi_example):
        assert parse_dnf(serialize_dnf(phi_example)) == phi_example

    def test_tautology_bare_zero_line(self):
        phi = DnfFormula(2, (Cube(()),))
        assert serialize_dnf(phi) == "p dnf 2 1\n0\n"

    def test_false_marker(self):
        phi = DnfFormula.build(2, [[Literal(0, True), Literal(0, False)]])
        text = serialize_dnf(phi)
        assert text == "p dnf 2 1\n1 -1 0\n"
        assert parse_dnf(text).is_false

    def test_round_trip_generated(self):
        for seed in (1, 7, 30):
            phi = gen_random(14, 6, 2, 6, seed)
            assert parse_dnf(serialize_dnf(phi)) == phi

    def test_deterministic_bytes(self):
        a = serialize_dnf(gen_random(10, 4, 3, 3, 7))
        b = serialize_dnf(gen_random(10, 4, 3, 3, 7))
        assert a == b and a.endswith("\n") and "\r" not in a


class TestGenRandom:
    def test_deterministic(self):
        assert gen_random(10, 4, 3, 3, 7) == gen_random(10, 4, 3, 3, 7)

    def test_seeds_differ(self):
        assert gen_random(10, 4, 3, 3, 7) != gen_random(10, 4, 3, 3, 8)

    def test_widths_in_range(self):
        phi = gen_random(16, 20, 2, 5, 3)
        assert phi.m == 20
        assert all(2 <= c.width <= 5 for c in phi.cubes)

    def test_full_width_cubes_single_model(self):
        for seed in range(4):
            phi = gen_random(5, 3, 5, 5, seed)
            assert all(c.width == 5 for c in phi.cubes)
            assert 1 <= exact_count(phi) <= 3

    def test_count_bounds(self):
        for seed in (2, 9):
            phi = gen_random(16, 8, 2, 5, seed)
            assert (1 << 11) <= exact_count(phi) <= (1 << 16)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            gen_random(5, 2, 0, 3, 1)
        with pytest.raises(ValueError):
            gen_random(5, 2, 4, 3, 1)
        with pytest.raises(ValueError):
            gen_random(5, 2, 2, 6, 1)
        with pytest.raises(ValueError):
            gen_random(5, 0, 2, 3, 1)
