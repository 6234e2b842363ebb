"""Monte Carlo and elimination-based cross-validation counters."""

import math
from fractions import Fraction

import pytest

from hashcount.baselines import (
    MonteCarloEstimate,
    approxmc2_dnf_count,
    ge_bsat,
    klm_count,
)
from hashcount.formula import Cube, DnfFormula, Literal, exact_count, gen_random
from hashcount.gf2 import BitMat, BitVec, RandomSource
from hashcount.hashing import XorHash

from conftest import bruteforce_models, bruteforce_system_solutions, mat


class TestKlm:
    def test_sample_budget(self, phi_example):
        mc = klm_count(phi_example, 0.8, 0.2, 1)
        assert mc.samples == 52
        assert mc.samples == math.ceil(8 * 1.8 * math.log(10) / 0.64)

    def test_single_cube_is_exact(self):
        # one cube: every draw hits it, so value collapses to the cube size
        phi = DnfFormula(10, (Cube((Literal(2, True), Literal(7, False))),))
        mc = klm_count(phi, 0.8, 0.2, 3)
        assert mc.value == 1 << 8
        assert mc.trial_sum == mc.samples

    def test_trivial_formulas(self):
        taut = DnfFormula(6, (Cube(()),))
        assert klm_count(taut, 0.8, 0.2, 1) == MonteCarloEstimate(0, 0, Fraction(64))
        false = DnfFormula.build(2, [[Literal(0, True), Literal(0, False)]])
        assert klm_count(false, 0.8, 0.2, 1).value == 0

    def test_deterministic(self, phi_example):
        runs = {klm_count(phi_example, 0.5, 0.3, 9) for _ in range(3)}
        assert len(runs) == 1

    def test_seed_sensitivity(self, phi_example):
        a = klm_count(phi_example, 0.1, 0.2, 1)
        b = klm_count(phi_example, 0.1, 0.2, 2)
        assert a.trial_sum != b.trial_sum

    def test_unbiased_grand_mean(self, phi_example):
        # per-sample estimate 3c has mean 5 and variance 14 for this formula;
        # a tight epsilon forces enough samples for a 3-sigma check
        mc = klm_count(phi_example, 0.01, 0.2, 7)
        assert mc.samples >= 10**5
        sigma = math.sqrt(14 / mc.samples)
        assert abs(float(mc.value) - 5.0) <= 3 * sigma

    def test_validation(self, phi_example):
        with pytest.raises(ValueError):
            klm_count(phi_example, 0, 0.2, 1)
        with pytest.raises(ValueError):
            klm_count(phi_example, 0.5, 1.0, 1)


class TestGeBsat:
    def test_empty_system_counts_models(self, phi_example):
        h = XorHash(BitMat.zeros(0, 3), BitVec.zeros(0))
        assert ge_bsat(phi_example, h, 300) == 5

    def test_cap_applies(self, phi_example):
        h = XorHash(BitMat.zeros(0, 3), BitVec.zeros(0))
        assert ge_bsat(phi_example, h, 3.2) == 4
        assert ge_bsat(phi_example, h, 2) == 2

    def test_inconsistent_system_is_empty(self, phi_example):
        h = XorHash(mat([0b000], 3), BitVec.from_bits([1]))
        assert ge_bsat(phi_example, h, 300) == 0

    def test_single_constraint_hand_case(self, phi_example):
        # models as ints: {1, 4, 5, 6, 7}; constraint bit0 xor bit2 = 0
        # keeps only 5 (101) and 7 (111)
        h = XorHash(mat([0b101], 3), BitVec.from_bits([0]))
        assert ge_bsat(phi_example, h, 300) == 2

    def test_matches_bruteforce(self):
        phi = gen_random(8, 4, 2, 4, 13)
        models = bruteforce_models(phi)
        src = RandomSource(13, 40)
        for trial in range(50):
            p = trial % 8
            a = BitMat.from_rows([src.rand_bits(8) for _ in range(p)], 8)
            b = src.rand_bits(p)
            y = src.rand_bits(p)
            want = len(models & bruteforce_system_solutions(a, b, y))
            assert ge_bsat(phi, XorHash(a, b), 300, y) == want

    def test_cube_order_independent(self):
        phi = gen_random(8, 5, 2, 4, 17)
        flipped = DnfFormula(phi.n, tuple(reversed(phi.cubes)))
        src = RandomSource(17, 41)
        a = BitMat.from_rows([src.rand_bits(8) for _ in range(3)], 8)
        h = XorHash(a, src.rand_bits(3))
        y = src.rand_bits(3)
        for hi in (1, 2, 5, 300):
            assert ge_bsat(phi, h, hi, y) == ge_bsat(flipped, h, hi, y)

    def test_validation(self, phi_example):
        good = XorHash(BitMat.zeros(0, 3), BitVec.zeros(0))
        with pytest.raises(ValueError):
            ge_bsat(phi_example, XorHash(BitMat.zeros(0, 4), BitVec.zeros(0)), 300)
        with pytest.raises(ValueError):
            ge_bsat(phi_example, good, 300, BitVec.zeros(1))
        with pytest.raises(ValueError):
            ge_bsat(phi_example, good, 0)


class TestApproxMc2:
    def test_tautology(self):
        phi = DnfFormula(12, (Cube(()),))
        est = approxmc2_dnf_count(phi, 0.8, 0.2, 1)
        assert est.value == 4096 and est.rounds_used == 0

    def test_false(self):
        phi = DnfFormula.build(4, [[Literal(1, True), Literal(1, False)]])
        assert approxmc2_dnf_count(phi, 0.8, 0.2, 1).value == 0

    def test_deterministic_and_thread_invariant(self):
        phi = gen_random(12, 5, 2, 4, 19)
        one = approxmc2_dnf_count(phi, 0.8, 0.2, 5)
        again = approxmc2_dnf_count(phi, 0.8, 0.2, 5)
        four = approxmc2_dnf_count(phi, 0.8, 0.2, 5, threads=4)
        assert one == again == four

    def test_accuracy_on_one_instance(self):
        phi = gen_random(12, 6, 2, 5, 23)
        want = exact_count(phi)
        est = approxmc2_dnf_count(phi, 0.8, 0.2, 31)
        assert want / Fraction(9, 5) <= est.value <= want * Fraction(9, 5)

    def test_round_values_are_count_times_cells(self):
        phi = gen_random(10, 4, 2, 4, 29)
        est = approxmc2_dnf_count(phi, 0.8, 0.2, 37)
        hi_half = Fraction("145.91") / 2
        for cells, count in est.rounds:
            assert cells & (cells - 1) == 0  # power of two
            assert count <= math.ceil(hi_half)
