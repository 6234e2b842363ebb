"""Symbolic universe, stochastic cell counting, search, and the driver."""

from fractions import Fraction

import pytest

from hashcount.counter import (
    CellEstimate,
    CounterParams,
    RoundStats,
    _boundary_search,
    _start_constraints,
    approx_count,
    bsat,
    build_universe,
    check_sat,
    core,
    decode_state,
    exact_cell_count,
    interpret,
    log_sat_search,
    _lower_median,
)
from hashcount.formula import (
    Cube,
    DnfFormula,
    Literal,
    exact_count,
    gen_random,
)
from hashcount.gf2 import BitVec, RandomSource
from hashcount.hashing import RexHash, extract, sample_base
from hashcount.gf2 import BitMat

from conftest import coverage_sum, example_formula


class TestBuildUniverse:
    def test_uniform_width_power_of_two(self):
        phi = DnfFormula.build(
            10,
            [[Literal(v, True) for v in (i, i + 1, i + 2)] for i in range(8)],
        )
        u = build_universe(phi)
        assert u.size == 8 * (1 << 7) and u.q == 10

    def test_example_offsets(self, phi_example):
        u = build_universe(phi_example)
        assert u.offsets == (0, 2, 6)
        assert u.size == 6 and u.q == 3 and u.w_min == 1

    def test_single_cube(self):
        phi = DnfFormula(9, (Cube((Literal(0, True), Literal(3, False))),))
        u = build_universe(phi)
        assert u.q == 7 and u.size == 1 << 7

    def test_rejects_trivial(self):
        with pytest.raises(ValueError):
            build_universe(DnfFormula(3, (Cube(()),)))
        with pytest.raises(ValueError):
            build_universe(DnfFormula(3, ()))


class TestInterpret:
    def test_examples(self, phi_example):
        u = build_universe(phi_example)
        x, i = interpret(u, phi_example, BitVec(3, 0))
        assert (list(x), i) == ([1, 0, 0], 0)
        x, i = interpret(u, phi_example, BitVec(3, 2))
        assert (list(x), i) == ([0, 0, 1], 1)
        assert interpret(u, phi_example, BitVec(3, 7)) is None

    def test_decode_state_matches_interpret(self, phi_example):
        u = build_universe(phi_example)
        for s in range(u.size):
            xi, i = decode_state(u, phi_example, s)
            x, i2 = interpret(u, phi_example, BitVec(u.q, s))
            assert (xi, i) == (int(x), i2)

    def test_bijection_and_witness(self):
        for seed in (0, 3, 9):
            phi = gen_random(11, 5, 2, 5, seed)
            u = build_universe(phi)
            assert u.q <= 14
            seen = set()
            for s in range(u.size):
                pair = interpret(u, phi, BitVec(u.q, s))
                assert pair is not None
                x, i = pair
                assert (int(x) & phi.cubes[i].mask) == phi.cubes[i].pattern
                assert (int(x), i) not in seen
                seen.add((int(x), i))
            assert len(seen) == u.size
            for s in range(u.size, 1 << u.q):
                assert interpret(u, phi, BitVec(u.q, s)) is None


class TestParams:
    def test_hi_thresh_epsilon_one(self):
        params = CounterParams.make(1, 0.2, 1)
        assert params.hi_thresh == Fraction("120.08")

    def test_hi_thresh_default_epsilon(self):
        params = CounterParams.make(0.8, 0.2, 1)
        assert params.hi_thresh == Fraction("145.91")

    def test_t_rounds(self):
        assert CounterParams.make(0.8, 0.2, 1).t == 67
        assert CounterParams.make(0.8, 0.5, 1).t == 44

    def test_threshold_trials_exact_ceiling(self):
        params = CounterParams.make(0.8, 0.2, 1)
        assert params.threshold_trials(100) == 14591
        assert params.threshold_trials(64) == 9339

    def test_validation(self):
        with pytest.raises(ValueError):
            CounterParams.make(0, 0.2, 1)
        with pytest.raises(ValueError):
            CounterParams.make(0.5, 0, 1)
        with pytest.raises(ValueError):
            CounterParams.make(0.5, 1, 1)

    def test_start_constraints_examples(self):
        hi = CounterParams.make(1, 0.2, 1).hi_thresh
        assert _start_constraints(10, 3, hi) == 0
        assert _start_constraints(30, 3, hi) == 20


class TestCheckSat:
    def test_full_coverage_returns_one(self, phi_example):
        x = BitVec.from_bits([1, 0, 1])  # satisfies both cubes
        src = RandomSource(1, 21)
        running = CellEstimate(0, 2, False)
        for _ in range(50):
            assert check_sat(phi_example, x, running, 1000, src) == 1

    def test_cap_stops_after_one_draw(self):
        # running one short of the cap: exactly one draw happens even when
        # the drawn cube misses (x covers only one of the two cubes)
        src = RandomSource(2, 22)
        threshold = CounterParams.make(0.8, 0.2, 1).threshold_trials(2)
        running = CellEstimate(threshold - 1, 2, False)
        phi_half = DnfFormula(
            3, (Cube((Literal(0, True),)), Cube((Literal(1, True),)))
        )
        x = BitVec.from_bits([1, 0, 0])
        draws = [check_sat(phi_half, x, running, 145.91, src) for _ in range(50)]
        assert draws == [1] * 50

    def test_uncapped_geometric(self, phi_example):
        src = RandomSource(3, 23)
        running = CellEstimate(10**9, 2, False)
        x = BitVec.from_bits([0, 0, 1])  # covers only the second cube
        draws = [check_sat(phi_example, x, running, None, src) for _ in range(200)]
        assert all(d >= 1 for d in draws)
        assert max(d for d in draws) > 1


class TestBsat:
    def test_trial_bound_and_saturation_semantics(self):
        phi = gen_random(12, 6, 2, 4, 5)
        universe = build_universe(phi)
        params = CounterParams.make(0.8, 0.2, 1)
        threshold = params.threshold_trials(phi.m)
        src = RandomSource(5, 24)
        base = sample_base(universe.q, 0, src)
        for p in range(0, universe.q):
            est = bsat(phi, universe, base, p, params.hi_thresh, RandomSource(p, 25))
            assert est.trials <= threshold
            if est.saturated:
                assert est.trials == threshold
                assert est.value >= params.hi_thresh
            assert est.states_visited <= 1 << (universe.q - p)

    def test_stats_recording(self):
        phi = gen_random(10, 4, 2, 4, 6)
        universe = build_universe(phi)
        stats = RoundStats()
        src = RandomSource(6, 26)
        base = sample_base(universe.q, 0, src)
        # p=0 covers the whole universe, so at least one valid state is hit
        bsat(phi, universe, base, 0, 145.91, src, stats)
        bsat(phi, universe, base, universe.q - 1, 145.91, src, stats)
        assert stats.probes == 2
        assert stats.trials >= 1
        assert stats.max_bsat_trials <= stats.trials
        assert stats.states_visited >= 1

    def test_precondition(self):
        phi = gen_random(10, 4, 2, 4, 7)
        universe = build_universe(phi)
        src = RandomSource(7, 27)
        base = sample_base(universe.q, 2, src)
        with pytest.raises(ValueError):
            bsat(phi, universe, base, 1, 145.91, src)
        with pytest.raises(ValueError):
            bsat(phi, universe, base, universe.q, 145.91, src)


class TestExactCellCount:
    def test_p_zero_whole_universe(self, phi_example):
        u = build_universe(phi_example)
        rex = RexHash(
            u.q, 0, BitMat.zeros(0, u.q), BitVec.zeros(0), BitVec.zeros(0)
        )
        canonical, cov_sum = exact_cell_count(phi_example, u, rex)
        assert canonical == 5
        assert cov_sum == Fraction(5)

    def test_single_cube_counts_states(self):
        phi = DnfFormula(8, (Cube((Literal(1, True), Literal(4, False))),))
        u = build_universe(phi)
        src = RandomSource(1, 28)
        base = sample_base(u.q, 0, src)
        h = extract(base, 2)
        canonical, cov_sum = exact_cell_count(phi, u, h)
        assert canonical == cov_sum
        assert canonical == h.solution_count  # every state valid, cov = {0}

    def test_cell_decomposition(self):
        for seed in (0, 4):
            phi = gen_random(9, 4, 2, 4, seed)
            u = build_universe(phi)
            if u.q > 10:
                continue
            want = exact_count(phi)
            for p in (1, 2, 3):
                src = RandomSource(seed, 29 + p)
                base = sample_base(u.q, 0, src)
                h = extract(base, p)
                total = 0
                for ycell in range(1 << p):
                    hy = RexHash(h.q, h.p, h.d, h.b, BitVec(p, ycell))
                    canonical, _ = exact_cell_count(phi, u, hy)
                    total += canonical
                assert total == want

    def test_coverage_identity(self):
        for seed in (1, 6):
            phi = gen_random(10, 5, 2, 5, seed)
            u = build_universe(phi)
            assert coverage_sum(phi, u) == exact_count(phi)


class TestBoundarySearch:
    def test_finds_first_small(self):
        for boundary in range(11):
            probes = []

            def probe(p, b=boundary):
                probes.append(p)
                return p < b  # big below the boundary

            got = _boundary_search(probe, 0, 9)
            want = boundary if boundary <= 9 else None
            assert got == want
            assert len(probes) <= 1 + 5

    def test_all_big_returns_none(self):
        assert _boundary_search(lambda p: True, 0, 9) is None

    def test_first_probe_small_returns_low(self):
        probes = []

        def probe(p):
            probes.append(p)
            return False

        assert _boundary_search(probe, 3, 9) == 3
        assert probes == [3]

    def test_low_above_hi_rejected(self):
        with pytest.raises(ValueError):
            _boundary_search(lambda p: True, 5, 4)


class TestLogSatSearch:
    def test_small_formula_returns_low(self):
        phi = example_formula()
        u = build_universe(phi)
        src = RandomSource(1, 30)
        base = sample_base(u.q, 0, src)
        p = log_sat_search(phi, u, base, 145.91, 0, u.q - 1, src)
        assert p == 0

    def test_sentinel_when_everything_saturates(self):
        # a uniform-width power-of-two formula fills all 2^q states, and a
        # threshold of 1 trial saturates every nonempty cell at every level
        phi = DnfFormula.build(
            8, [[Literal(v, True) for v in (i, i + 1)] for i in range(4)]
        )
        u = build_universe(phi)
        assert u.size == 1 << u.q
        src = RandomSource(2, 31)
        base = sample_base(u.q, 0, src)
        p = log_sat_search(phi, u, base, Fraction(1, phi.m), 0, u.q - 1, src)
        assert p is None

    def test_probe_count_bounded(self):
        phi = gen_random(14, 8, 3, 5, 11)
        u = build_universe(phi)
        stats = RoundStats()
        src = RandomSource(11, 32)
        base = sample_base(u.q, 0, src)
        log_sat_search(phi, u, base, 145.91, 0, u.q - 1, src, stats)
        assert stats.probes <= 1 + (u.q - 1).bit_length() + 1


class TestCore:
    def test_short_circuit_exact(self, phi_example):
        params = CounterParams.make(0.8, 0.2, 1)
        out = core(phi_example, params, RandomSource(1, 33))
        assert out.ok
        assert out.cell_count == 1 and out.p == 0
        assert out.sol_count == 5
        assert out.trials == 0 and out.probes == 0

    def test_normal_path(self):
        phi = gen_random(16, 8, 2, 5, 2)
        params = CounterParams.make(0.8, 0.2, 1)
        out = core(phi, params, RandomSource(9, 34))
        assert out.ok and out.p >= 0
        assert out.probes >= 1
        assert out.max_bsat_trials <= params.threshold_trials(phi.m)


class TestApproxCount:
    def test_tautology_zero_rounds(self):
        phi = DnfFormula(12, (Cube(()),))
        est = approx_count(phi, 0.8, 0.2, 1)
        assert est.value == 4096
        assert est.rounds_used == 0 and est.trials == 0

    def test_false_formula(self):
        phi = DnfFormula.build(3, [[Literal(0, True), Literal(0, False)]])
        est = approx_count(phi, 0.8, 0.2, 1)
        assert est.value == 0

    def test_short_circuit_value_is_exact(self, phi_example):
        est = approx_count(phi_example, 0.8, 0.2, 5)
        assert est.value == 5
        assert est.failed_rounds == 0
        assert est.rounds_used == 67

    def test_deterministic(self):
        phi = gen_random(14, 7, 2, 5, 8)
        a = approx_count(phi, 0.8, 0.2, 3)
        b = approx_count(phi, 0.8, 0.2, 3)
        assert a == b

    def test_seed_changes_estimate_stream(self):
        phi = gen_random(14, 7, 2, 5, 8)
        a = approx_count(phi, 0.8, 0.2, 3)
        b = approx_count(phi, 0.8, 0.2, 4)
        assert a.rounds != b.rounds

    def test_thread_invariance(self):
        phi = gen_random(15, 7, 2, 5, 9)
        one = approx_count(phi, 0.8, 0.2, 7, threads=1)
        four = approx_count(phi, 0.8, 0.2, 7, threads=4)
        assert one == four

    def test_impl_invariance(self):
        phi = gen_random(13, 6, 2, 5, 10)
        py = approx_count(phi, 0.8, 0.2, 11, impl="python")
        auto = approx_count(phi, 0.8, 0.2, 11)
        assert py == auto

    def test_reports_threshold(self):
        phi = gen_random(13, 6, 2, 5, 12)
        est = approx_count(phi, 0.8, 0.2, 13)
        want = CounterParams.make(0.8, 0.2, 1).threshold_trials(phi.m)
        assert est.threshold_trials == want
        assert est.max_bsat_trials <= est.threshold_trials

    def test_accuracy_on_one_instance(self):
        phi = gen_random(16, 8, 2, 5, 1)
        want = exact_count(phi)
        est = approx_count(phi, 0.8, 0.2, 42)
        assert want / Fraction(9, 5) <= est.value <= want * Fraction(9, 5)


class TestLowerMedian:
    def test_odd(self):
        vals = [Fraction(5), Fraction(1), Fraction(9)]
        assert _lower_median(vals) == 5

    def test_even_takes_lower(self):
        vals = [Fraction(4), Fraction(1), Fraction(9), Fraction(6)]
        assert _lower_median(vals) == 4

    def test_permutation_invariant(self):
        import itertools

        vals = [Fraction(3), Fraction(7), Fraction(2), Fraction(5)]
        medians = {
            _lower_median(list(p)) for p in itertools.permutations(vals)
        }
        assert medians == {Fraction(3)}
