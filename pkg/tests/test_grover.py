import math

import numpy as np
import pytest

from grovent import (
    BoundNotApplicable,
    DegenerateSearch,
    MarkedSet,
    PureState,
    SystemMismatch,
    apply_diffusion,
    apply_oracle,
    grover_state,
    iterate_grover,
    k_opt,
    observation_decompose,
    rank_bound,
    regime,
)
from grovent.grover import round_half_away

from conftest import marked, qubits, system


class TestMarkedSet:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            MarkedSet(qubits(2), frozenset())

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            MarkedSet(qubits(2), frozenset({4}))

    def test_of_accepts_digit_tuples(self):
        m = marked(qubits(3), [(1, 1, 1), 0])
        assert m.indices == (0, 7)


class TestOracle:
    def test_signs_marked_element(self):
        sys_ = qubits(3)
        st = apply_oracle(PureState.uniform(sys_), marked(sys_, [0]))
        assert st.amps[0] == pytest.approx(-1 / math.sqrt(8))
        assert np.all(st.amps[1:] == 1 / math.sqrt(8))

    def test_all_marked_is_global_sign(self):
        sys_ = qubits(2)
        m = marked(sys_, range(4))
        st = PureState.uniform(sys_)
        assert np.array_equal(apply_oracle(st, m).amps, -st.amps)

    def test_involution_bit_exact(self, rng):
        sys_ = qubits(4)
        m = marked(sys_, [1, 5, 9])
        amps = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        st = PureState.normalized(sys_, amps)
        assert np.array_equal(apply_oracle(apply_oracle(st, m), m).amps, st.amps)

    def test_system_mismatch(self):
        with pytest.raises(SystemMismatch):
            apply_oracle(PureState.uniform(qubits(2)), marked(qubits(3), [0]))


class TestDiffusion:
    def test_uniform_fixed_point(self):
        st = PureState.uniform(qubits(3))
        assert np.allclose(apply_diffusion(st).amps, st.amps, atol=1e-15)

    def test_basis_state(self):
        st = PureState.from_kets(qubits(3), [(0, 0, 0)])
        out = apply_diffusion(st)
        assert out.amps[0] == pytest.approx(-0.75)
        assert np.allclose(out.amps[1:], 0.25)

    def test_involution(self, rng):
        sys_ = qubits(4)
        amps = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        st = PureState.normalized(sys_, amps)
        twice = apply_diffusion(apply_diffusion(st))
        assert np.max(np.abs(twice.amps - st.amps)) < 1e-14


class TestClosedForm:
    def test_k0_is_uniform(self):
        m = marked(qubits(4), [3])
        st, run = grover_state(m, 0)
        assert np.allclose(st.amps, PureState.uniform(qubits(4)).amps)
        assert run.alpha_k == pytest.approx(0.0, abs=1e-15)
        assert run.beta_k == pytest.approx(1.0)

    def test_two_qubits_one_iteration_certain(self):
        m = marked(qubits(2), [2])
        st, run = grover_state(m, 1)
        assert run.a_k == pytest.approx(1.0)
        assert abs(st.amps[2]) == pytest.approx(1.0)

    def test_run_invariants(self):
        m = marked(qubits(5), [1, 7])
        for k in (0, 1, 3, 8):
            st, run = grover_state(m, k)
            assert run.a_k**2 + run.b_k**2 == pytest.approx(1.0, abs=1e-12)
            assert math.sin(run.theta) == pytest.approx(math.sqrt(2 / 32), abs=1e-12)
            assert np.linalg.norm(st.amps) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_search(self):
        with pytest.raises(DegenerateSearch):
            grover_state(marked(qubits(1), [0, 1]), 1)

    @pytest.mark.parametrize("n,s", [(3, 1), (5, 2), (7, 4), (8, 1)])
    def test_matches_gate_level(self, n, s):
        m = marked(qubits(n), list(range(s)))
        ko = k_opt(m)
        state = PureState.uniform(qubits(n))
        for k in range(2 * ko + 1):
            closed, _ = grover_state(m, k)
            assert np.max(np.abs(state.amps - closed.amps)) < 1e-10
            state = apply_diffusion(apply_oracle(state, m))

    def test_iterate_grover_helper(self):
        m = marked(qubits(6), [5])
        closed, _ = grover_state(m, 4)
        assert np.max(np.abs(iterate_grover(m, 4).amps - closed.amps)) < 1e-10

    @pytest.mark.parametrize("dims,s", [((2, 3, 3), 1), ((3, 3, 3, 3), 2), ((2, 2, 3, 5), 3)])
    def test_matches_gate_level_on_mixed_qudits(self, dims, s):
        # the oracle/diffusion definitions carry over verbatim to qudits
        m = marked(system(*dims), list(range(s)))
        ko = k_opt(m)
        state = PureState.uniform(m.system)
        for k in range(2 * ko + 1):
            closed, _ = grover_state(m, k)
            assert np.max(np.abs(state.amps - closed.amps)) < 1e-10
            state = apply_diffusion(apply_oracle(state, m))


class TestKOpt:
    def test_n12_single(self):
        assert k_opt(marked(qubits(12), [0])) == 50

    def test_n13_pair(self):
        assert k_opt(marked(qubits(13), [0, 1])) == 50

    def test_critical_edge(self):
        m = marked(qubits(2), [0])
        assert k_opt(m) == 2
        assert regime(m) == "critical"

    def test_round_half_away_from_zero(self):
        assert round_half_away(0.5) == 1
        assert round_half_away(1.5) == 2
        assert round_half_away(2.5) == 3
        assert round_half_away(-0.5) == -1
        assert round_half_away(2.4) == 2

    def test_probability_near_optimal_for_small_fractions(self):
        # argmax of |a_k|^2 sits within one step of k_opt and the k_opt
        # probability stays near 1 whenever |S|/N <= 1/64
        for n in (6, 8, 10, 12):
            for s in (1, 2, 4):
                if s / 2**n > 1 / 64:
                    continue
                m = marked(qubits(n), list(range(s)))
                ko = k_opt(m)
                probs = [grover_state(m, k)[1].a_k ** 2 for k in range(2 * ko + 1)]
                assert abs(probs.index(max(probs)) - ko) <= 1
                assert probs[ko] > 0.98


class TestObservationDecompose:
    def test_k0(self):
        _, run = grover_state(marked(qubits(4), [2]), 0)
        a, b, res = observation_decompose(run)
        assert a == pytest.approx(0.0, abs=1e-15)
        assert b == pytest.approx(1.0)
        assert res <= 1e-12

    def test_critical_lands_on_marked_sum(self):
        sys_ = qubits(3)
        m = marked(sys_, [(0, 0, 0), (1, 1, 1)])
        assert regime(m) == "critical"
        st, run = grover_state(m, 1)
        _, beta, res = observation_decompose(run)
        assert abs(beta) <= 1e-12
        target = PureState.from_kets(sys_, [(0, 0, 0), (1, 1, 1)])
        assert np.max(np.abs(st.amps - target.amps)) <= 1e-12

    def test_midway_run(self):
        _, run = grover_state(marked(qubits(12), [0]), 25)
        a, b, res = observation_decompose(run)
        assert res <= 1e-12
        assert abs(a) > 1e-3 and abs(b) > 1e-3

    def test_residual_small_across_runs(self):
        for n in (3, 6, 9):
            m = marked(qubits(n), [0, 2**n - 1])
            for k in range(2 * k_opt(m) + 1):
                _, run = grover_state(m, k)
                assert observation_decompose(run)[2] <= 1e-12


class TestRankBound:
    @pytest.mark.parametrize("s,expected", [(1, (2, 2)), (2, (2, 3)), (4, (2, 5))])
    def test_bracket(self, s, expected):
        m = marked(qubits(10), list(range(s)))
        assert rank_bound(m, k_opt(m) // 2) == expected

    def test_outside_range(self):
        m = marked(qubits(10), [0])
        with pytest.raises(BoundNotApplicable):
            rank_bound(m, 0)
        with pytest.raises(BoundNotApplicable):
            rank_bound(m, k_opt(m))

    def test_not_standard_regime(self):
        m = marked(qubits(2), [0])
        with pytest.raises(BoundNotApplicable):
            rank_bound(m, 1)


class TestRegime:
    def test_examples(self):
        assert regime(marked(qubits(3), [0, 1])) == "critical"
        assert regime(marked(system(2, 2, 3), [0, 1])) == "standard"
        assert regime(marked(qubits(3), [0, 1, 2])) == "exceptional"
