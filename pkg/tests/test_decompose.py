import io

import numpy as np
import pytest

from lrn.cells import Projections, Trajectory, forward_sequence, init_params
from lrn.decompose import (
    DecompositionError,
    attention_weights,
    expand_hidden,
    memory_trace,
    trace_rows,
    weight_chain,
    write_trace_csv,
)
from lrn.tensor import Rng


def make_identity_traj(d=8, n=32, seed=21, kind="lrn"):
    rng = Rng(seed)
    params = init_params(kind, d, d, rng, activation="identity")
    X = rng.uniform(-1.0, 1.0, (n, d))
    return forward_sequence(params, X)


def handmade_traj(I, F, V, activation="identity"):
    """Trajectory with prescribed gates/values; H built by the recurrence."""
    I, F, V = (np.asarray(a, dtype=np.float64) for a in (I, F, V))
    n, d = I.shape
    H = np.zeros((n, d))
    h = np.zeros(d)
    for t in range(n):
        h = I[t] * V[t] + F[t] * h
        H[t] = h
    return Trajectory("lrn", activation, np.zeros(d), np.zeros((n, d)),
                      Projections(n=n, Q=np.zeros((n, d)), K=np.zeros((n, d)), V=V),
                      H, I, F, H.copy())


class TestExpandHidden:
    def test_base_case_first_step(self):
        traj = make_identity_traj(n=4)
        assert np.array_equal(expand_hidden(traj, 0), traj.I[0] * traj.proj.V[0])

    def test_hand_computed_two_steps(self):
        # d=1: i=(0.5, 0.5), f=(any, 0.5), v=(1, 1) -> h_2 = 0.25 + 0.5 = 0.75
        traj = handmade_traj(I=[[0.5], [0.5]], F=[[0.9], [0.5]], V=[[1.0], [1.0]])
        assert expand_hidden(traj, 1)[0] == pytest.approx(0.75, abs=1e-15)
        assert traj.H[1][0] == pytest.approx(0.75, abs=1e-15)

    def test_matches_recurrence_at_acceptance_shape(self):
        traj = make_identity_traj(d=8, n=32, seed=21)
        worst = max(float(np.max(np.abs(expand_hidden(traj, t) - traj.H[t])))
                    for t in range(traj.n))
        assert worst <= 1e-9

    @pytest.mark.parametrize("kind", ["glrn", "elrn"])
    def test_other_gated_kinds_expand_too(self, kind):
        traj = make_identity_traj(d=6, n=20, seed=4, kind=kind)
        for t in (0, 7, 19):
            assert np.allclose(expand_hidden(traj, t), traj.H[t], atol=1e-10)

    def test_rejects_tanh_trajectory(self):
        rng = Rng(2)
        params = init_params("lrn", 4, 4, rng, activation="tanh")
        traj = forward_sequence(params, rng.uniform(-1, 1, (5, 4)))
        with pytest.raises(DecompositionError, match="identity"):
            expand_hidden(traj, 2)

    def test_rejects_nonzero_initial_state(self):
        rng = Rng(3)
        params = init_params("lrn", 4, 4, rng, activation="identity")
        traj = forward_sequence(params, rng.uniform(-1, 1, (5, 4)),
                                h0=np.full(4, 0.1))
        with pytest.raises(DecompositionError, match="initial state"):
            expand_hidden(traj, 2)

    def test_rejects_ungated_and_output_gated_kinds(self):
        rng = Rng(4)
        for kind, act in (("elman", "identity"), ("olrn", "identity")):
            params = init_params(kind, 4, 4, rng, activation=act)
            traj = forward_sequence(params, rng.uniform(-1, 1, (5, 4)))
            with pytest.raises(DecompositionError):
                expand_hidden(traj, 2)

    def test_step_out_of_range(self):
        traj = make_identity_traj(n=4)
        with pytest.raises(IndexError):
            expand_hidden(traj, 4)


class TestAttentionWeights:
    def test_source_equals_eval_gives_input_gate(self):
        traj = make_identity_traj(n=6)
        chains = attention_weights(traj, 5)
        assert np.array_equal(chains[-1].w, traj.I[5])
        assert np.array_equal(chains[-1].query, np.ones(traj.d))

    def test_forced_unit_forget_gives_pure_keys(self):
        traj = handmade_traj(I=[[0.3, 0.6]] * 4, F=[[1.0, 1.0]] * 4,
                             V=[[1.0, 1.0]] * 4)
        for chain in attention_weights(traj, 3):
            assert np.array_equal(chain.w, traj.I[chain.k])

    def test_reconstruction_is_exact(self):
        traj = make_identity_traj(d=5, n=24, seed=8)
        for t in (0, 11, 23):
            total = np.zeros(traj.d)
            for chain in attention_weights(traj, t):
                total += chain.w * traj.proj.V[chain.k]
            assert np.array_equal(total, expand_hidden(traj, t))

    def test_weights_strictly_inside_unit_interval(self):
        traj = make_identity_traj(d=6, n=30, seed=9)
        for chain in attention_weights(traj, 29):
            assert np.all((chain.w > 0.0) & (chain.w < 1.0))

    def test_key_query_split(self):
        traj = make_identity_traj(d=4, n=10, seed=10)
        for chain in attention_weights(traj, 9):
            assert np.array_equal(chain.w, chain.key * chain.query)
            assert np.array_equal(chain.key, traj.I[chain.k])


class TestWeightChain:
    def test_lazy_single_chain_matches_dense(self):
        traj = make_identity_traj(d=4, n=12, seed=12)
        chains = attention_weights(traj, 9)
        for k in (0, 4, 9):
            single = weight_chain(traj, 9, k)
            assert np.allclose(single.w, chains[k].w, atol=1e-15)

    def test_chain_shrinks_as_evaluation_recedes(self):
        traj = make_identity_traj(d=4, n=16, seed=13)
        k = 3
        prev = weight_chain(traj, k, k).w
        for t in range(k + 1, 16):
            cur = weight_chain(traj, t, k).w
            assert np.all(cur < prev)
            prev = cur

    def test_any_activation_allowed(self):
        rng = Rng(14)
        params = init_params("lrn", 4, 4, rng, activation="tanh")
        traj = forward_sequence(params, rng.uniform(-1, 1, (6, 4)))
        chain = weight_chain(traj, 4, 1)
        assert np.all((chain.w > 0) & (chain.w < 1))

    def test_index_validation(self):
        traj = make_identity_traj(n=5)
        with pytest.raises(IndexError):
            weight_chain(traj, 2, 3)


class TestMemoryTrace:
    def test_value_at_source_is_mean_input_gate(self):
        traj = make_identity_traj(n=8)
        curve = memory_trace(traj, 3)
        assert curve.values[0] == pytest.approx(float(traj.I[3].mean()), abs=1e-15)
        assert list(curve.positions) == list(range(3, 8))

    def test_constant_half_gates_decay_geometrically(self):
        n = 6
        traj = handmade_traj(I=[[0.5]] * n, F=[[0.5]] * n, V=[[1.0]] * n)
        curve = memory_trace(traj, 0)
        assert np.allclose(curve.values, [0.5 * 0.5 ** j for j in range(n)], atol=1e-15)

    def test_strictly_decreasing_in_unit_interval(self):
        traj = make_identity_traj(d=8, n=40, seed=15)
        for k in (0, 10, 25):
            curve = memory_trace(traj, k)
            assert np.all(np.diff(curve.values) < 0)
            assert np.all((curve.values > 0) & (curve.values < 1))

    def test_source_out_of_range(self):
        traj = make_identity_traj(n=5)
        with pytest.raises(IndexError):
            memory_trace(traj, 5)

    def test_elman_has_no_trace(self):
        rng = Rng(16)
        params = init_params("elman", 4, 4, rng)
        traj = forward_sequence(params, rng.uniform(-1, 1, (5, 4)))
        with pytest.raises(DecompositionError):
            memory_trace(traj, 0)


class TestTraceExport:
    def test_csv_format(self):
        traj = make_identity_traj(d=3, n=4, seed=17)
        buf = io.StringIO()
        write_trace_csv(traj, buf, tokens=["a", "b", "c", "d"])
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "source_pos,token,eval_pos,weight_mean"
        assert len(lines) - 1 == 4 * 5 // 2  # n(n+1)/2 pairs
        first = lines[1].split(",")
        assert first[0] == "0" and first[1] == "a" and first[2] == "0"
        float(first[3])

    def test_rows_match_memory_trace(self):
        traj = make_identity_traj(d=3, n=5, seed=18)
        rows = list(trace_rows(traj))
        for k in range(5):
            curve = memory_trace(traj, k)
            got = [(t, v) for (kk, _, t, v) in rows if kk == k]
            assert got == list(zip(curve.positions, curve.values))
