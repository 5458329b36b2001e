import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from cliffsim import dense
from cliffsim.pauli import P, PauliString
from cliffsim.stabilizer import (EMPTY, MINUS, NON_STABILIZER, PLUS, MeasurementRecord, StabilizerState,
                                 apply_clifford, apply_gates, from_graph, is_stabilizer, measure_multi,
                                 measure_single, measurement_c_block, measurement_plan, plus_state,
                                 postselect, same_state, support_sample, to_vector, zero_state)
from cliffsim.tableau import from_circuit, identity_tableau

from conftest import random_circuit, random_pauli

BASES = "XYZ"


def random_state(m, rng, depth=None):
    gates = random_circuit(m, depth or 4 * m + 2, rng, ("H", "Rz", "X", "CNOT", "CZ"))
    return apply_gates(zero_state(m), gates), gates


def random_graph(m, rng):
    a = np.triu((rng.random((m, m)) < 0.5).astype(np.uint8), 1)
    return a | a.T


def gens(s):
    return [str(g) for g in s.generators]


def test_from_graph_examples():
    assert gens(from_graph([[0]])) == ["+X"]
    assert gens(from_graph([[0, 1], [1, 0]])) == ["+XZ", "+ZX"]
    tri = np.ones((3, 3), dtype=np.uint8) - np.eye(3, dtype=np.uint8)
    assert gens(from_graph(tri)) == ["+XZZ", "+ZXZ", "+ZZX"]


def test_from_graph_matches_cz_circuit():
    rng = np.random.default_rng(0)
    for _ in range(20):
        m = int(rng.integers(1, 6))
        adj = random_graph(m, rng)
        cz = [("CZ", i, j) for i in range(m) for j in range(i + 1, m) if adj[i, j]]
        assert same_state(from_graph(adj), apply_gates(plus_state(m), cz))


def test_from_graph_rejects_bad_input():
    with pytest.raises(ValueError):
        from_graph([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        from_graph([[1]])


def test_apply_clifford_examples():
    rng = np.random.default_rng(1)
    s, _ = random_state(3, rng)
    assert apply_clifford(s, identity_tableau(3)) == s
    h = apply_clifford(zero_state(1), from_circuit(1, [("H", 0)]))
    assert gens(h) == ["+X"]


def test_apply_clifford_matches_dense():
    rng = np.random.default_rng(2)
    for _ in range(50):
        m = int(rng.integers(1, 6))
        s, gates = random_state(m, rng)
        s.check()
        want = dense.circuit_unitary(m, gates) @ dense.zero_state(m)
        assert dense.equal_up_to_phase(to_vector(s), want)


def test_measure_single_examples():
    rng = np.random.default_rng(3)
    out, post = measure_single(zero_state(1), 0, "Z", rng)
    assert out == 1 and post == zero_state(1)
    outs = [measure_single(plus_state(1), 0, "Z", np.random.default_rng(k))[0] for k in range(400)]
    assert set(outs) == {1, -1}
    assert abs(np.mean(outs)) < 0.2


def test_measure_single_on_edge_graph_state():
    g = from_graph([[0, 1], [1, 0]])
    vec = to_vector(g)
    for seed in range(8):
        out, post = measure_single(g, 1, "X", np.random.default_rng(seed))
        bit = (1 - out) // 2
        want = dense.project(vec, [1], ["X"], [bit])
        want /= np.linalg.norm(want)
        assert dense.equal_up_to_phase(to_vector(post), want)
        assert is_stabilizer(post, P("ZI")) in (PLUS, MINUS)


def test_measure_single_index_error():
    with pytest.raises(IndexError):
        measure_single(zero_state(2), 2, "Z", np.random.default_rng(0))


def test_measure_multi_examples():
    rng = np.random.default_rng(4)
    rec, post = measure_multi(zero_state(4), range(4), "ZZZZ", rng)
    assert rec.outcomes == [1, 1, 1, 1] and all(rec.deterministic)
    bell = apply_gates(zero_state(2), [("H", 0), ("CNOT", 0, 1)])
    firsts = set()
    for seed in range(60):
        rec, _ = measure_multi(bell, [0, 1], "ZZ", np.random.default_rng(seed))
        assert rec.outcomes[0] == rec.outcomes[1]
        assert rec.deterministic == [False, True]
        firsts.add(rec.outcomes[0])
    assert firsts == {1, -1}


def test_measure_multi_rejects_duplicates():
    with pytest.raises(ValueError):
        measure_multi(zero_state(2), [0, 0], "ZZ", np.random.default_rng(0))


def _empirical(s, qubits, bases, shots, seed):
    rng = np.random.default_rng(seed)
    counts = {}
    for _ in range(shots):
        rec, _ = measure_multi(s, qubits, bases, rng)
        key = tuple(rec.bits)
        counts[key] = counts.get(key, 0) + 1
    return counts


def test_line_graph_pattern_matches_dense_chi_square():
    adj = np.zeros((4, 4), dtype=np.uint8)
    for i in range(3):
        adj[i, i + 1] = adj[i + 1, i] = 1
    s = from_graph(adj)
    bases = ["X", "Y", "X", "Y"]
    want = dense.outcome_distribution(to_vector(s), range(4), bases)
    got = _empirical(s, range(4), bases, 4000, 5)
    assert set(got) <= set(want)
    keys = sorted(want)
    obs = [got.get(k, 0) for k in keys]
    exp = [want[k] * 4000 for k in keys]
    assert stats.chisquare(obs, exp).pvalue > 0.001


def test_postselect_examples():
    assert postselect(zero_state(1), [0], "Z", [0]) == zero_state(1)
    assert postselect(zero_state(1), [0], "Z", [1]) is EMPTY
    bell = apply_gates(zero_state(2), [("H", 0), ("CNOT", 0, 1)])
    assert postselect(bell, [0, 1], "ZZ", [0, 1]) is EMPTY
    assert same_state(postselect(bell, [0, 1], "ZZ", [0, 0]), zero_state(2))


def test_postselect_matches_dense_projection():
    rng = np.random.default_rng(6)
    for _ in range(40):
        m = int(rng.integers(1, 6))
        s, _ = random_state(m, rng)
        k = int(rng.integers(1, m + 1))
        qubits = rng.choice(m, size=k, replace=False).tolist()
        bases = [BASES[int(b)] for b in rng.integers(0, 3, size=k)]
        bits = rng.integers(0, 2, size=k).tolist()
        proj = dense.project(to_vector(s), qubits, bases, bits)
        post = postselect(s, qubits, bases, bits)
        if np.linalg.norm(proj) < 1e-9:
            assert post is EMPTY
        else:
            assert dense.equal_up_to_phase(to_vector(post), proj / np.linalg.norm(proj))


def test_is_stabilizer_examples():
    assert is_stabilizer(zero_state(1), P("Z")) == PLUS
    assert is_stabilizer(zero_state(1), P("-Z")) == MINUS
    assert is_stabilizer(zero_state(1), P("X")) == NON_STABILIZER


def test_is_stabilizer_matches_expectation():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m = int(rng.integers(1, 5))
        s, _ = random_state(m, rng)
        p = random_pauli(m, rng, phase=False)
        ev = dense.expectation(to_vector(s), p)
        want = PLUS if ev > 0.5 else MINUS if ev < -0.5 else NON_STABILIZER
        assert is_stabilizer(s, p) == want


def test_support_sample_trivial_blocks():
    rng = np.random.default_rng(8)
    z = np.array([1, 0, 1], dtype=np.uint8)
    for _ in range(20):
        assert support_sample(z, np.zeros((3, 3), dtype=np.uint8), rng).tolist() == [1, 0, 1]
    seen = {tuple(support_sample(z, np.eye(3, dtype=np.uint8), rng).tolist()) for _ in range(400)}
    assert len(seen) == 8


def test_support_sample_uniform_on_graph_support():
    rng = np.random.default_rng(9)
    adj = random_graph(5, rng)
    basis = np.array([0, 1, 1, 0, 1], dtype=np.uint8)  # 1 = Y, 0 = X
    s = from_graph(adj)
    letters = ["Y" if b else "X" for b in basis]
    support = set(dense.outcome_distribution(to_vector(s), range(5), letters))
    z = np.array(sorted(support)[0], dtype=np.uint8)
    c = measurement_c_block(adj, basis)
    counts = {}
    for _ in range(10_000):
        key = tuple(support_sample(z, c, rng).tolist())
        counts[key] = counts.get(key, 0) + 1
    assert set(counts) == support
    obs = [counts[k] for k in sorted(support)]
    assert stats.chisquare(obs).pvalue > 0.001


def test_dense_oracle_examples():
    assert np.allclose(dense.plus_state(1), [2 ** -0.5, 2 ** -0.5])
    assert np.allclose(dense.graph_state(np.array([[0, 1], [1, 0]])), [0.5, 0.5, 0.5, -0.5])
    with pytest.raises(ValueError):
        dense.plus_state(dense.CAP + 1)


def test_random_circuit_distribution_is_affine():
    rng = np.random.default_rng(10)
    for _ in range(20):
        s, _ = random_state(5, rng)
        dist = dense.outcome_distribution(to_vector(s), range(5), "ZZZZZ")
        pts = np.array(sorted(dist), dtype=np.uint8)
        diffs = pts ^ pts[0]
        from cliffsim.gf2 import rank
        assert len(pts) == 2 ** rank(diffs)
        assert np.allclose(list(dist.values()), 1 / len(pts))
        plan = measurement_plan(s, range(5), "ZZZZZ")
        assert plan.support() == set(dist)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_measure_then_postselect_reproduces_state(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    s, _ = random_state(m, rng)
    k = int(rng.integers(1, m + 1))
    qubits = rng.choice(m, size=k, replace=False).tolist()
    bases = [BASES[int(b)] for b in rng.integers(0, 3, size=k)]
    rec, post = measure_multi(s, qubits, bases, rng)
    post.check()
    again = postselect(s, qubits, bases, rec.bits)
    assert again is not EMPTY and same_state(again, post)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deterministic_outcomes_do_not_depend_on_seed(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 6))
    s, _ = random_state(m, rng)
    bases = [BASES[int(b)] for b in rng.integers(0, 3, size=m)]
    a, _ = measure_multi(s, range(m), bases, np.random.default_rng(seed + 1))
    b, _ = measure_multi(s, range(m), bases, np.random.default_rng(seed + 2))
    assert a.deterministic == b.deterministic
    plan = measurement_plan(s, range(m), bases)
    fixed = [j for j in range(m) if j not in plan.random_positions and not plan.matrix[j].any()]
    for j in fixed:
        assert a.outcomes[j] == b.outcomes[j] == 1 - 2 * int(plan.const[j])


def test_total_variation_small():
    rng = np.random.default_rng(11)
    for _ in range(5):
        m = int(rng.integers(2, 6))
        s, _ = random_state(m, rng)
        bases = [BASES[int(b)] for b in rng.integers(0, 3, size=m)]
        want = dense.outcome_distribution(to_vector(s), range(m), bases)
        shots = 100_000
        samples = measurement_plan(s, range(m), bases).sample(rng, shots)
        keys, counts = np.unique(samples, axis=0, return_counts=True)
        got = {tuple(k.tolist()): c / shots for k, c in zip(keys, counts)}
        tvd = 0.5 * sum(abs(got.get(k, 0) - want.get(k, 0)) for k in set(got) | set(want))
        assert tvd < 0.02


def test_text_formats_round_trip():
    rng = np.random.default_rng(12)
    s, _ = random_state(4, rng)
    assert StabilizerState.from_text(s.to_text()) == s
    rec, _ = measure_multi(s, [0, 2], "XY", rng)
    assert MeasurementRecord.from_json(rec.to_json()) == rec
