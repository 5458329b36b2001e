import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliffsim.clifford2 import C2Coset, c1_group, c1_index, c2_group, c2_index
from cliffsim.gadgets import (brickwork_gadget, check_brickwork_case, check_line_case, check_wide_case,
                              compiled_tableau, compose_gadgets, hook_table, line_gadget, pauli_frame,
                              single_input_dependence, wide_cluster_gadget, wide_dependence,
                              wide_input_bits, wide_word_gates)
from cliffsim.graphsim import run_layout
from cliffsim.layout import MeasurementLayout
from cliffsim.stabilizer import (apply_clifford, apply_gates, from_graph, plus_state, same_mod_pauli,
                                 same_state)
from cliffsim.tableau import pauli_tableau


def residual(layout, seed=0, method="window"):
    return run_layout(layout, np.random.default_rng(seed), method=method)


def target(group, u, m):
    return apply_clifford(plus_state(m), group.tableau(u))


def test_line_identity_and_hadamard():
    g = c1_group()
    _, res = residual(line_gadget([g.identity]))
    assert same_mod_pauli(res, plus_state(1))
    h = c1_index([("H", 0)])
    _, res = residual(line_gadget([h]))
    assert same_mod_pauli(res, apply_gates(plus_state(1), [("H", 0)]))


def test_line_all_words_of_length_three():
    g = c1_group()
    rng = np.random.default_rng(1)
    for a in range(6):
        for b in range(6):
            for c in range(6):
                lay = line_gadget([a, b, c])
                assert lay.cols == 3 * 3 + 2
                _, res = run_layout(lay, rng)
                assert same_mod_pauli(res, target(g, g.product([a, b, c]), 1))


def test_line_cases_each_coset():
    rng = np.random.default_rng(2)
    assert all(check_line_case(u, rng) for u in range(6))


def test_line_block_depends_on_gate_and_position_only():
    a = line_gadget([0, 3, 5, 1])
    b = line_gadget([0, 3, 2, 1])
    diff = np.flatnonzero((a.basis != b.basis).any(axis=0))
    # letter 3 of 4 (index 2) sits at position n-1-2 = 1, columns 4..6
    assert set(diff.tolist()) <= {4, 5, 6}


def test_brickwork_identity_and_cz():
    grp = c2_group()
    _, res = residual(brickwork_gadget([grp.identity]))
    assert same_mod_pauli(res, plus_state(2))
    cz = c2_index([("CZ", 0, 1)])
    _, res = residual(brickwork_gadget([cz]))
    assert same_mod_pauli(res, from_graph([[0, 1], [1, 0]]))


def test_brickwork_geometry():
    for n in (1, 2, 5):
        lay = brickwork_gadget([C2Coset.identity()] * n)
        lay.check()
        assert lay.num_vertices == 16 * n + 4
        assert lay.rows == 2 and lay.outputs == [lay.vid(0, lay.cols - 1), lay.vid(1, lay.cols - 1)]


def test_brickwork_all_720_single_gates():
    rng = np.random.default_rng(3)
    bad = [u for u in range(720) if not check_brickwork_case(u, rng)]
    assert bad == []


def test_hook_table_covers_every_coset():
    tab = hook_table()
    assert tab.shape == (720, 16)


def test_corrupted_table_is_detected():
    rng = np.random.default_rng(4)
    broken = np.roll(hook_table(), 1, axis=0)
    fails = sum(not check_brickwork_case(u, rng, table=broken) for u in range(720))
    assert fails > 0


def test_brickwork_words_match_product():
    grp = c2_group()
    rng = np.random.default_rng(5)
    for _ in range(30):
        word = [int(v) for v in rng.integers(0, 720, size=int(rng.integers(1, 5)))]
        _, res = run_layout(brickwork_gadget(word), rng)
        assert same_mod_pauli(res, target(grp, grp.product(word), 2))


def test_window_and_full_graph_simulation_agree():
    grp = c2_group()
    rng = np.random.default_rng(6)
    for _ in range(10):
        word = [int(v) for v in rng.integers(0, 720, size=2)]
        lay = brickwork_gadget(word)
        _, a = run_layout(lay, rng, method="window")
        _, b = run_layout(lay, rng, method="full")
        assert same_mod_pauli(a, b)
        assert same_mod_pauli(b, target(grp, grp.product(word), 2))


def test_brickwork_block_locality():
    rng = np.random.default_rng(7)
    word = [int(v) for v in rng.integers(0, 720, size=4)]
    base = brickwork_gadget(word)
    for i in range(4):
        alt = list(word)
        alt[i] = (alt[i] + 1 + int(rng.integers(0, 719))) % 720
        cols = np.flatnonzero((brickwork_gadget(alt).basis != base.basis).any(axis=0))
        lo, hi = base.header["block_columns"][i]
        assert all(lo <= c < hi for c in cols)


def test_compose_identity_gadgets():
    ident = c1_group().identity
    lay = compose_gadgets(line_gadget([ident]), line_gadget([ident]))
    lay.check()
    _, res = residual(lay)
    assert same_mod_pauli(res, plus_state(1))


def test_compose_two_hadamards_is_identity():
    h = c1_index([("H", 0)])
    _, res = residual(compose_gadgets(line_gadget([h]), line_gadget([h])))
    assert same_mod_pauli(res, plus_state(1))


def test_compose_brickwork_pairs():
    grp = c2_group()
    rng = np.random.default_rng(8)
    for _ in range(100):
        a, b = (int(v) for v in rng.integers(0, 720, size=2))
        _, res = run_layout(compose_gadgets(brickwork_gadget([a]), brickwork_gadget([b])), rng)
        assert same_mod_pauli(res, target(grp, grp.mul(b, a), 2))


def test_compose_width_mismatch():
    with pytest.raises(ValueError):
        compose_gadgets(line_gadget([0]), brickwork_gadget([0]))


def test_wide_identity():
    ident = np.zeros((3, 3), dtype=np.uint8)
    lay = wide_cluster_gadget([None], [ident], 3)
    lay.check()
    assert (lay.basis[:, 0] == 0).all()
    _, res = residual(lay)
    assert same_mod_pauli(res, plus_state(3))


def test_wide_single_cnot():
    # CNOT from wire 1 to wire 3, counting from one
    _, res = residual(wide_cluster_gadget([(0, 2)], [None], 4))
    assert same_mod_pauli(res, apply_gates(plus_state(4), [("CNOT", 0, 2)]))


def random_sym(m, rng):
    a = np.triu(rng.integers(0, 2, size=(m, m)), 0)
    return ((a + a.T) % 2 + np.diag(np.diag(a))) % 2


def test_wide_mixed_word():
    rng = np.random.default_rng(9)
    m = 4
    g = [(0, 3), None, (2, 1)]
    h = [random_sym(m, rng) for _ in range(3)]
    assert check_wide_case(g, h, m, rng)


def test_wide_word_gates_order():
    # h_1 then g_1 in the operator order means g_1 is applied last
    gates = wide_word_gates([(0, 1)], [np.eye(3, dtype=np.uint8)], 3)
    assert gates[-1] == ("CNOT", 0, 1)
    assert gates[:3] == [("Rz", 0), ("Rz", 1), ("Rz", 2)]


def test_wide_rejects_malformed_letters():
    with pytest.raises(ValueError):
        wide_cluster_gadget([(1, 1)], [None], 3)
    with pytest.raises(ValueError):
        wide_cluster_gadget([None], [np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]])], 3)
    with pytest.raises(ValueError):
        wide_cluster_gadget([None], [None], 2)


@pytest.mark.parametrize("m,n", [(3, 2), (4, 3)])
def test_wide_basis_bits_depend_on_single_input(m, n):
    assert single_input_dependence(m, n, np.random.default_rng(10))
    dep = wide_dependence(m, n, np.random.default_rng(11))
    assert len(dep) == n * wide_input_bits(m)


def test_pauli_frame_identity_line():
    lay = line_gadget([c1_group().identity])
    rec, res = residual(lay)
    frame = pauli_frame(lay, rec)
    assert frame.weight <= 1
    want = apply_clifford(apply_clifford(plus_state(1), compiled_tableau(lay)), pauli_tableau(frame))
    assert same_state(res, want)


def test_pauli_frame_exact_residual():
    rng = np.random.default_rng(12)
    for _ in range(100):
        word = [int(v) for v in rng.integers(0, 720, size=int(rng.integers(1, 3)))]
        lay = brickwork_gadget(word)
        rec, res = run_layout(lay, rng)
        frame = pauli_frame(lay, rec)
        want = apply_clifford(apply_clifford(plus_state(2), compiled_tableau(lay)), pauli_tableau(frame))
        assert same_state(res, want)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pauli_frame_linear_in_outcomes(seed):
    rng = np.random.default_rng(seed)
    lay = brickwork_gadget([int(rng.integers(0, 720))])
    meas = lay.rounds > 0
    a = (rng.integers(0, 2, size=(lay.rows, lay.cols)) * meas).astype(np.uint8)
    b = (rng.integers(0, 2, size=(lay.rows, lay.cols)) * meas).astype(np.uint8)
    zero = np.zeros_like(a)
    fa, fb, fab, f0 = (pauli_frame(lay, g) for g in (a, b, a ^ b, zero))
    assert f0.key() == (0, 0)
    assert (fa * fb).key() == fab.key()


def test_pauli_frame_needs_all_outcomes():
    lay = line_gadget([0])
    with pytest.raises(ValueError):
        pauli_frame(lay, {0: 0})


def test_layout_text_round_trip():
    lay = brickwork_gadget([3, 100])
    back = MeasurementLayout.from_text(lay.to_text())
    assert np.array_equal(back.basis, lay.basis) and back.edges() == lay.edges()
    assert back.header == lay.header and back.outputs == lay.outputs
