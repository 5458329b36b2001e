import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliffsim import gf2
from cliffsim.clifford2 import C2Coset, hh, is_even, word_product
from cliffsim.hardness import (CnotWord, LayeredDag, classify_product, cnotword_to_cycle_promise,
                               count_paths, cycle3_matrix, cycle3_tableau, gen_promise_instance,
                               gen_s6_promise_instance, is_legal, ldag_block_matrix, ldag_path_parity,
                               ldag_to_cnotword, random_cnot_word, random_ldag, read_cnot_instance,
                               reference_solver, top_right, tree_product, unitriangular_letters,
                               word_product_kind, write_cnot_instance)
from cliffsim.tableau import equal_mod_pauli, from_circuit


def chain(n, m=2):
    layers = []
    for _ in range(n):
        a = np.zeros((m, m), dtype=np.uint8)
        a[0, 0] = 1
        layers.append(a)
    return LayeredDag(m, layers)


def enumerate_paths(d, s, t):
    total = 0
    for nodes in itertools.product(range(d.m), repeat=d.n - 1):
        path = (s,) + nodes + (t,)
        if all(d.layers[k][path[k], path[k + 1]] for k in range(d.n)):
            total += 1
    return total


def test_path_parity_examples():
    assert ldag_path_parity(chain(5), 0, 0) == 1
    layers = [np.ones((2, 2), dtype=np.uint8)] + [np.eye(2, dtype=np.uint8)] * 3 + [np.ones((2, 2), dtype=np.uint8)]
    two = LayeredDag(2, layers)
    assert count_paths(two, 0, 1) == 2
    assert ldag_path_parity(two, 0, 1) == 0
    with pytest.raises(IndexError):
        ldag_path_parity(two, 0, 2)


def test_path_parity_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(30):
        d = random_ldag(4, 4, rng)
        s, t = (int(v) for v in rng.integers(0, 4, size=2))
        paths = enumerate_paths(d, s, t)
        assert count_paths(d, s, t) == paths
        assert ldag_path_parity(d, s, t) == paths % 2


def test_empty_dag():
    d = LayeredDag(3, [])
    w = ldag_to_cnotword(d)
    assert (reference_solver(w) == np.eye(3, dtype=np.uint8)).all()
    assert top_right(w) == 0


def test_inverse_blocks_are_layer_products():
    rng = np.random.default_rng(1)
    for _ in range(50):
        m, n = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        d = random_ldag(n, m, rng)
        prod = reference_solver(ldag_to_cnotword(d))
        assert (prod == gf2.inverse(ldag_block_matrix(d))).all()
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                acc = np.eye(m, dtype=np.uint8)
                for k in range(i, j):
                    acc = gf2.matmul(acc, d.layers[k])
                assert (prod[i * m:(i + 1) * m, j * m:(j + 1) * m] == acc).all()


def test_reduction_top_right_is_path_parity():
    rng = np.random.default_rng(2)
    for _ in range(100):
        m, n = int(rng.integers(2, 5)), int(rng.integers(1, 6))
        d = random_ldag(n, m, rng)
        s, t = (int(v) for v in rng.integers(0, m, size=2))
        w = ldag_to_cnotword(d, s, t)
        assert top_right(w) == ldag_path_parity(d, s, t)
        assert all(is_legal([g], w.m) for g in w.letters)
        assert len(w) <= (n + 1) * m * ((n + 1) * m - 1) // 2


def test_unitriangular_letters_reproduce_matrix():
    rng = np.random.default_rng(3)
    for _ in range(50):
        N = int(rng.integers(2, 8))
        a = np.triu(rng.integers(0, 2, size=(N, N)), 1).astype(np.uint8) + np.eye(N, dtype=np.uint8)
        letters = unitriangular_letters(a)
        assert (reference_solver(CnotWord(N, letters)) == a).all()
    with pytest.raises(ValueError):
        unitriangular_letters(np.array([[1, 0], [1, 1]], dtype=np.uint8))


def test_cycle_promise_examples():
    ident = CnotWord(4, [None, None])
    assert word_product_kind(cnotword_to_cycle_promise(ident)) == "identity"
    one = CnotWord(3, [(0, 2)])
    assert top_right(one) == 1
    assert word_product_kind(cnotword_to_cycle_promise(one)) == "C3"


def test_cycle_promise_on_upper_triangular_instances():
    rng = np.random.default_rng(4)
    for _ in range(100):
        N = int(rng.integers(2, 7))
        a = np.triu(rng.integers(0, 2, size=(N, N)), 1).astype(np.uint8) + np.eye(N, dtype=np.uint8)
        w = CnotWord(N, unitriangular_letters(a)[::-1])
        kind = word_product_kind(cnotword_to_cycle_promise(w))
        assert kind == ("C3" if top_right(w) else "identity")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cycle_promise_dichotomy_for_any_word(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    w = random_cnot_word(int(rng.integers(0, 12)), m, rng, identity_rate=0.2)
    out = cnotword_to_cycle_promise(w)
    assert word_product_kind(out) == ("C3" if top_right(w) else "identity")


def test_cycle3_is_a_three_cycle():
    mat = cycle3_matrix(3)
    assert sorted(mat.sum(axis=0).tolist()) == [1, 1, 1]
    assert not (mat == np.eye(3)).all()
    cube = gf2.matmul(gf2.matmul(mat, mat), mat)
    assert (cube == np.eye(3, dtype=np.uint8)).all()
    # wire-level action agrees with the tableau
    t = cycle3_tableau(4)
    swap12, swap01 = from_circuit(4, [("SWAP", 1, 2)]), from_circuit(4, [("SWAP", 0, 1)])
    from cliffsim.tableau import compose_all
    assert equal_mod_pauli(t, compose_all([swap01, swap12, swap01, swap12]))


def test_promise_instances():
    rng = np.random.default_rng(5)
    w = gen_promise_instance("identity", 2, 4, rng)
    assert w.letters[0] == w.letters[1]
    for trial in range(1000):
        kind = "C3" if trial % 2 else "identity"
        n = int(rng.integers(12, 40))
        m = int(rng.integers(3, 7))
        w = gen_promise_instance(kind, n, m, rng)
        assert len(w) == n and word_product_kind(w) == kind
        assert all(g is None or (g[0] != g[1]) for g in w.letters)
    with pytest.raises(ValueError):
        gen_promise_instance("identity", 4, 2, rng)
    with pytest.raises(ValueError):
        gen_promise_instance("C3", 5, 3, rng)


def test_s6_promise_instances():
    rng = np.random.default_rng(6)
    for kind, target in (("II", C2Coset.identity()), ("HH", hh())):
        for _ in range(100):
            w = gen_s6_promise_instance(kind, int(rng.integers(2, 20)), rng)
            assert word_product(w) == target and all(is_even(u) for u in w)
    pair = gen_s6_promise_instance("II", 2, rng)
    assert pair[1] == pair[0].inverse()


def test_reference_solver_examples():
    assert (reference_solver(CnotWord(3, [])) == np.eye(3)).all()
    w = CnotWord(3, [(0, 2)])
    assert (reference_solver(w) == w.letter_matrix(0)).all()
    rng = np.random.default_rng(7)
    for _ in range(100):
        w = random_cnot_word(int(rng.integers(1, 30)), int(rng.integers(2, 6)), rng, 0.1)
        assert (reference_solver(w) == tree_product(w)).all()


def test_word_matrix_matches_circuit_action():
    rng = np.random.default_rng(8)
    for _ in range(30):
        w = random_cnot_word(10, 4, rng)
        t = w.tableau()
        # column j of the product is the Z part of the image of Z_j
        mat = reference_solver(w)
        for j in range(4):
            img = t.z_image(j)
            assert img.x == 0 and img.z_bits.tolist() == mat[:, j].tolist()


def test_letters_validated():
    with pytest.raises(ValueError):
        CnotWord(3, [(1, 1)])
    with pytest.raises(ValueError):
        CnotWord(3, [(0, 3)])
    mat = np.eye(3, dtype=np.uint8)
    mat[2, 0] = 1
    assert CnotWord(3, [mat, np.eye(3, dtype=np.uint8), "id"]).letters == [(2, 0), None, None]
    assert not is_legal([(0, 0)], 3)


def test_instance_file_round_trip():
    rng = np.random.default_rng(9)
    w = gen_promise_instance("C3", 20, 5, rng)
    header, back = read_cnot_instance(write_cnot_instance(w, "C3", 9))
    assert back.letters == w.letters and back.m == 5
    assert header == {"kind": "C3", "n": "20", "m": "5", "seed": "9"}
    assert classify_product(reference_solver(back)) == "C3"
