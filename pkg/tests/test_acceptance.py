"""End-to-end acceptance checks, one per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` or directly as a script.
"""

import itertools
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

sys.path.insert(0, str(Path(__file__).parent))

from cliffsim import dense
from cliffsim import hardness as Hd
from cliffsim import protocol as P
from cliffsim.clifford2 import c1_group, c2_group, enumerate_c2_cosets, to_s6
from cliffsim.contextuality import (enumerate_pauli_lines, pentagram_lines, pentagram_nodes, two_qubit_paulis,
                                    violated_lines)
from cliffsim.gadgets import check_brickwork_case, check_line_case, check_wide_case, single_input_dependence
from cliffsim.randomize import S3Group, kilian, random_symmetric_stack
from cliffsim.stabilizer import (apply_gates, measure_multi, measurement_c_block, measurement_plan,
                                 sample_outcomes, support_sample, zero_state)
from cliffsim.tableau import apply_gate, from_circuit

from conftest import random_circuit

CRITERIA = {}


def criterion(num, title, limit=None):
    def wrap(fn):
        CRITERIA[num] = (title, limit, fn)
        return fn
    return wrap


def run(num):
    title, limit, fn = CRITERIA[num]
    t0 = time.perf_counter()
    ok, detail = fn()
    secs = time.perf_counter() - t0
    if limit is not None and secs > limit:
        ok, detail = False, f"{detail}; {secs:.0f}s exceeds the {limit}s budget"
    line = f"[{'PASS' if ok else 'FAIL'}] {num:2d} {title}: {detail} ({secs:.1f}s)"
    return ok, line


BASES = "XYZ"


# -- 1 ----------------------------------------------------------------------------------

def _dense_distribution(m, gates, qubits, bases):
    vec = dense.circuit_unitary(m, gates) @ dense.zero_state(m)
    return dense.outcome_distribution(vec, qubits, bases)


@criterion(1, "simulator soundness against the dense oracle", 120)
def c1():
    rng = np.random.default_rng(101)
    gate_set = ("H", "Rz", "Rzdg", "X", "Y", "Z", "CNOT", "CZ", "SWAP")
    cases = []
    for _ in range(1000):
        m = int(rng.integers(1, 6))
        gates = random_circuit(m, int(rng.integers(1, 51)), rng, gate_set)
        k = int(rng.integers(1, m + 1))
        qs = sorted(rng.choice(m, size=k, replace=False).tolist())
        bases = [BASES[int(b)] for b in rng.integers(0, 3, size=k)]
        cases.append((m, gates, qs, bases))
    bad_support = 0
    for m, gates, qs, bases in cases:
        s = apply_gates(zero_state(m), gates)
        want = _dense_distribution(m, gates, qs, bases)
        plan = measurement_plan(s, qs, bases)
        if plan.support() != {k for k, v in want.items() if v > 1e-12}:
            bad_support += 1
            continue
        # measure_multi agrees with the plan's sampler draw for draw
        seed = int(rng.integers(0, 2 ** 32))
        rec, _ = measure_multi(s, qs, bases, np.random.default_rng(seed))
        one = sample_outcomes(s, qs, bases, np.random.default_rng(seed), 1)[0]
        if [1 - 2 * int(b) for b in one] != list(rec.outcomes):
            bad_support += 1
    worst = 1.0
    for m, gates, qs, bases in [c for c in cases if c[0] >= 3][:20]:
        s = apply_gates(zero_state(m), gates)
        want = _dense_distribution(m, gates, qs, bases)
        keys = sorted(k for k, v in want.items() if v > 1e-12)
        if len(keys) < 2:
            continue
        samples = sample_outcomes(s, qs, bases, rng, 100_000)
        counts = Counter(map(tuple, samples.tolist()))
        if set(counts) - set(keys):
            bad_support += 1
        obs = [counts.get(k, 0) for k in keys]
        exp = [want[k] * 100_000 for k in keys]
        worst = min(worst, stats.chisquare(obs, exp).pvalue)
    return bad_support == 0 and worst > 0.001, f"support mismatches {bad_support}/1000, min chi-square p {worst:.4f}"


# -- 2 ----------------------------------------------------------------------------------

@criterion(2, "720 two-qubit cosets and the S6 isomorphism", 60)
def c2():
    cs = enumerate_c2_cosets()
    gens = [("H", 0), ("H", 1), ("Rz", 0), ("Rz", 1), ("CNOT", 0, 1)]
    seen = {from_circuit(2, []).key()}
    frontier = [from_circuit(2, [])]
    while frontier:
        nxt = []
        for t in frontier:
            for g in gens:
                u = apply_gate(t, g)
                if u.key() not in seen:
                    seen.add(u.key())
                    nxt.append(u)
        frontier = nxt
    perms = np.array([to_s6(c).image for c in cs], dtype=np.int64)
    grp = c2_group()
    mt = grp.mul_table
    n = grp.order
    # (p q)(i) = p(q(i)), for every ordered pair at once
    lhs = perms[mt]  # (n, n, 6)
    rhs = perms[np.arange(n)[:, None, None], perms[None, :, :]]
    hom = bool((lhs == rhs).all())
    bij = len({tuple(p) for p in perms}) == 720
    ok = len(cs) == 720 and len(seen) == 720 and hom and bij
    return ok, f"{len(cs)} cosets ({len(seen)} by closure), homomorphism on {n * n} pairs {hom}, bijective {bij}"


# -- 3 ----------------------------------------------------------------------------------

@criterion(3, "at least 3 of the 15 Pauli lines are violated", 1)
def c3():
    paulis = two_qubit_paulis()
    idx = {p.key(): i for i, p in enumerate(paulis)}
    a = (np.arange(1 << 15)[:, None] >> np.arange(15)) & 1
    viol = np.zeros(1 << 15, dtype=np.int64)
    for l in enumerate_pauli_lines():
        par = a[:, [idx[p.key()] for p in l.members]].sum(axis=1) % 2
        viol += par != (0 if l.sign > 0 else 1)
    all_plus = len(violated_lines({p.key(): 1 for p in paulis}))
    ok = viol.min() == 3 and viol[0] == 3 and all_plus == 3
    return ok, f"minimum {viol.min()}, all-+1 violates {all_plus}"


# -- 4 ----------------------------------------------------------------------------------

@criterion(4, "pentagram contextuality", 1)
def c4():
    lines = pentagram_lines()
    nodes = pentagram_nodes()
    pos = {p.key(): i for i, p in enumerate(nodes)}
    a = 1 - 2 * ((np.arange(1 << 10)[:, None] >> np.arange(10)) & 1)
    sat = np.ones(1 << 10, dtype=bool)
    for l in lines:
        sat &= a[:, [pos[p.key()] for p in l.members]].prod(axis=1) == l.sign
    degrees = [sum(p in l for l in lines) for p in nodes]
    neg = sum(l.sign < 0 for l in lines)
    ok = len(nodes) == 10 and not sat.any() and set(degrees) == {2} and neg == 1
    return ok, f"{int(sat.sum())} satisfying assignments, node degrees {sorted(set(degrees))}, {neg} negative line"


# -- 5 ----------------------------------------------------------------------------------

@criterion(5, "brickwork and line single-gate gadgets", 300)
def c5():
    bad = []
    for seed in range(10):
        rng = np.random.default_rng(500 + seed)
        bad += [("brickwork", u, seed) for u in range(720) if not check_brickwork_case(u, rng)]
        bad += [("line", u, seed) for u in range(c1_group().order) if not check_line_case(u, rng)]
    return not bad, f"{720 * 10} brickwork and {6 * 10} line runs, {len(bad)} failures {bad[:3]}"


# -- 6 ----------------------------------------------------------------------------------

@criterion(6, "wide cluster gadget", 300)
def c6():
    rng = np.random.default_rng(600)
    bad = 0
    for _ in range(200):
        m = int(rng.integers(3, 7))
        n = int(rng.integers(1, 11))
        g = [None if rng.random() < 0.2 else tuple(int(v) for v in rng.choice(m, 2, replace=False))
             for _ in range(n)]
        h = list(random_symmetric_stack(n, m, rng))
        bad += not check_wide_case(g, h, m, rng)
    dep = all(single_input_dependence(m, 3, rng) for m in range(3, 7))
    return bad == 0 and dep, f"{bad}/200 residual mismatches, single-input dependence {dep}"


# -- 7 ----------------------------------------------------------------------------------

def _nc1_batch(make_factory, n, per_target, seed):
    wrong = unknown = total = 0
    for k, target in enumerate(["II", "HH"] * per_target):
        rng = np.random.default_rng([seed, k])
        w = Hd.gen_s6_promise_instance(target, n, rng)
        v = P.extract_nc1(make_factory(rng), w, rng)
        total += 1
        wrong += v not in (target, "unknown")
        unknown += v == "unknown"
    return wrong, unknown, total


@criterion(7, "NC1 extraction at n = 100", 600)
def c7():
    out = []
    ok = True
    for name, mk in (("honest", lambda r: (lambda g: P.honest_prover(g, r))),
                     ("lazy", lambda r: P.lazy_adversarial_prover)):
        wrong, unknown, total = _nc1_batch(mk, 100, 100, 7)
        ok &= wrong == 0 and unknown / total < 0.05
        out.append(f"{name}: {wrong} wrong, unknown {unknown}/{total}")
    return ok, "; ".join(out)


# -- 8 ----------------------------------------------------------------------------------

@criterion(8, "error-tolerant NC1 extraction, eps = 0.02, n = 50")
def c8():
    res = {}
    for eps in (0.02, 0.0):
        correct = faults = answers = 0
        for k in range(100):
            rng = np.random.default_rng([8, k, int(eps * 100)])
            target = ("II", "HH")[k % 2]
            w = Hd.gen_s6_promise_instance(target, 50, rng)
            provers = []

            def fac(g, rng=rng, provers=provers):
                p = P.faulty_prover(P.honest_prover(g, rng), eps, rng)
                provers.append(p)
                return p

            correct += P.extract_nc1_tolerant(fac, w, rng) == target
            faults += sum(p.faults for p in provers)
            answers += sum(p.answers for p in provers)
        res[eps] = (correct, faults / max(answers, 1))
    ok = res[0.02][0] >= 95 and res[0.0][0] == 100
    return ok, (f"eps 0.02: {res[0.02][0]}/100 correct (observed fault rate {res[0.02][1]:.4f}); "
                f"eps 0: {res[0.0][0]}/100")


# -- 9 ----------------------------------------------------------------------------------

@criterion(9, "parity-L extraction", 900)
def c9():
    wrong_c3 = ident_ok = 0
    for k in range(200):
        rng = np.random.default_rng([9, k])
        kind = ("identity", "C3")[k % 2]
        m = int(rng.integers(3, 9))
        n = int(rng.integers(12, 201))
        w = Hd.gen_promise_instance(kind, n, m, rng)
        v = P.extract_parityL(lambda g: P.honest_prover(g, rng), w, rng, P.ExtractConfig(16, 64))
        if kind == "C3":
            wrong_c3 += v == "identity"
        else:
            ident_ok += v == "identity"
    ok = wrong_c3 == 0 and ident_ok >= 99
    return ok, f"'identity' on C3: {wrong_c3}/100; correct on identity: {ident_ok}/100"


# -- 10 ---------------------------------------------------------------------------------

@criterion(10, "line extraction, n = 50")
def c10():
    miss = 0
    for k in range(100):
        rng = np.random.default_rng([10, k])
        U = rng.integers(0, 6, 50).tolist()
        V = rng.integers(0, 6, 50).tolist()
        miss += P.extract_ac0mod6(lambda g: P.honest_prover(g, rng), U, V, rng) != P.line_reference(U, V)
    return miss == 0, f"{100 - miss}/100 match the reference"


# -- 11 ---------------------------------------------------------------------------------

def _perm_product(word):
    acc = np.arange(3)
    for p in word:
        acc = acc[np.array(p)]
    return tuple(acc.tolist())


@criterion(11, "Kilian randomization over S3")
def c11():
    rng = np.random.default_rng(1100)
    g = S3Group()
    word = [(1, 0, 2), (0, 2, 1), (2, 0, 1)]
    target = _perm_product(word)
    allowed = [t for t in itertools.product(g.elements, repeat=3) if _perm_product(t) == target]
    counts = Counter()
    broken = 0
    for _ in range(100_000):
        t = tuple(kilian(g, word, rng))
        broken += _perm_product(t) != target or any(x not in g.elements for x in t)
        counts[t] += 1
    p = stats.chisquare([counts[t] for t in allowed]).pvalue
    ok = len(allowed) == 36 and set(counts) <= set(allowed) and broken == 0 and p > 0.001
    return ok, f"{len(allowed)} tuples, {len(counts)} seen, {broken} constraint violations, chi-square p {p:.4f}"


# -- 12 ---------------------------------------------------------------------------------

def _brute_parity(d, s, t):
    count = 0
    for path in itertools.product(range(d.m), repeat=d.n - 1):
        nodes = (s,) + path + (t,)
        count += all(d.layers[k][nodes[k], nodes[k + 1]] for k in range(d.n))
    return count % 2


@criterion(12, "layered DAG reduction chain")
def c12():
    rng = np.random.default_rng(1200)
    bad = 0
    for _ in range(100):
        m, n = int(rng.integers(2, 5)), int(rng.integers(1, 6))
        d = Hd.random_ldag(n, m, rng)
        bit = _brute_parity(d, 0, m - 1)
        w = Hd.ldag_to_cnotword(d)
        kind = Hd.word_product_kind(Hd.cnotword_to_cycle_promise(w))
        bad += Hd.top_right(w) != bit or kind != ("C3" if bit else "identity")
    return bad == 0, f"{100 - bad}/100 agree with brute-force path parity"


# -- 13 ---------------------------------------------------------------------------------

def _random_graph(m, rng):
    a = np.triu((rng.random((m, m)) < 0.5).astype(np.uint8), 1)
    return a | a.T


@criterion(13, "support sampling and the sampled lazy prover")
def c13():
    rng = np.random.default_rng(1300)
    worst = 1.0
    bad = 0
    for _ in range(20):
        m = int(rng.integers(2, 7))
        adj = _random_graph(m, rng)
        basis = rng.integers(0, 2, size=m).astype(np.uint8)
        letters = ["Y" if b else "X" for b in basis]
        want = dense.outcome_distribution(dense.graph_state(adj), range(m), letters)
        support = sorted(k for k, v in want.items() if v > 1e-12)
        z = np.array(support[0], dtype=np.uint8)
        c = measurement_c_block(adj, basis)
        counts = Counter(tuple(support_sample(z, c, rng).tolist()) for _ in range(10_000))
        bad += set(counts) != set(support)
        if len(support) > 1:
            worst = min(worst, stats.chisquare([counts[k] for k in support]).pvalue)
    # round-1 transcripts: samp-wrapped lazy against honest, on two projections of the outcomes
    geo = P.narrow_geometry(1)
    A = P.narrow_round1([c2_group().identity])
    N = 20_000
    draws = {}
    for name, make in (("honest", lambda: P.honest_prover(geo, rng)),
                       ("wrapped", lambda: P.samp_from_rel(P.lazy_adversarial_prover, geo, rng))):
        draws[name] = np.array([make().round1(A).reshape(-1) for _ in range(N)])
    weights = 1 << np.arange(8)
    two = 1.0
    for sl in (slice(0, 8), slice(-8, None)):
        h = np.bincount(draws["honest"][:, sl] @ weights, minlength=256)
        w = np.bincount(draws["wrapped"][:, sl] @ weights, minlength=256)
        two = min(two, stats.chi2_contingency(np.vstack([h, w]))[1])
    ok = bad == 0 and worst > 0.001 and two > 0.001
    return ok, f"support mismatches {bad}/20, min chi-square p {worst:.4f}, two-sample p {two:.4f}"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    ok, line = run(num)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
