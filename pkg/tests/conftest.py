import numpy as np
import pytest
from hypothesis import strategies as st

from cliffsim.pauli import PauliString

ONE = ("H", "Rz", "Rzdg", "X", "Y", "Z")
TWO = ("CNOT", "CZ", "SWAP")


def random_circuit(m, depth, rng, gate_set=("H", "Rz", "CNOT", "CZ")):
    out = []
    ones = [g for g in gate_set if g in ONE]
    twos = [g for g in gate_set if g in TWO] if m > 1 else []
    for _ in range(depth):
        if twos and rng.random() < 0.4:
            a, b = rng.choice(m, size=2, replace=False)
            out.append((twos[int(rng.integers(len(twos)))], int(a), int(b)))
        else:
            out.append((ones[int(rng.integers(len(ones)))], int(rng.integers(m))))
    return out


def random_pauli(m, rng, phase=True):
    return PauliString(m, int(rng.integers(0, 1 << m)), int(rng.integers(0, 1 << m)),
                       int(rng.integers(0, 4)) if phase else 0)


@st.composite
def paulis(draw, m=None, max_m=5):
    m = draw(st.integers(0, max_m)) if m is None else m
    x = draw(st.integers(0, (1 << m) - 1))
    z = draw(st.integers(0, (1 << m) - 1))
    k = draw(st.integers(0, 3))
    return PauliString(m, x, z, k)


@st.composite
def circuits(draw, m, max_depth=12):
    seed = draw(st.integers(0, 2**32 - 1))
    depth = draw(st.integers(0, max_depth))
    return random_circuit(m, depth, np.random.default_rng(seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def honest_values(state, members, rng):
    """Jointly measure commuting observables in turn; +-1 per member."""
    from cliffsim.stabilizer import measure_pauli
    out = []
    for p in members:
        bit, _, state = measure_pauli(state, p, rng)
        out.append(1 - 2 * bit)
    return out


def honest_square_extract(state, rng):
    from cliffsim.contextuality import extract_nonstab_square, square_lines
    lines = square_lines()
    rows = [honest_values(state, lines[i].members, rng) for i in range(3)]
    cols = [honest_values(state, lines[3 + j].members, rng) for j in range(3)]
    return extract_nonstab_square(rows, cols)


def honest_pentagram_extract(state, rng):
    from cliffsim.contextuality import extract_nonstab_pentagram, pentagram_lines
    return extract_nonstab_pentagram([honest_values(state, l.members, rng) for l in pentagram_lines()])
