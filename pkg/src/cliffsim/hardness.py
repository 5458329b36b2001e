"""Hard instances: S6 promise words, layered-DAG parity, CNOT words.

A CNOT letter (i, j) stands for the elementary matrix I + e_ij and None for
the identity; the matrix of a word is M_1 M_2 ... M_n.  As an operator on
qubits, letter (i, j) is CNOT with control i and target j, and the word
denotes g_1 ... g_n with g_n applied first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf2
from .clifford2 import C2Coset, hh, random_even_word
from .tableau import CliffordTableau, from_circuit


@dataclass
class CnotWord:
    m: int
    letters: list = field(default_factory=list)

    def __post_init__(self):
        clean = []
        for g in self.letters:
            if g is None or (isinstance(g, str) and g == "id"):
                clean.append(None)
                continue
            if isinstance(g, np.ndarray):
                off = (g % 2).copy()
                np.fill_diagonal(off, 0)
                nz = np.argwhere(off)
                if len(nz) == 0:
                    clean.append(None)
                    continue
                if len(nz) != 1:
                    raise ValueError("letter matrix is not one-hot")
                g = (int(nz[0][0]), int(nz[0][1]))
            i, j = int(g[0]), int(g[1])
            if i == j or not (0 <= i < self.m and 0 <= j < self.m):
                raise ValueError(f"bad CNOT letter {g} on {self.m} wires")
            clean.append((i, j))
        self.letters = clean

    def __len__(self):
        return len(self.letters)

    def letter_matrix(self, k: int) -> np.ndarray:
        mat = np.eye(self.m, dtype=np.uint8)
        g = self.letters[k]
        if g is not None:
            mat[g[0], g[1]] = 1
        return mat

    def reversed(self) -> "CnotWord":
        return CnotWord(self.m, self.letters[::-1])

    def __add__(self, other: "CnotWord") -> "CnotWord":
        if self.m != other.m:
            raise ValueError("word widths differ")
        return CnotWord(self.m, self.letters + other.letters)

    def gates(self) -> list:
        """Circuit in application order (last letter first)."""
        return [("CNOT", g[0], g[1]) for g in reversed(self.letters) if g is not None]

    def tableau(self) -> CliffordTableau:
        return from_circuit(self.m, self.gates())


def reference_solver(w: CnotWord) -> np.ndarray:
    """M_1 ... M_n over GF(2); right-multiplying by I + e_ij adds column i to column j."""
    out = np.eye(w.m, dtype=np.uint8)
    for g in w.letters:
        if g is not None:
            out[:, g[1]] ^= out[:, g[0]]
    return out


def tree_product(w: CnotWord) -> np.ndarray:
    mats = [w.letter_matrix(k) for k in range(len(w))] or [np.eye(w.m, dtype=np.uint8)]
    while len(mats) > 1:
        nxt = [gf2.matmul(mats[k], mats[k + 1]) for k in range(0, len(mats) - 1, 2)]
        if len(mats) % 2:
            nxt.append(mats[-1])
        mats = nxt
    return mats[0]


# -- three-cycle -------------------------------------------------------------------------

def swap_letters(a: int, b: int) -> list:
    return [(a, b), (b, a), (a, b)]


def cycle3_letters() -> list:
    """Fixed factorization: swap(1,2) swap(0,1) swap(1,2) swap(0,1)."""
    return swap_letters(1, 2) + swap_letters(0, 1) + swap_letters(1, 2) + swap_letters(0, 1)


def cycle3_matrix(m: int) -> np.ndarray:
    if m < 3:
        raise ValueError("need m >= 3")
    return reference_solver(CnotWord(m, cycle3_letters()))


def cycle3_tableau(m: int) -> CliffordTableau:
    return CnotWord(m, cycle3_letters()).tableau()


def classify_product(mat: np.ndarray) -> str | None:
    m = mat.shape[0]
    if (mat == np.eye(m, dtype=np.uint8)).all():
        return "identity"
    if m >= 3 and (mat == cycle3_matrix(m)).all():
        return "C3"
    return None


# -- promise instances --------------------------------------------------------------------

def random_cnot_letter(m: int, rng):
    i, j = rng.choice(m, size=2, replace=False)
    return int(i), int(j)


def gen_promise_instance(kind: str, n: int, m: int, rng) -> CnotWord:
    """Random u, then u reversed, then (for C3) the fixed cycle factorization, padded with identities."""
    if m < 3:
        raise ValueError("need m >= 3")
    if kind not in ("identity", "C3"):
        raise ValueError(f"unknown kind {kind!r}")
    tail = cycle3_letters() if kind == "C3" else []
    free = n - len(tail)
    if free < 0:
        raise ValueError(f"n must be at least {len(tail)} for kind {kind}")
    k = free // 2
    u = [random_cnot_letter(m, rng) for _ in range(k)]
    core = u + u[::-1] + tail
    pad = n - len(core)
    for _ in range(pad):
        pos = int(rng.integers(0, len(core) + 1))
        core.insert(pos, None)
    return CnotWord(m, core)


def gen_s6_promise_instance(kind: str, n: int, rng) -> list:
    if kind == "II":
        target = C2Coset.identity()
    elif kind == "HH":
        target = hh()
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return random_even_word(n, target, rng)


# -- layered DAGs ----------------------------------------------------------------------------

@dataclass
class LayeredDag:
    m: int
    layers: list  # A_1 .. A_n, each m x m; A_k[a, b] = edge from node a of layer k-1 to node b of layer k

    def __post_init__(self):
        self.layers = [np.asarray(a, dtype=np.uint8) & 1 for a in self.layers]
        for a in self.layers:
            if a.shape != (self.m, self.m):
                raise ValueError("layer matrix has the wrong shape")

    @property
    def n(self) -> int:
        return len(self.layers)


def random_ldag(n: int, m: int, rng, density: float = 0.5) -> LayeredDag:
    return LayeredDag(m, [(rng.random((m, m)) < density).astype(np.uint8) for _ in range(n)])


def ldag_path_parity(d: LayeredDag, source: int, target: int) -> int:
    if not (0 <= source < d.m and 0 <= target < d.m):
        raise IndexError("node index out of range")
    vec = np.zeros(d.m, dtype=np.uint8)
    vec[source] = 1
    for a in d.layers:
        vec = (vec.astype(np.int64) @ a.astype(np.int64) % 2).astype(np.uint8)
    return int(vec[target])


def count_paths(d: LayeredDag, source: int, target: int) -> int:
    """Plain path count by dynamic programming over integers."""
    vec = np.zeros(d.m, dtype=object)
    vec[source] = 1
    for a in d.layers:
        vec = np.array([sum(vec[i] * int(a[i, j]) for i in range(d.m)) for j in range(d.m)], dtype=object)
    return int(vec[target])


def ldag_block_matrix(d: LayeredDag) -> np.ndarray:
    """Upper unitriangular (n+1)m square matrix with A_k on block (k-1, k)."""
    m, n = d.m, d.n
    N = (n + 1) * m
    out = np.eye(N, dtype=np.uint8)
    for k, a in enumerate(d.layers):
        out[k * m:(k + 1) * m, (k + 1) * m:(k + 2) * m] = a
    return out


def unitriangular_letters(a: np.ndarray) -> list:
    """Letters whose product is a: a = C_N ... C_2 with C_j = prod_{i<j} (I + e_ij)^{a_ij}."""
    N = a.shape[0]
    if (np.tril(a, -1) != 0).any() or (np.diag(a) != 1).any():
        raise ValueError("matrix is not upper unitriangular")
    out = []
    for j in range(N - 1, 0, -1):
        for i in range(j):
            if a[i, j]:
                out.append((i, j))
    return out


def ldag_to_cnotword(d: LayeredDag, source: int = 0, target: int | None = None) -> CnotWord:
    """Word for the inverse block matrix, with source first and target last.

    Inverse block (i, j) is A_{i+1} ... A_j, so entry (0, N-1) of the
    product is the path parity from source to target.
    """
    target = d.m - 1 if target is None else target
    layers = [a.copy() for a in d.layers]
    if layers:
        p = list(range(d.m))
        p[0], p[source] = p[source], p[0]
        layers[0] = layers[0][p, :]
        q = list(range(d.m))
        q[-1], q[target] = q[target], q[-1]
        layers[-1] = layers[-1][:, q]
    block = ldag_block_matrix(LayeredDag(d.m, layers))
    letters = unitriangular_letters(block)
    return CnotWord(block.shape[0], letters[::-1])


def top_right(w: CnotWord) -> int:
    return int(reference_solver(w)[0, w.m - 1])


def cnotword_to_cycle_promise(w: CnotWord) -> CnotWord:
    """Word on m + 3 wires whose product is the three-cycle iff top_right(w) = 1, else identity.

    Wires 0..2 are fresh and w moves to 3..m+2.  With a the image of w's last
    wire and r the image of its first:
      B = w, (a, 0), w reversed, (a, 0)    -> I + c e_0^T with c_r = top_right(w)
      T = B, (1, r), B, (1, r)             -> (I + e_10)^top_right
      K = (0, 1), T, (0, 1)                -> swap(0, 1) when the bit is 1
      out = swap(1, 2), K, swap(1, 2), K
    """
    M = w.m + 3
    shifted = [None if g is None else (g[0] + 3, g[1] + 3) for g in w.letters]
    a, r = w.m + 2, 3
    if a == r:
        raise ValueError("need at least two wires")
    b = shifted + [(a, 0)] + shifted[::-1] + [(a, 0)]
    t = b + [(1, r)] + b + [(1, r)]
    k = [(0, 1)] + t + [(0, 1)]
    out = swap_letters(1, 2) + k + swap_letters(1, 2) + k
    return CnotWord(M, out)


# -- instance files --------------------------------------------------------------------------

def write_cnot_instance(w: CnotWord, kind: str, seed: int) -> str:
    lines = [f"# kind {kind}", f"# n {len(w)}", f"# m {w.m}", f"# seed {seed}"]
    lines += ["id" if g is None else f"{g[0]} {g[1]}" for g in w.letters]
    return "\n".join(lines) + "\n"


def read_cnot_instance(text: str):
    header, letters = {}, []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2:
                header[parts[0]] = parts[1]
            continue
        if line == "id":
            letters.append(None)
        else:
            i, j = line.split()
            letters.append((int(i), int(j)))
    m = int(header["m"])
    w = CnotWord(m, letters)
    if "n" in header and int(header["n"]) != len(w):
        raise ValueError("letter count does not match the header")
    return header, w


def word_product_kind(w: CnotWord) -> str | None:
    return classify_product(reference_solver(w))


def ldag_from_word_blocks(w: CnotWord, m: int, n: int) -> np.ndarray:
    """Block (0, n) of the word's product, for inspection."""
    prod = reference_solver(w)
    return prod[:m, n * m:(n + 1) * m]


def all_letters(m: int) -> list:
    return [(i, j) for i in range(m) for j in range(m) if i != j]


def random_cnot_word(n: int, m: int, rng, identity_rate: float = 0.0) -> CnotWord:
    out = []
    for _ in range(n):
        out.append(None if rng.random() < identity_rate else random_cnot_letter(m, rng))
    return CnotWord(m, out)


def is_legal(word: Sequence, m: int) -> bool:
    try:
        CnotWord(m, list(word))
    except ValueError:
        return False
    return True
