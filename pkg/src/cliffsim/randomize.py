"""Kilian randomization, the two NC1 self-reduction layers, and H_m arithmetic.

H_m is the abelian group <CZ, Rz> modulo Paulis.  An element is a symmetric
bit matrix S: S[i, j] = 1 (i != j) for CZ(i, j), S[i, i] = 1 for Rz(i).  It
sends X^x Z^z to X^x Z^(z + x S) up to phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import numpy as np

from . import gf2
from .clifford2 import c1_group, c2_group
from .pauli import PauliString
from .tableau import CliffordTableau, from_circuit, from_matrix


# -- H_m ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HmElement:
    m: int
    sym: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sym, dtype=np.uint8) & 1
        if s.shape != (self.m, self.m):
            raise ValueError("H_m matrix has the wrong shape")
        if (s != s.T).any():
            raise ValueError("H_m matrix must be symmetric")
        object.__setattr__(self, "sym", s)

    @classmethod
    def identity(cls, m: int) -> "HmElement":
        return cls(m, np.zeros((m, m), dtype=np.uint8))

    @classmethod
    def from_gates(cls, m: int, rz=(), cz=()) -> "HmElement":
        s = np.zeros((m, m), dtype=np.uint8)
        for i in rz:
            s[i, i] ^= 1
        for i, j in cz:
            if i == j:
                raise ValueError("CZ needs two distinct qubits")
            s[i, j] ^= 1
            s[j, i] ^= 1
        return cls(m, s)

    @property
    def matrix(self) -> np.ndarray:
        return self.sym

    def is_identity(self) -> bool:
        return not self.sym.any()

    def gates(self) -> list:
        out = [("Rz", i) for i in range(self.m) if self.sym[i, i]]
        out += [("CZ", i, j) for i in range(self.m) for j in range(i + 1, self.m) if self.sym[i, j]]
        return out

    def tableau(self) -> CliffordTableau:
        return from_circuit(self.m, self.gates())

    def act(self, p: PauliString) -> PauliString:
        """h . P . h^dagger, canonical."""
        x = p.x
        zx = 0
        for i in range(self.m):
            if (x >> i) & 1:
                for j in range(self.m):
                    if self.sym[i, j]:
                        zx ^= 1 << j
        return PauliString(self.m, x, p.z ^ zx)

    def __eq__(self, other):
        return isinstance(other, HmElement) and self.m == other.m and bool((self.sym == other.sym).all())

    def __hash__(self):
        return hash((self.m, self.sym.tobytes()))

    def __repr__(self):
        return f"HmElement({self.m}, {self.gates()})"


def hm_mul(a: HmElement, b: HmElement) -> HmElement:
    if a.m != b.m:
        raise ValueError("H_m elements on different widths")
    return HmElement(a.m, a.sym ^ b.sym)


def _cnot_matrix(m: int, c: tuple) -> np.ndarray:
    i, j = c
    if i == j or not (0 <= i < m and 0 <= j < m):
        raise IndexError(f"bad CNOT {c} on {m} wires")
    mat = np.eye(m, dtype=np.uint8)
    mat[i, j] = 1
    return mat


def conj_by_cnot(h: HmElement, c) -> HmElement:
    """CNOT(c) h CNOT(c): S -> M S M^T with M = I + e_ij (row i gains row j)."""
    if c is None:
        return h
    i, j = c
    _cnot_matrix(h.m, c)
    s = h.sym.copy()
    s[i, :] ^= s[j, :]
    s[:, i] ^= s[:, j]
    return HmElement(h.m, s)


def random_hm(m: int, rng) -> HmElement:
    return HmElement(m, gf2.random_symmetric(m, rng))


def h3_even_elements(m: int = 3) -> list:
    """All 32 elements of the even subgroup of H_3, embedded in H_m."""
    if m < 3:
        raise ValueError("need m >= 3")
    slots = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
    out = []
    for code in range(64):
        if bin(code).count("1") % 2:
            continue
        s = np.zeros((m, m), dtype=np.uint8)
        for k, (i, j) in enumerate(slots):
            if (code >> k) & 1:
                s[i, j] = s[j, i] = 1
        out.append(HmElement(m, s))
    return out


def sample_h3_even(rng, m: int = 3) -> HmElement:
    if m < 3:
        raise ValueError("need m >= 3")
    bits = rng.integers(0, 2, size=6)
    if bits[:5].sum() % 2:
        bits[5] = 1
    else:
        bits[5] = 0
    slots = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]
    s = np.zeros((m, m), dtype=np.uint8)
    for b, (i, j) in zip(bits, slots):
        if b:
            s[i, j] = s[j, i] = 1
    return HmElement(m, s)


# -- G_m letters ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GmLetter:
    """The operator CNOT(cnot) . h; cnot is None for the identity letter."""
    cnot: tuple | None
    h: HmElement

    @property
    def m(self) -> int:
        return self.h.m

    def gates(self) -> list:
        out = self.h.gates()
        if self.cnot is not None:
            out.append(("CNOT", int(self.cnot[0]), int(self.cnot[1])))
        return out

    def tableau(self) -> CliffordTableau:
        return from_circuit(self.m, self.gates())

    def __eq__(self, other):
        return isinstance(other, GmLetter) and self.cnot == other.cnot and self.h == other.h

    def __hash__(self):
        return hash((self.cnot, self.h))


def gm_word_tableau(word: Sequence[GmLetter]) -> CliffordTableau:
    """Tableau of the product w_1 ... w_n (w_n acts first)."""
    gates = []
    for w in reversed(word):
        gates += w.gates()
    return from_circuit(word[0].m, gates)


# -- abstract groups for Kilian ---------------------------------------------------------------

class S3Group:
    """Permutations of {0, 1, 2}; (a * b)(i) = a(b(i))."""

    elements = tuple(permutations(range(3)))
    identity = (0, 1, 2)

    def mul(self, a, b):
        return tuple(a[b[i]] for i in range(3))

    def inv(self, a):
        out = [0, 0, 0]
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    def sample_sub(self, rng):
        return self.elements[int(rng.integers(0, 6))]

    sample_f = sample_sub

    def act(self, f, x):
        return f[x]


class CosetOps:
    """C_m/P_m by coset index; H = F = the whole group, acting on Paulis by conjugation."""

    def __init__(self, grp=None):
        self.grp = c2_group() if grp is None else grp
        self.identity = self.grp.identity

    def mul(self, a, b):
        return self.grp.mul(a, b)

    def inv(self, a):
        return self.grp.inv(a)

    def sample_sub(self, rng):
        return int(rng.integers(0, self.grp.order))

    sample_f = sample_sub

    def act(self, f, p: PauliString) -> PauliString:
        return self.grp.act(f, p)


def C2Group() -> CosetOps:
    return CosetOps(c2_group())


def C1Group() -> CosetOps:
    return CosetOps(c1_group())


class GmGroup:
    """Letters of G_m randomized by H_m; F is the even subgroup of H_3."""

    def __init__(self, m: int):
        self.m = m
        self.identity = HmElement.identity(m)

    def mul(self, a, b):
        if isinstance(a, HmElement) and isinstance(b, HmElement):
            return hm_mul(a, b)
        if isinstance(a, HmElement):
            return GmLetter(b.cnot, hm_mul(conj_by_cnot(a, b.cnot), b.h))
        if isinstance(b, HmElement):
            return GmLetter(a.cnot, hm_mul(a.h, b))
        raise TypeError("only letter-by-subgroup products are supported")

    def inv(self, a):
        if isinstance(a, HmElement):
            return a
        raise TypeError("only subgroup elements are inverted")

    def sample_sub(self, rng):
        return random_hm(self.m, rng)

    def sample_f(self, rng):
        return sample_h3_even(rng, self.m)

    def act(self, f: HmElement, p: PauliString) -> PauliString:
        return f.act(p)


def kilian(group, word: Sequence, rng) -> list:
    """(g1 h1, h1^-1 g2 h2, ..., h_{n-1}^-1 g_n) with fresh uniform h_i."""
    n = len(word)
    if n == 0:
        raise ValueError("empty word")
    hs = [group.sample_sub(rng) for _ in range(n - 1)]
    out = []
    for i, g in enumerate(word):
        cur = g
        if i > 0:
            cur = group.mul(group.inv(hs[i - 1]), cur)
        if i < n - 1:
            cur = group.mul(cur, hs[i])
        out.append(cur)
    return out


def algorithm_B(inner: Callable, group, word: Sequence, rng, trivial_f: bool = False):
    """f^-1 . inner(Kilian(f g1, g2, ..., gn)) for a uniform f in F."""
    f = group.identity if trivial_f else group.sample_f(rng)
    first = group.mul(f, word[0])
    rand = kilian(group, [first] + list(word[1:]), rng)
    out = inner(rand)
    return group.act(group.inv(f), out)


# -- stabilizer-preserving randomization for NC1 --------------------------------------------

def sample_plus_preserving(rng, m: int = 2) -> CliffordTableau:
    """Uniform tableau fixing |+>^m mod Pauli.

    In the |0^m> frame: X block [A | S A^-T], Z block [0 | A^-T] with A
    invertible and S symmetric; then conjugated by H on every qubit.
    """
    a = gf2.random_invertible(m, rng)
    s = gf2.random_symmetric(m, rng)
    d = gf2.inverse(a).T.copy()
    b = gf2.matmul(s, d)
    mat = np.zeros((2 * m, 2 * m), dtype=np.uint8)
    mat[:m, :m] = a
    mat[:m, m:] = b
    mat[m:, m:] = d
    # H on every qubit swaps the x and z halves of both rows and columns
    perm = np.r_[np.arange(m, 2 * m), np.arange(m)]
    mat = mat[np.ix_(perm, perm)]
    return from_matrix(mat)


def sample_plus_preserving_coset(rng) -> int:
    return c2_group().index(sample_plus_preserving(rng, 2))


def algorithm_C_nc1(b_handle: Callable, word: Sequence[int], rng) -> PauliString:
    """Append a uniform |++>-preserving coset V and hand the word to B."""
    v = sample_plus_preserving_coset(rng)
    return b_handle(list(word) + [v])


def algorithm_C_parityL(b_handle: Callable, f: HmElement, g_word: Sequence) -> PauliString:
    """B on the palindrome g_1 .. g_n, f, g_n .. g_1 (CNOT letters are involutions)."""
    m = f.m
    ident = HmElement.identity(m)
    letters = [GmLetter(None if c is None else tuple(c), ident) for c in g_word]
    word = letters + [GmLetter(None, f)] + letters[::-1]
    return b_handle(word)


# -- array form of the G_m randomization -----------------------------------------------------

def random_symmetric_stack(k: int, m: int, rng) -> np.ndarray:
    u = np.triu(rng.integers(0, 2, size=(k, m, m), dtype=np.uint8))
    return u | np.transpose(np.triu(u, 1), (0, 2, 1))


def conj_stack(hs: np.ndarray, cnots: np.ndarray) -> np.ndarray:
    """conj_by_cnot applied letterwise; cnots rows are (i, j) or (-1, -1)."""
    out = hs.copy()
    ks = np.flatnonzero(cnots[:, 0] >= 0)
    if ks.size:
        i, j = cnots[ks, 0], cnots[ks, 1]
        out[ks, i, :] ^= out[ks, j, :]
        out[ks, :, i] ^= out[ks, :, j]
    return out


def kilian_gm_arrays(cnots: np.ndarray, hs: np.ndarray, rng, f: np.ndarray | None = None,
                     fresh: np.ndarray | None = None) -> np.ndarray:
    """Randomized H parts for the word f . w_1 ... w_n, CNOT parts unchanged.

    Letter i becomes (c_i, conj(prev_i, c_i) + h_i + next_i) with prev_1 = f,
    prev_i = next_{i-1} = fresh uniform h, next_n = 0.
    """
    n, m = hs.shape[0], hs.shape[1]
    fresh = random_symmetric_stack(n - 1, m, rng) if fresh is None else fresh
    prev = np.zeros_like(hs)
    nxt = np.zeros_like(hs)
    if f is not None:
        prev[0] = f
    prev[1:] = fresh
    nxt[:-1] = fresh
    return conj_stack(prev, cnots) ^ hs ^ nxt


def letters_to_arrays(word: Sequence[GmLetter]) -> tuple:
    m = word[0].m
    cn = np.full((len(word), 2), -1, dtype=np.int64)
    hs = np.zeros((len(word), m, m), dtype=np.uint8)
    for k, w in enumerate(word):
        if w.cnot is not None:
            cn[k] = w.cnot
        hs[k] = w.h.sym
    return cn, hs


def arrays_to_letters(cnots: np.ndarray, hs: np.ndarray) -> list:
    m = hs.shape[1]
    return [GmLetter(None if c[0] < 0 else (int(c[0]), int(c[1])), HmElement(m, h)) for c, h in zip(cnots, hs)]
