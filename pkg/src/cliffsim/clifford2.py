"""Clifford groups modulo Paulis on one and two qubits, and C2/P2 as S6.

A coset is identified by its sign-free tableau.  The key of a coset is the
row-major bit string of its 2m x 2m matrix read as an integer (first entry
is the most significant bit); enumerations are sorted by key.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Sequence

import numpy as np

from .pauli import PauliString
from .tableau import (CliffordTableau, apply_gate, compose, conjugate, identity_tableau,
                      inverse as tab_inverse)


def _key_of_matrix(mat: np.ndarray) -> int:
    bits = mat.reshape(-1).tolist()
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


def _matrix_of_key(key: int, m: int) -> np.ndarray:
    n = 2 * m
    bits = [(key >> (n * n - 1 - i)) & 1 for i in range(n * n)]
    return np.array(bits, dtype=np.uint8).reshape(n, n)


class CosetGroup:
    """C_m / P_m for small m, enumerated by closure under a generating set."""

    def __init__(self, m: int, generators: Sequence[tuple]):
        self.m = m
        start = identity_tableau(m)
        seen = {start.key(): start}
        frontier = [start]
        while frontier:
            nxt = []
            for t in frontier:
                for g in generators:
                    u = apply_gate(t, g)
                    k = u.key()
                    if k not in seen:
                        seen[k] = u
                        nxt.append(u)
            frontier = nxt
        reps = list(seen.values())
        keyed = sorted(((_key_of_matrix(t.matrix), t) for t in reps), key=lambda kt: kt[0])
        self.keys = [k for k, _ in keyed]
        self.tableaux = [t for _, t in keyed]
        self.index_of_key = {k: i for i, k in enumerate(self.keys)}
        self.mats = np.array([t.matrix for t in self.tableaux], dtype=np.uint8)
        self.order = len(self.keys)
        n = 2 * m
        self._weights = (1 << np.arange(n * n - 1, -1, -1)).astype(np.int64)
        self._lookup = np.full(1 << (n * n), -1, dtype=np.int32)
        self._lookup[np.array(self.keys)] = np.arange(self.order, dtype=np.int32)
        self.identity = self.index(identity_tableau(m))
        self._mul = None
        self._inv = None
        self._act = None

    def index(self, t: CliffordTableau) -> int:
        return self.index_of_key[_key_of_matrix(t.matrix)]

    def index_of_matrix(self, mat: np.ndarray) -> int:
        return int(self.index_of_key[_key_of_matrix(np.asarray(mat, dtype=np.uint8))])

    def indices_of_matrices(self, mats: np.ndarray) -> np.ndarray:
        n = 2 * self.m
        flat = mats.reshape(-1, n * n).astype(np.int64)
        return self._lookup[flat @ self._weights]

    @property
    def mul_table(self) -> np.ndarray:
        """mul_table[a, b] = index of the operator product a.b (b acts first)."""
        if self._mul is None:
            n = 2 * self.m
            # row-vector convention: matrix of a.b is M_b @ M_a
            prod = np.einsum("bij,ajk->abik", self.mats.astype(np.int64), self.mats.astype(np.int64)) & 1
            self._mul = self.indices_of_matrices(prod.reshape(-1, n, n)).reshape(self.order, self.order)
            if (self._mul < 0).any():
                raise RuntimeError("enumeration not closed under products")
        return self._mul

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def product(self, word: Sequence[int]) -> int:
        acc = self.identity
        tab = self.mul_table
        for w in word:
            acc = int(tab[acc, w])
        return acc

    @property
    def inv_table(self) -> np.ndarray:
        if self._inv is None:
            tab = self.mul_table
            self._inv = np.argmax(tab == self.identity, axis=1).astype(np.int32)
        return self._inv

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    @property
    def act_table(self) -> np.ndarray:
        """act_table[u, p] = canonical index of u . P . u^dagger; p indexes (x | z << m)."""
        if self._act is None:
            m = self.m
            out = np.zeros((self.order, 4 ** m), dtype=np.int32)
            for u, mat in enumerate(self.mats):
                for p in range(4 ** m):
                    vec = np.array([(p >> j) & 1 for j in range(m)] + [(p >> (m + j)) & 1 for j in range(m)],
                                   dtype=np.int64)
                    img = vec @ mat.astype(np.int64) & 1
                    x = sum(int(img[j]) << j for j in range(m))
                    z = sum(int(img[m + j]) << j for j in range(m))
                    out[u, p] = x | (z << m)
            self._act = out
        return self._act

    def act(self, u: int, p: PauliString) -> PauliString:
        v = int(self.act_table[u, p.x | (p.z << self.m)])
        return PauliString(self.m, v & ((1 << self.m) - 1), v >> self.m)

    def tableau(self, u: int) -> CliffordTableau:
        return self.tableaux[u]


@lru_cache(maxsize=None)
def c1_group() -> CosetGroup:
    return CosetGroup(1, [("H", 0), ("Rz", 0)])


@lru_cache(maxsize=None)
def c2_group() -> CosetGroup:
    gens = [("H", 0), ("H", 1), ("Rz", 0), ("Rz", 1), ("CNOT", 0, 1), ("CZ", 0, 1), ("SWAP", 0, 1)]
    return CosetGroup(2, gens)


def c1_index(gates: Sequence[tuple]) -> int:
    t = identity_tableau(1)
    for g in gates:
        t = apply_gate(t, g)
    return c1_group().index(t)


def c2_index(gates: Sequence[tuple]) -> int:
    t = identity_tableau(2)
    for g in gates:
        t = apply_gate(t, g)
    return c2_group().index(t)


def c2_from_tableau(t: CliffordTableau) -> "C2Coset":
    return C2Coset(c2_group().index(t))


# -- the S6 picture ----------------------------------------------------------------

M_SETS_TEXT = (
    ("XI", "YI", "ZX", "ZY", "ZZ"),
    ("XI", "ZI", "YX", "YY", "YZ"),
    ("YI", "ZI", "XX", "XY", "XZ"),
    ("IX", "IY", "XZ", "YZ", "ZZ"),
    ("IX", "IZ", "XY", "YY", "ZY"),
    ("IY", "IZ", "XX", "YX", "ZX"),
)


@lru_cache(maxsize=None)
def m_sets() -> tuple:
    return tuple(frozenset(PauliString.from_str(s).key() for s in row) for row in M_SETS_TEXT)


@dataclass(frozen=True)
class S6Perm:
    image: tuple  # image[i] = p(i), 0-based

    def __post_init__(self):
        if sorted(self.image) != list(range(6)):
            raise ValueError("not a permutation of six points")

    def __mul__(self, other: "S6Perm") -> "S6Perm":
        return S6Perm(tuple(self.image[other.image[i]] for i in range(6)))

    @property
    def sign(self) -> int:
        seen, s = set(), 1
        for i in range(6):
            if i in seen:
                continue
            j, length = i, 0
            while j not in seen:
                seen.add(j)
                j = self.image[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s

    @classmethod
    def identity(cls) -> "S6Perm":
        return cls(tuple(range(6)))


@dataclass(frozen=True)
class C2Coset:
    index: int

    @property
    def key(self) -> int:
        return c2_group().keys[self.index]

    @property
    def tableau(self) -> CliffordTableau:
        return c2_group().tableaux[self.index]

    @property
    def matrix(self) -> np.ndarray:
        return c2_group().mats[self.index]

    @property
    def s6(self) -> S6Perm:
        return _s6_cache()[self.index]

    def __mul__(self, other: "C2Coset") -> "C2Coset":
        return C2Coset(c2_group().mul(self.index, other.index))

    def inverse(self) -> "C2Coset":
        return C2Coset(c2_group().inv(self.index))

    def act(self, p: PauliString) -> PauliString:
        return c2_group().act(self.index, p)

    @classmethod
    def identity(cls) -> "C2Coset":
        return cls(c2_group().identity)

    @classmethod
    def from_gates(cls, gates) -> "C2Coset":
        return cls(c2_index(gates))

    @classmethod
    def from_key(cls, key: int) -> "C2Coset":
        return cls(c2_group().index_of_key[key])


def _perm_of_matrix(mat: np.ndarray) -> tuple:
    sets = m_sets()
    where = {s: i for i, s in enumerate(sets)}
    img = []
    m64 = mat.astype(np.int64)
    for s in sets:
        mapped = set()
        for (x, z) in s:
            vec = np.array([x & 1, (x >> 1) & 1, z & 1, (z >> 1) & 1], dtype=np.int64)
            out = vec @ m64 & 1
            mapped.add((int(out[0]) | (int(out[1]) << 1), int(out[2]) | (int(out[3]) << 1)))
        fs = frozenset(mapped)
        if fs not in where:
            raise RuntimeError("conjugation does not permute the anticommuting sets")
        img.append(where[fs])
    return tuple(img)


@lru_cache(maxsize=None)
def _s6_cache() -> tuple:
    return tuple(S6Perm(_perm_of_matrix(mat)) for mat in c2_group().mats)


@lru_cache(maxsize=None)
def _perm_lookup() -> dict:
    return {p.image: i for i, p in enumerate(_s6_cache())}


def enumerate_c2_cosets() -> list:
    return [C2Coset(i) for i in range(c2_group().order)]


def to_s6(u: C2Coset) -> S6Perm:
    return _s6_cache()[u.index]


def from_s6(p: S6Perm) -> C2Coset:
    return C2Coset(_perm_lookup()[tuple(p.image)])


def is_even(u: C2Coset) -> bool:
    return to_s6(u).sign == 1


@lru_cache(maxsize=None)
def even_indices() -> np.ndarray:
    return np.array([i for i in range(c2_group().order) if _s6_cache()[i].sign == 1], dtype=np.int32)


def random_coset(rng) -> C2Coset:
    return C2Coset(int(rng.integers(0, c2_group().order)))


def random_even_coset(rng) -> C2Coset:
    order = c2_group().order
    while True:
        u = C2Coset(int(rng.integers(0, order)))
        if is_even(u):
            return u


def word_product(word: Sequence[C2Coset]) -> C2Coset:
    return C2Coset(c2_group().product([w.index for w in word]))


def random_even_word(n: int, target: C2Coset, rng) -> list:
    if n < 2:
        raise ValueError("word length must be at least 2")
    if not is_even(target):
        raise ValueError("target coset is odd")
    head = [random_even_coset(rng) for _ in range(n - 1)]
    last = word_product(head).inverse() * target
    return head + [last]


HADAMARD_PAIR = ("H", 0), ("H", 1)


def hh() -> C2Coset:
    return C2Coset.from_gates(HADAMARD_PAIR)


def write_word(word: Sequence[C2Coset], target: str) -> str:
    lines = [f"# target {target}", f"# length {len(word)}"]
    lines += [format(w.key, "04x") for w in word]
    return "\n".join(lines) + "\n"


def read_word(text: str):
    target, word = None, []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "target":
                target = parts[1]
            continue
        word.append(C2Coset.from_key(int(line, 16)))
    return target, word


# -- single qubit cosets -------------------------------------------------------------

C1_NAMES = {}


def c1_name(u: int) -> str:
    if not C1_NAMES:
        for name, gates in (("I", []), ("H", [("H", 0)]), ("S", [("Rz", 0)]),
                            ("HS", [("Rz", 0), ("H", 0)]), ("SH", [("H", 0), ("Rz", 0)]),
                            ("HSH", [("H", 0), ("Rz", 0), ("H", 0)])):
            C1_NAMES[c1_index(gates)] = name
    return C1_NAMES[u]


@lru_cache(maxsize=None)
def theta_yz() -> int:
    """The non-identity single-qubit coset fixing X (it swaps Y and Z)."""
    g = c1_group()
    x = PauliString.from_str("X")
    hits = [u for u in range(g.order) if u != g.identity and g.act(u, x) == x]
    if len(hits) != 1:
        raise RuntimeError("expected a unique X-fixing coset")
    return hits[0]


def perm_on_xyz(u: int) -> dict:
    g = c1_group()
    out = {}
    for letter in "XYZ":
        out[letter] = g.act(u, PauliString.from_str(letter)).letters
    return out


def all_s6_perms() -> list:
    return [S6Perm(p) for p in permutations(range(6))]


def group_inverse_tableau(t: CliffordTableau) -> CliffordTableau:
    return tab_inverse(t)


def conj(u: int, p: PauliString, group: CosetGroup | None = None) -> PauliString:
    return (group or c2_group()).act(u, p)


def exact_conj(t: CliffordTableau, p: PauliString) -> PauliString:
    return conjugate(t, p)


def compose_tableaux(first: CliffordTableau, second: CliffordTableau) -> CliffordTableau:
    return compose(first, second)
