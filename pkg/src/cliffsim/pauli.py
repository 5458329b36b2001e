"""Pauli strings with exact phases.

A string on m qubits is stored as two int bitsets (bit j is qubit j) and an
exponent k so that the operator is i^k times the tensor product of the
literal letters.  The letter with both bits set is the literal Y matrix, so
Hermitian strings carry phase 0 or 2.  Products are computed in the XZ form
X^x Z^z, where a Y contributes an extra factor of i.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

_LETTERS = "IXZY"  # index = x + 2 z
_PHASE_TOKENS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PHASE_PRINT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_TEXT = re.compile(r"^([+-]?i?)([IXYZ]*)$")


def _popcount(v: int) -> int:
    return bin(v).count("1")


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PauliString:
    num_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.num_qubits < 0:
            raise ValueError("negative qubit count")
        full = (1 << self.num_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bits outside the register")
        if not 0 <= self.phase < 4:
            object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, m: int) -> "PauliString":
        return cls(m)

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        text = text.strip()
        found = _TEXT.match(text)
        if found is None:
            raise ValueError(f"not a Pauli string: {text!r}")
        tok, letters = found.groups()
        x = z = 0
        for j, ch in enumerate(letters):
            if ch in "XY":
                x |= 1 << j
            if ch in "ZY":
                z |= 1 << j
        return cls(len(letters), x, z, _PHASE_TOKENS[tok])

    @classmethod
    def single(cls, m: int, qubit: int, letter: str) -> "PauliString":
        if not 0 <= qubit < m:
            raise IndexError(qubit)
        bit = 1 << qubit
        return cls(m, bit if letter in "XY" else 0, bit if letter in "ZY" else 0)

    @classmethod
    def from_bits(cls, xs, zs, phase: int = 0) -> "PauliString":
        xs = list(np.asarray(xs, dtype=np.uint8).tolist())
        zs = list(np.asarray(zs, dtype=np.uint8).tolist())
        if len(xs) != len(zs):
            raise DimensionError("x and z lengths differ")
        x = sum(1 << j for j, b in enumerate(xs) if b)
        z = sum(1 << j for j, b in enumerate(zs) if b)
        return cls(len(xs), x, z, phase)

    @property
    def x_bits(self) -> np.ndarray:
        return np.array([(self.x >> j) & 1 for j in range(self.num_qubits)], dtype=np.uint8)

    @property
    def z_bits(self) -> np.ndarray:
        return np.array([(self.z >> j) & 1 for j in range(self.num_qubits)], dtype=np.uint8)

    def letter(self, j: int) -> str:
        return _LETTERS[((self.x >> j) & 1) + 2 * ((self.z >> j) & 1)]

    @property
    def letters(self) -> str:
        return "".join(self.letter(j) for j in range(self.num_qubits))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if self.phase % 2:
            raise ValueError("non-Hermitian string has no sign")
        return 1 - self.phase

    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    def __str__(self) -> str:
        return _PHASE_PRINT[self.phase] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def __neg__(self) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, (self.phase + 2) % 4)

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.num_qubits, self.x, self.z, phase % 4)

    def tensor(self, other: "PauliString") -> "PauliString":
        m = self.num_qubits
        return PauliString(m + other.num_qubits, self.x | (other.x << m),
                           self.z | (other.z << m), (self.phase + other.phase) % 4)

    def embed(self, m: int, qubits) -> "PauliString":
        """Place this string on the listed qubits of an m-qubit register."""
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> j) & 1) << q
            z |= ((self.z >> j) & 1) << q
        return PauliString(m, x, z, self.phase)

    def restrict(self, qubits) -> "PauliString":
        x = z = 0
        for j, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << j
            z |= ((self.z >> q) & 1) << j
        return PauliString(len(qubits), x, z, self.phase)


def xz_phase(p: PauliString) -> int:
    """Exponent k with p = i^k X^x Z^z."""
    return (p.phase + _popcount(p.x & p.z)) % 4


def from_xz(m: int, x: int, z: int, k: int) -> PauliString:
    """The string i^k X^x Z^z."""
    return PauliString(m, x, z, (k - _popcount(x & z)) % 4)


def _check(a: PauliString, b: PauliString):
    if a.num_qubits != b.num_qubits:
        raise DimensionError(f"{a.num_qubits} vs {b.num_qubits} qubits")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    _check(a, b)
    k = xz_phase(a) + xz_phase(b) + 2 * _popcount(a.z & b.x)
    return from_xz(a.num_qubits, a.x ^ b.x, a.z ^ b.z, k)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def canonical_rep(a: PauliString) -> PauliString:
    if a.phase == 0:
        return a
    return PauliString(a.num_qubits, a.x, a.z, 0)


def all_paulis(m: int, include_identity: bool = True):
    """All 4^m canonical strings, ordered by (x, z) bit value."""
    start = 0 if include_identity else 1
    for v in range(start, 4 ** m):
        yield PauliString(m, v & ((1 << m) - 1), v >> m)


def P(text: str) -> PauliString:
    return PauliString.from_str(text)
