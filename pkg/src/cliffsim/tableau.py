"""Clifford operations as signed tableaux.

Row convention: rows 0..m-1 hold the images of X_0..X_{m-1}, rows m..2m-1
the images of Z_0..Z_{m-1}.  Each row is [x-part | z-part] and an image is
mapped by the row vector rule [x' z'] = [x z] M.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .pauli import DimensionError, PauliString, pauli_mul, xz_phase

Gate = tuple

ONE_QUBIT = ("H", "Rz", "Rzdg", "X", "Y", "Z")
TWO_QUBIT = ("CNOT", "CZ", "SWAP")


def H(i):
    return ("H", i)


def Rz(i):
    return ("Rz", i)


def Rzdg(i):
    return ("Rzdg", i)


def CNOT(i, j):
    return ("CNOT", i, j)


def CZ(i, j):
    return ("CZ", i, j)


def SWAP(i, j):
    return ("SWAP", i, j)


def _check_gate(gate: Gate, m: int):
    name = gate[0]
    if name in ONE_QUBIT:
        if len(gate) != 2 or not 0 <= gate[1] < m:
            raise IndexError(f"bad gate {gate} on {m} qubits")
    elif name in TWO_QUBIT:
        if len(gate) != 3 or not (0 <= gate[1] < m and 0 <= gate[2] < m) or gate[1] == gate[2]:
            raise IndexError(f"bad gate {gate} on {m} qubits")
    else:
        raise ValueError(f"unknown gate {name!r}")


def conjugate_by_gate(p: PauliString, gate: Gate) -> PauliString:
    """gate p gate^dagger with the exact phase."""
    _check_gate(gate, p.num_qubits)
    name = gate[0]
    x, z, flip = p.x, p.z, 0
    if name in ONE_QUBIT:
        b = 1 << gate[1]
        xa, za = bool(x & b), bool(z & b)
        if name == "H":
            flip = xa and za
            x = (x & ~b) | (b if za else 0)
            z = (z & ~b) | (b if xa else 0)
        elif name == "Rz":
            flip = xa and za
            if xa:
                z ^= b
        elif name == "Rzdg":
            flip = xa and not za
            if xa:
                z ^= b
        elif name == "X":
            flip = za
        elif name == "Z":
            flip = xa
        else:
            flip = xa != za
    else:
        a, c = 1 << gate[1], 1 << gate[2]
        xa, za, xb, zb = bool(x & a), bool(z & a), bool(x & c), bool(z & c)
        if name == "CNOT":
            flip = xa and zb and (xb == za)
            if xa:
                x ^= c
            if zb:
                z ^= a
        elif name == "CZ":
            flip = xa and xb and (za != zb)
            if xb:
                z ^= a
            if xa:
                z ^= c
        else:
            x = (x & ~(a | c)) | (c if xa else 0) | (a if xb else 0)
            z = (z & ~(a | c)) | (c if za else 0) | (a if zb else 0)
    return PauliString(p.num_qubits, x, z, (p.phase + 2 * flip) % 4)


def conjugate_by_circuit(p: PauliString, gates: Iterable[Gate]) -> PauliString:
    for g in gates:
        p = conjugate_by_gate(p, g)
    return p


@dataclass(frozen=True)
class CliffordTableau:
    num_qubits: int
    images: tuple  # 2m PauliStrings

    def __post_init__(self):
        if len(self.images) != 2 * self.num_qubits:
            raise DimensionError("need 2m generator images")

    # -- block views -----------------------------------------------------
    @property
    def matrix(self) -> np.ndarray:
        m = self.num_qubits
        out = np.zeros((2 * m, 2 * m), dtype=np.uint8)
        for i, img in enumerate(self.images):
            out[i, :m] = img.x_bits
            out[i, m:] = img.z_bits
        return out

    @property
    def A(self):
        m = self.num_qubits
        return self.matrix[:m, :m]

    @property
    def B(self):
        m = self.num_qubits
        return self.matrix[:m, m:]

    @property
    def C(self):
        m = self.num_qubits
        return self.matrix[m:, :m]

    @property
    def D(self):
        m = self.num_qubits
        return self.matrix[m:, m:]

    @property
    def signs(self) -> np.ndarray:
        return np.array([img.phase // 2 for img in self.images], dtype=np.uint8)

    def key(self) -> tuple:
        """Sign-free identity of the coset modulo Paulis."""
        return tuple((img.x, img.z) for img in self.images)

    def x_image(self, i: int) -> PauliString:
        return self.images[i]

    def z_image(self, i: int) -> PauliString:
        return self.images[self.num_qubits + i]

    def __call__(self, p: PauliString) -> PauliString:
        return conjugate(self, p)

    def to_text(self) -> str:
        m = self.num_qubits
        width = max(1, (2 * m + 3) // 4)
        lines = [str(m)]
        for img in self.images:
            lines.append(format(img.x | (img.z << m), f"0{width}x"))
        lines.append("".join(str(s) for s in self.signs.tolist()))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "CliffordTableau":
        rows = text.split()
        m = int(rows[0])
        signs = rows[1 + 2 * m] if m else ""
        images = []
        for i in range(2 * m):
            v = int(rows[1 + i], 16)
            images.append(PauliString(m, v & ((1 << m) - 1), v >> m, 2 * int(signs[i])))
        return cls(m, tuple(images))


def identity_tableau(m: int) -> CliffordTableau:
    imgs = [PauliString(m, 1 << i, 0) for i in range(m)]
    imgs += [PauliString(m, 0, 1 << i) for i in range(m)]
    return CliffordTableau(m, tuple(imgs))


def from_matrix(mat: np.ndarray, signs=None) -> CliffordTableau:
    mat = gf2.as_bits(mat)
    m = mat.shape[0] // 2
    if signs is None:
        signs = np.zeros(2 * m, dtype=np.uint8)
    imgs = []
    for i in range(2 * m):
        base = PauliString.from_bits(mat[i, :m], mat[i, m:])
        imgs.append(base.with_phase(2 * int(signs[i])))
    return CliffordTableau(m, tuple(imgs))


def conjugate(t: CliffordTableau, p: PauliString) -> PauliString:
    m = t.num_qubits
    if p.num_qubits != m:
        raise DimensionError(f"{m}-qubit tableau on {p.num_qubits}-qubit string")
    acc = PauliString(m, 0, 0, xz_phase(p))
    x, z = p.x, p.z
    j = 0
    while x:
        if x & 1:
            acc = pauli_mul(acc, t.images[j])
        x >>= 1
        j += 1
    j = 0
    while z:
        if z & 1:
            acc = pauli_mul(acc, t.images[m + j])
        z >>= 1
        j += 1
    return acc


def apply_gate(t: CliffordTableau, gate: Gate) -> CliffordTableau:
    """gate after t."""
    _check_gate(gate, t.num_qubits)
    return CliffordTableau(t.num_qubits, tuple(conjugate_by_gate(img, gate) for img in t.images))


def from_circuit(m: int, gates: Iterable[Gate]) -> CliffordTableau:
    """Tableau of the circuit whose first listed gate acts first."""
    t = identity_tableau(m)
    for g in gates:
        t = apply_gate(t, g)
    return t


def compose(t1: CliffordTableau, t2: CliffordTableau) -> CliffordTableau:
    """t2 after t1."""
    if t1.num_qubits != t2.num_qubits:
        raise DimensionError("tableau sizes differ")
    return CliffordTableau(t1.num_qubits, tuple(conjugate(t2, img) for img in t1.images))


def compose_all(ts: Sequence[CliffordTableau]) -> CliffordTableau:
    """Product in application order: ts[0] acts first."""
    out = ts[0]
    for t in ts[1:]:
        out = compose(out, t)
    return out


def is_symplectic(t) -> bool:
    mat = t.matrix if isinstance(t, CliffordTableau) else gf2.as_bits(t)
    m = mat.shape[0] // 2
    omega = np.zeros((2 * m, 2 * m), dtype=np.uint8)
    omega[:m, m:] = np.eye(m, dtype=np.uint8)
    omega[m:, :m] = np.eye(m, dtype=np.uint8)
    return np.array_equal(gf2.matmul(gf2.matmul(mat, omega), mat.T), omega)


def equal_mod_pauli(t1: CliffordTableau, t2: CliffordTableau) -> bool:
    if t1.num_qubits != t2.num_qubits:
        raise DimensionError("tableau sizes differ")
    return t1.key() == t2.key()


def pauli_tableau(p: PauliString) -> CliffordTableau:
    """Conjugation by the Pauli p itself."""
    m = p.num_qubits
    imgs = []
    for i in range(m):
        flip = (p.z >> i) & 1
        imgs.append(PauliString(m, 1 << i, 0, 2 * flip))
    for i in range(m):
        flip = (p.x >> i) & 1
        imgs.append(PauliString(m, 0, 1 << i, 2 * flip))
    return CliffordTableau(m, tuple(imgs))


def inverse(t: CliffordTableau) -> CliffordTableau:
    m = t.num_qubits
    mat = t.matrix
    omega = np.zeros((2 * m, 2 * m), dtype=np.uint8)
    omega[:m, m:] = np.eye(m, dtype=np.uint8)
    omega[m:, :m] = np.eye(m, dtype=np.uint8)
    inv0 = from_matrix(gf2.matmul(gf2.matmul(omega, mat.T), omega))
    back = compose(t, inv0)
    # back maps X_i / Z_i to +-X_i / +-Z_i; fix the signs with a Pauli applied afterwards
    x = z = 0
    for i in range(m):
        if back.images[i].phase:
            z |= 1 << i
        if back.images[m + i].phase:
            x |= 1 << i
    return compose(inv0, pauli_tableau(PauliString(m, x, z)))


def sign_free(t: CliffordTableau) -> CliffordTableau:
    return CliffordTableau(t.num_qubits, tuple(img.with_phase(0) for img in t.images))


def tensor(t1: CliffordTableau, t2: CliffordTableau) -> CliffordTableau:
    m1, m2 = t1.num_qubits, t2.num_qubits
    m = m1 + m2
    pad1 = PauliString(m2)
    pad0 = PauliString(m1)
    xs = [img.tensor(pad1) for img in t1.images[:m1]] + [pad0.tensor(img) for img in t2.images[:m2]]
    zs = [img.tensor(pad1) for img in t1.images[m1:]] + [pad0.tensor(img) for img in t2.images[m2:]]
    return CliffordTableau(m, tuple(xs + zs))


def embed(t: CliffordTableau, m: int, qubits: Sequence[int]) -> CliffordTableau:
    """Act with t on the listed qubits of an m-qubit register."""
    k = t.num_qubits
    base = identity_tableau(m)
    imgs = list(base.images)
    for j, q in enumerate(qubits):
        imgs[q] = t.images[j].embed(m, qubits)
        imgs[m + q] = t.images[k + j].embed(m, qubits)
    return CliffordTableau(m, tuple(imgs))
