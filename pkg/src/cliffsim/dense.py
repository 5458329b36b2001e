"""Dense statevector reference used by the tests.

Qubit j is bit j of the basis index.  Everything here is exponential in the
qubit count and capped at CAP qubits.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliString
from .tableau import Gate

CAP = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_ONE = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z, "H": _H, "Rz": _S, "Rzdg": _S.conj()}


class CapExceeded(ValueError):
    pass


def _cap(m: int, cap: int | None = None):
    if m > (CAP if cap is None else cap):
        raise CapExceeded(f"{m} qubits exceeds the dense cap")


def kron_list(mats_by_qubit: Sequence[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for mat in mats_by_qubit:
        out = np.kron(mat, out)
    return out


def pauli_matrix(p: PauliString) -> np.ndarray:
    _cap(p.num_qubits)
    mats = [_ONE[p.letter(j)] for j in range(p.num_qubits)]
    return (1j ** p.phase) * kron_list(mats)


def _basis_perm_2q(m: int, a: int, b: int, f) -> np.ndarray:
    dim = 1 << m
    u = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        out, amp = f(idx)
        u[out, idx] = amp
    return u


def gate_unitary(gate: Gate, m: int) -> np.ndarray:
    _cap(m)
    name = gate[0]
    if name in _ONE:
        mats = [_I2] * m
        mats = list(mats)
        mats[gate[1]] = _ONE[name]
        return kron_list(mats)
    a, b = gate[1], gate[2]
    if name == "CNOT":
        return _basis_perm_2q(m, a, b, lambda i: (i ^ (1 << b) if (i >> a) & 1 else i, 1))
    if name == "CZ":
        return _basis_perm_2q(m, a, b, lambda i: (i, -1 if (i >> a) & 1 and (i >> b) & 1 else 1))
    if name == "SWAP":
        def sw(i):
            ba, bb = (i >> a) & 1, (i >> b) & 1
            i &= ~((1 << a) | (1 << b))
            return i | (ba << b) | (bb << a), 1
        return _basis_perm_2q(m, a, b, sw)
    raise ValueError(name)


def circuit_unitary(m: int, gates: Iterable[Gate]) -> np.ndarray:
    u = np.eye(1 << m, dtype=complex)
    for g in gates:
        u = gate_unitary(g, m) @ u
    return u


def plus_state(m: int) -> np.ndarray:
    _cap(m)
    return np.full(1 << m, (1 / np.sqrt(2)) ** m, dtype=complex)


def zero_state(m: int) -> np.ndarray:
    _cap(m)
    v = np.zeros(1 << m, dtype=complex)
    v[0] = 1
    return v


def graph_state(adj: np.ndarray) -> np.ndarray:
    m = adj.shape[0]
    v = plus_state(m)
    for idx in range(1 << m):
        par = 0
        for a in range(m):
            if (idx >> a) & 1:
                for b in range(a + 1, m):
                    if adj[a, b] and (idx >> b) & 1:
                        par ^= 1
        if par:
            v[idx] = -v[idx]
    return v


def state_from_generators(gens: Sequence[PauliString]) -> np.ndarray:
    """The unique state fixed by the listed commuting generators."""
    m = gens[0].num_qubits if gens else 0
    _cap(m)
    proj = np.eye(1 << m, dtype=complex)
    for g in gens:
        proj = proj @ (np.eye(1 << m) + pauli_matrix(g)) / 2
    vals, vecs = np.linalg.eigh((proj + proj.conj().T) / 2)
    v = vecs[:, np.argmax(vals)]
    return v / np.linalg.norm(v)


def expectation(state: np.ndarray, p: PauliString) -> float:
    return float(np.real(np.vdot(state, pauli_matrix(p) @ state)))


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) < tol


def basis_change(m: int, qubits: Sequence[int], bases: Sequence[str]) -> np.ndarray:
    """Unitary after which Z-measurement of qubits equals measuring the bases."""
    gates = []
    for q, b in zip(qubits, bases):
        if b == "X":
            gates.append(("H", q))
        elif b == "Y":
            gates += [("Rzdg", q), ("H", q)]
    return circuit_unitary(m, gates)


def outcome_distribution(state: np.ndarray, qubits: Sequence[int], bases: Sequence[str]) -> dict:
    """Exact distribution over outcome bit tuples (0 is the +1 eigenvalue)."""
    m = int(np.log2(state.size))
    v = basis_change(m, qubits, bases) @ state
    probs: dict = {}
    for idx, amp in enumerate(v):
        p = abs(amp) ** 2
        if p < 1e-12:
            continue
        key = tuple((idx >> q) & 1 for q in qubits)
        probs[key] = probs.get(key, 0.0) + p
    return probs


def project(state: np.ndarray, qubits: Sequence[int], bases: Sequence[str], outcomes: Sequence[int]):
    """Unnormalised projection onto the given single-qubit outcomes."""
    m = int(np.log2(state.size))
    v = state.copy()
    for q, b, o in zip(qubits, bases, outcomes):
        p = PauliString.single(m, q, b)
        mat = pauli_matrix(p)
        v = (v + (1 - 2 * o) * (mat @ v)) / 2
    return v


def reduced_pure_state(state: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Pure state on `keep` for a state that is a product across the cut."""
    m = int(np.log2(state.size))
    rest = [q for q in range(m) if q not in keep]
    t = state.reshape([2] * m)
    # axis k of the reshaped tensor is qubit m-1-k
    order = [m - 1 - q for q in reversed(keep)] + [m - 1 - q for q in rest]
    mat = np.transpose(t, order).reshape(1 << len(keep), -1)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if len(s) > 1 and s[1] > 1e-8 * s[0]:
        raise ValueError("kept qubits are entangled with the rest")
    return u[:, 0]
