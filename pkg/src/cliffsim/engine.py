"""Fast logical-state engine for full-wire grid layouts.

The state on R logical wires is kept bit-sliced: X[r] and Z[r] are uint64
masks over the R generators (bit k = generator k) and S holds their signs.
Every gate is then a few word operations, independent of R.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .pauli import PauliString
from .stabilizer import StabilizerState, measure_pauli
from .tableau import CliffordTableau

MAX_ROWS = 64


@njit(cache=True)
def _columns(X, Z, S, basis, vedges, outcomes, c0, c1, byproduct):
    R = X.shape[0]
    s = S[0]
    for c in range(c0, c1):
        for r in range(R - 1):
            if vedges[r, c]:
                xa, xb, za, zb = X[r], X[r + 1], Z[r], Z[r + 1]
                s ^= xa & xb & (za ^ zb)
                Z[r] = za ^ xb
                Z[r + 1] = zb ^ xa
        for r in range(R):
            if basis[r, c]:
                s ^= X[r] & ~Z[r]
                Z[r] ^= X[r]
            s ^= X[r] & Z[r]
            t = X[r]
            X[r] = Z[r]
            Z[r] = t
            if byproduct and outcomes[r, c]:
                s ^= Z[r]
    S[0] = s


class LogicalState:
    """|+>^R evolved column by column; snapshot by copy()."""

    def __init__(self, rows: int):
        if rows > MAX_ROWS:
            raise ValueError("too many rows for the bit-sliced engine")
        self.rows = rows
        self.X = np.array([np.uint64(1) << np.uint64(r) for r in range(rows)], dtype=np.uint64)
        self.Z = np.zeros(rows, dtype=np.uint64)
        self.S = np.zeros(1, dtype=np.uint64)

    def copy(self) -> "LogicalState":
        out = LogicalState.__new__(LogicalState)
        out.rows = self.rows
        out.X, out.Z, out.S = self.X.copy(), self.Z.copy(), self.S.copy()
        return out

    def run(self, basis: np.ndarray, vedges: np.ndarray, outcomes: np.ndarray | None, c0: int, c1: int,
            byproduct: bool = True) -> None:
        """Columns [c0, c1): vertical CZs, J per row, then X^outcome per row."""
        b = np.ascontiguousarray(basis, dtype=np.uint8)
        v = np.ascontiguousarray(vedges, dtype=np.uint8)
        o = np.zeros((1, 1), dtype=np.uint8) if outcomes is None else np.ascontiguousarray(outcomes, dtype=np.uint8)
        _columns(self.X, self.Z, self.S, b, v, o, c0, c1, byproduct and outcomes is not None)

    def cz_column(self, vedges: np.ndarray, c: int) -> None:
        for r in range(self.rows - 1):
            if vedges[r, c]:
                xa, xb, za, zb = self.X[r], self.X[r + 1], self.Z[r], self.Z[r + 1]
                self.S[0] ^= xa & xb & (za ^ zb)
                self.Z[r] = za ^ xb
                self.Z[r + 1] = zb ^ xa

    def to_state(self) -> StabilizerState:
        R = self.rows
        X = [int(v) for v in self.X]
        Z = [int(v) for v in self.Z]
        s = int(self.S[0])
        gens = []
        for k in range(R):
            x = sum(((X[r] >> k) & 1) << r for r in range(R))
            z = sum(((Z[r] >> k) & 1) << r for r in range(R))
            gens.append(PauliString(R, x, z, 2 * ((s >> k) & 1)))
        return StabilizerState(R, tuple(gens))

    @classmethod
    def from_state(cls, st: StabilizerState) -> "LogicalState":
        R = st.num_qubits
        out = cls(R)
        X = [0] * R
        Z = [0] * R
        s = 0
        for k, g in enumerate(st.generators):
            for r in range(R):
                X[r] |= ((g.x >> r) & 1) << k
                Z[r] |= ((g.z >> r) & 1) << k
            s |= (g.phase // 2) << k
        out.X = np.array(X, dtype=np.uint64)
        out.Z = np.array(Z, dtype=np.uint64)
        out.S = np.array([s], dtype=np.uint64)
        return out


def measure_rows_z(st: StabilizerState, rng=None, greedy: bool = False) -> list:
    """Sequential Z measurements of every row; greedy picks 0 whenever the outcome is free."""
    bits = []
    for r in range(st.num_qubits):
        obs = PauliString.single(st.num_qubits, r, "Z")
        bit, _, post = measure_pauli(st, obs, rng, forced=0 if greedy else None)
        if isinstance(post, StabilizerState):
            st = post
        bits.append(bit)
    return bits


def apply_tableau(st: StabilizerState, t: CliffordTableau) -> StabilizerState:
    from .stabilizer import apply_clifford
    return apply_clifford(st, t)
