"""Sliding-window simulation of measured grid graph states.

Only two columns are ever live: column c is measured once every edge touching
it has been applied, then its qubits are decoupled and recycled for column
c + 2.  Generators are (x, z, s) int triples meaning (-1)^s times the
literal letter product, with Y = iXZ.
"""

from __future__ import annotations

import numpy as np

from .layout import MeasurementLayout
from .pauli import PauliString
from .stabilizer import (EMPTY, MeasurementRecord, StabilizerState, from_graph, measure_multi,
                         reduce_to)
from .tableau import CliffordTableau

_LETTERS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class Contradiction(Exception):
    """A forced outcome has probability zero."""


def _mul(x1, z1, s1, x2, z2, s2):
    x3, z3 = x1 ^ x2, z1 ^ z2
    k = (x1 & z1).bit_count() + (x2 & z2).bit_count() + 2 * (z1 & x2).bit_count() - (x3 & z3).bit_count()
    k %= 4
    if k & 1:
        raise RuntimeError("product of commuting Hermitian Paulis picked up a factor i")
    return x3, z3, (s1 + s2 + k // 2) & 1


class WindowSim:
    def __init__(self, n: int):
        self.n = n
        self.x = [1 << i for i in range(n)]
        self.z = [0] * n
        self.s = [0] * n

    # -- gates ----------------------------------------------------------------
    def cz(self, a: int, b: int) -> None:
        A, B = 1 << int(a), 1 << int(b)
        x, z, s = self.x, self.z, self.s
        for i in range(self.n):
            xi = x[i]
            xa, xb = xi & A, xi & B
            if not (xa or xb):
                continue
            zi = z[i]
            if xa and xb and (bool(zi & A) != bool(zi & B)):
                s[i] ^= 1
            if xb:
                zi ^= A
            if xa:
                zi ^= B
            z[i] = zi

    def gate(self, g) -> None:
        name = g[0]
        if name == "CZ":
            self.cz(g[1], g[2])
            return
        p = PauliString  # slow path for the rare non-CZ gate
        from .tableau import conjugate_by_gate
        for i in range(self.n):
            q = p(self.n, self.x[i], self.z[i], 2 * self.s[i])
            q = conjugate_by_gate(q, g)
            self.x[i], self.z[i], self.s[i] = q.x, q.z, q.phase // 2

    def clifford(self, t: CliffordTableau, slots) -> None:
        """Apply a tableau on the listed slots (slot k carries tableau qubit k)."""
        from .tableau import conjugate
        m = t.num_qubits
        for i in range(self.n):
            x, z = self.x[i], self.z[i]
            lx = sum(((x >> q) & 1) << k for k, q in enumerate(slots))
            lz = sum(((z >> q) & 1) << k for k, q in enumerate(slots))
            if not (lx or lz):
                continue
            # phase 0 is exactly the literal letters of the restriction
            img = conjugate(t, PauliString(m, lx, lz, 0))
            mask = sum(1 << q for q in slots)
            rx, rz = x & ~mask, z & ~mask
            for k, q in enumerate(slots):
                if (img.x >> k) & 1:
                    rx |= 1 << q
                if (img.z >> k) & 1:
                    rz |= 1 << q
            self.x[i], self.z[i] = rx, rz
            self.s[i] ^= img.phase // 2

    # -- measurement -------------------------------------------------------------
    def _anti(self, q: int, letter: str) -> list:
        ox, oz = _LETTERS[letter]
        Q = 1 << q
        out = []
        for i in range(self.n):
            gx, gz = bool(self.x[i] & Q), bool(self.z[i] & Q)
            if (gx and oz) != (gz and ox):
                out.append(i)
        return out

    def _solve(self, tx: int, tz: int):
        """Indices of generators whose product is (tx, tz) up to sign."""
        n = self.n
        basis = {}  # pivot bit -> (vec, combo)
        for i in range(n):
            v, c = self.x[i] | (self.z[i] << n), 1 << i
            while v:
                top = v.bit_length() - 1
                if top in basis:
                    bv, bc = basis[top]
                    v ^= bv
                    c ^= bc
                else:
                    basis[top] = (v, c)
                    break
        v, c = tx | (tz << n), 0
        while v:
            top = v.bit_length() - 1
            if top not in basis:
                return None
            bv, bc = basis[top]
            v ^= bv
            c ^= bc
        return [i for i in range(n) if (c >> i) & 1]

    def measure(self, q: int, letter: str, forced: int | None = None, rng=None):
        """Measure a single-qubit Pauli and decouple q; returns (bit, deterministic)."""
        ox, oz = _LETTERS[letter]
        Q = 1 << q
        obs = (ox * Q, oz * Q)
        anti = self._anti(q, letter)
        x, z, s = self.x, self.z, self.s
        if anti:
            p = anti[0]
            bit = int(rng.integers(0, 2)) if forced is None else int(forced)
            for k in anti[1:]:
                x[k], z[k], s[k] = _mul(x[k], z[k], s[k], x[p], z[p], s[p])
            x[p], z[p], s[p] = obs[0], obs[1], bit
            det = False
        else:
            combo = self._solve(*obs)
            if combo is None:
                raise RuntimeError("commuting observable outside the stabilizer group")
            px, pz, ps = 0, 0, 0
            for k in combo:
                px, pz, ps = _mul(px, pz, ps, x[k], z[k], s[k])
            bit = ps
            if forced is not None and int(forced) != bit:
                raise Contradiction(q)
            p = combo[0]
            x[p], z[p], s[p] = px, pz, ps
            det = True
        for k in range(self.n):
            if k != p and ((x[k] | z[k]) & Q):
                x[k], z[k], s[k] = _mul(x[k], z[k], s[k], x[p], z[p], s[p])
        self._pivot = p
        return bit, det

    def reset_plus(self, q: int) -> None:
        """Replace the decoupled generator on q by +X_q."""
        Q = 1 << q
        for i in range(self.n):
            if self.x[i] == (self.x[i] & Q) and self.z[i] == (self.z[i] & Q) and (self.x[i] | self.z[i]):
                self.x[i], self.z[i], self.s[i] = Q, 0, 0
                return
        raise RuntimeError(f"qubit {q} is not decoupled")

    def state(self, slots) -> StabilizerState:
        """State of `slots` (unentangled with the rest) as a StabilizerState."""
        gens = tuple(PauliString(self.n, self.x[i], self.z[i], 2 * self.s[i]) for i in range(self.n))
        return reduce_to(StabilizerState(self.n, gens), list(slots))


def window_run(layout: MeasurementLayout, basis=None, forced=None, rng=None, upto: int | None = None,
               final_clifford: CliffordTableau | None = None, final_forced=None):
    """Measure columns [0, upto) of the layout's measured set.

    forced: R x L outcome grid (255 = sample) or None.  For an unmeasured
    last column, final_clifford (on all rows) may be applied and then every
    row is measured in X, optionally forced by final_forced.
    Returns (outcome grid, final data) where final data is the residual
    StabilizerState on the last column, or the final X outcomes.
    """
    R, L = layout.rows, layout.cols
    basis = layout.basis if basis is None else np.asarray(basis)
    upto = L if upto is None else upto
    sim = WindowSim(2 * R)
    out = np.zeros((R, L), dtype=np.uint8)

    def slot(r, c):
        return (c % 2) * R + r

    for r in np.flatnonzero(layout.vedges[:, 0]):
        sim.cz(slot(r, 0), slot(r + 1, 0))
    for c in range(min(upto, L)):
        measured = bool(layout.rounds[:, c].all())
        if c + 1 < L and (measured or c + 1 < upto):
            for r in np.flatnonzero(layout.hedges[:, c]):
                sim.cz(slot(r, c), slot(r, c + 1))
            for r in np.flatnonzero(layout.vedges[:, c + 1]):
                sim.cz(slot(r, c + 1), slot(r + 1, c + 1))
        if not measured:
            if c != L - 1:
                raise ValueError("only the last column may be unmeasured")
            break
        for r in range(R):
            f = None if forced is None or forced[r, c] == 255 else int(forced[r, c])
            bit, _ = sim.measure(slot(r, c), "Y" if basis[r, c] else "X", f, rng)
            out[r, c] = bit
            sim.reset_plus(slot(r, c))
    last_slots = [slot(r, L - 1) for r in range(R)]
    if upto < L or bool(layout.rounds[:, L - 1].all()):
        return out, None
    if final_clifford is not None:
        sim.clifford(final_clifford, last_slots)
        bits = []
        for r in range(R):
            f = None if final_forced is None else int(final_forced[r])
            bit, _ = sim.measure(last_slots[r], "X", f, rng)
            bits.append(bit)
        return out, bits
    return out, sim.state(last_slots)


def postselect_ok(layout: MeasurementLayout, basis, grid, **kw) -> bool:
    try:
        window_run(layout, basis, forced=grid, **kw)
    except Contradiction:
        return False
    return True


def _record(layout: MeasurementLayout, grid: np.ndarray, basis) -> MeasurementRecord:
    qs, bs, os = [], [], []
    for v in range(layout.num_vertices):
        r, c = layout.coords(v)
        if layout.rounds[r, c]:
            qs.append(v)
            bs.append("Y" if basis[r, c] else "X")
            os.append(1 - 2 * int(grid[r, c]))
    return MeasurementRecord(qs, bs, os, [False] * len(qs))


def run_layout(layout: MeasurementLayout, rng, method: str = "window"):
    """Measure every non-output vertex; returns (MeasurementRecord, residual on the outputs)."""
    layout.check()
    if method == "window":
        grid, residual = window_run(layout, rng=rng)
        return _record(layout, grid, layout.basis), residual
    if method != "full":
        raise ValueError(method)
    s = from_graph(layout.adjacency())
    meas = [v for v in range(layout.num_vertices) if layout.rounds[layout.coords(v)]]
    bases = ["Y" if layout.basis[layout.coords(v)] else "X" for v in meas]
    rec, post = measure_multi(s, meas, bases, rng)
    if post is EMPTY:
        raise RuntimeError("sampling produced an empty state")
    return rec, reduce_to(post, list(layout.outputs))
