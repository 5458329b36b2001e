"""The two-round simulation task: geometries, round-2 programs, provers, rewinding.

Three problem kinds share one column picture (see gadgets):

narrow  2 x (8n+10) grid; round 1 is the brickwork word on columns 0..8n,
        round 2 a 9-column tail (one hook block and a final column).
line    a line of 6n+4 vertices folded onto 2 x (3n+2); round 1 measures the
        3n+1 leftmost columns of both rows, round 2 applies a two-qubit
        Clifford to the middle pair and measures both in X.
wide    m x (c1 + 10); round 1 is the wide cluster word, round 2 a
        10-column tail on rows 0..2 measuring one pentagram line.

Every round-2 program measures Z on the logical rows after a Clifford W.
The observables W^-1 Z_r W are reported with the tail's Pauli-frame
correction, so the value of O_r is (-1)^(o_r + bx_r).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import gadgets as G
from .clifford2 import c1_group, c2_group, c2_index
from .clifford2 import theta_yz
from .contextuality import (canon, enumerate_pauli_lines, extract_nonstab_pentagram, extract_nonstab_square,
                            line_index, line_measurement_program, majority_line_extract, pentagram_lines,
                            recover_stabilizer_line, row_col_measurement_program, square_lines,
                            two_qubit_paulis)
from .engine import LogicalState
from .hardness import CnotWord, cycle3_tableau
from .graphsim import Contradiction, window_run
from .layout import MeasurementLayout, blank_layout
from .pauli import PauliString
from .randomize import (C1Group, C2Group, HmElement, algorithm_B, algorithm_C_nc1, h3_even_elements, kilian,
                        kilian_gm_arrays, sample_h3_even, sample_plus_preserving_coset)
from .stabilizer import StabilizerState, apply_clifford, measure_pauli
from .tableau import CliffordTableau, compose, conjugate, conjugate_by_gate, from_circuit, inverse


class ContractError(RuntimeError):
    """An interface used out of order or in a way it does not support."""


class NoCloning(ContractError):
    """The quantum prover cannot copy its post-round-1 state."""


# -- geometries ----------------------------------------------------------------------

@dataclass
class Geometry:
    kind: str
    rows: int
    round1_cols: int
    round2_cols: int
    vedges: np.ndarray
    header: dict = field(default_factory=dict)

    @property
    def cols(self) -> int:
        return self.round1_cols + self.round2_cols

    @property
    def tail_rows(self) -> tuple:
        return (0, 1, 2) if self.kind == "wide" else (0, 1)

    def layout(self, A: np.ndarray, B=None) -> MeasurementLayout:
        """Grid layout; for the line the last column stays unmeasured (the Clifford is applied there)."""
        R, c1 = self.rows, self.round1_cols
        lay = blank_layout(R, self.cols, measured_cols=self.cols)
        lay.vedges[:] = self.vedges
        lay.basis[:, :c1] = A
        lay.rounds[:, :c1] = 1
        if self.kind == "line":
            lay.rounds[:, c1:] = 0
            lay.outputs = [(self.cols - 1) * R + r for r in range(R)]
        else:
            lay.rounds[:, c1:] = 2
            if B is not None:
                lay.basis[:, c1:] = B
            else:
                lay.basis[:, c1:] = 0
            lay.outputs = []
        lay.header = {"kind": self.kind, **self.header}
        return lay

    def check_round1(self, A) -> np.ndarray:
        A = np.asarray(A, dtype=np.int8)
        if A.shape != (self.rows, self.round1_cols):
            raise ValueError(f"round-1 basis must be {self.rows} x {self.round1_cols}, got {A.shape}")
        if ((A != 0) & (A != 1)).any():
            raise ValueError("basis bits must be 0 or 1")
        return A

    def check_round2(self, B):
        if self.kind == "line":
            u = int(B)
            if not 0 <= u < c2_group().order:
                raise ValueError("round-2 challenge must be a two-qubit coset index")
            return u
        B = np.asarray(B, dtype=np.int8)
        if B.shape != (self.rows, self.round2_cols):
            raise ValueError(f"round-2 basis must be {self.rows} x {self.round2_cols}, got {B.shape}")
        if ((B != 0) & (B != 1)).any():
            raise ValueError("basis bits must be 0 or 1")
        return B


NARROW_TAIL = 9
WIDE_TAIL = 10
WIDE_TAIL_CZ_COLUMNS = (3, 6)


@lru_cache(maxsize=None)
def narrow_geometry(n: int) -> Geometry:
    c1 = 8 * n + 1
    v = np.zeros((1, c1 + NARROW_TAIL), dtype=np.uint8)
    for p in range(n + 1):
        for k in G.HOOK_VERTICAL_COLUMNS:
            v[0, 1 + 8 * p + k] = 1
    return Geometry("narrow", 2, c1, NARROW_TAIL, v, {"n": n})


@lru_cache(maxsize=None)
def line_geometry(n: int) -> Geometry:
    c1 = 3 * n + 1
    v = np.zeros((1, c1 + 1), dtype=np.uint8)
    v[0, c1] = 1
    return Geometry("line", 2, c1, 1, v, {"n": n, "line_vertices": 6 * n + 4})


@lru_cache(maxsize=None)
def wide_geometry(m: int, n: int) -> Geometry:
    hdr = G.wide_geometry_header(m, n)
    c1 = hdr["round1_columns"]
    _, v1 = G.wide_round1(m, np.zeros((n, G.wide_input_bits(m)), dtype=np.uint8))
    v = np.zeros((m - 1, c1 + WIDE_TAIL), dtype=np.uint8)
    v[:, :c1] = v1
    for t in WIDE_TAIL_CZ_COLUMNS:
        v[0, c1 + t] = v[1, c1 + t] = 1
    return Geometry("wide", m, c1, WIDE_TAIL, v, hdr)


def line_coordinates(n: int) -> dict:
    """Line vertex -> grid (row, column) of the folded embedding."""
    out = {}
    for c in range(3 * n + 2):
        out[c] = (0, c)
        out[6 * n + 3 - c] = (1, c)
    return out


# -- round-1 encodings ------------------------------------------------------------------

def narrow_round1(word: Sequence) -> np.ndarray:
    """Brickwork basis for g_1 ... g_n (the last-applied letter absorbs the H frame)."""
    n = len(word)
    ht = G.hook_table()
    grp = c2_group()
    hh = c2_index([("H", 0), ("H", 1)])
    idx = np.array([G._c2(g) for g in word], dtype=np.int64)
    idx[0] = grp.mul_table[hh, idx[0]]
    bits = ht[idx]  # (n, 16)
    blocks = np.zeros((n, 2, 8), dtype=np.int8)
    for k in range(4):
        blocks[:, 0, 2 * k] = bits[:, 4 * k]
        blocks[:, 1, 2 * k] = bits[:, 4 * k + 1]
        blocks[:, 0, 2 * k + 1] = bits[:, 4 * k + 2]
        blocks[:, 1, 2 * k + 1] = bits[:, 4 * k + 3]
    A = np.zeros((2, 8 * n + 1), dtype=np.int8)
    # g_n sits in the leftmost block
    A[:, 1:] = np.transpose(blocks[::-1], (1, 0, 2)).reshape(2, 8 * n)
    return A


def line_round1(U: Sequence, V: Sequence) -> np.ndarray:
    if len(U) != len(V):
        raise ValueError("both halves need the same length")
    n = len(U)
    A = np.zeros((2, 3 * n + 1), dtype=np.int8)
    for row, word in ((0, U), (1, V)):
        for i, g in enumerate(word):
            pos = n - 1 - i
            A[row, 1 + 3 * pos: 4 + 3 * pos] = G.line_block_bits(g, last=(i == 0))
    return A


def wide_inputs_from_arrays(cnots: np.ndarray, hs: np.ndarray) -> np.ndarray:
    n, m = hs.shape[0], hs.shape[1]
    bits = np.zeros((n, 2 * m * m), dtype=np.uint8)
    ks = np.flatnonzero(cnots[:, 0] >= 0)
    bits[ks, cnots[ks, 0] * m + cnots[ks, 1]] = 1
    bits[:, m * m:] = hs.reshape(n, m * m)
    return bits[::-1].copy()


def wide_round1_arrays(cnots: np.ndarray, hs: np.ndarray) -> np.ndarray:
    m = hs.shape[1]
    basis, _ = G.wide_round1(m, wide_inputs_from_arrays(cnots, hs))
    return basis


# -- round-2 programs -------------------------------------------------------------------------

@dataclass
class TailProgram:
    """A round-2 challenge together with what its answers mean.

    observables[r]: signed Pauli on the tail rows measured by final row r.
    frame: (tail outcome index -> final x-bit vector) as a bit matrix.
    members: list of (canonical Pauli, row mask, sign) decoded from the answer.
    """
    kind: str
    challenge: object
    observables: list
    frame: np.ndarray
    members: list

    def values(self, round2) -> list:
        o = np.asarray(round2, dtype=np.uint8)
        k = len(self.observables)
        if self.kind == "line":
            final = o.reshape(-1)[:k]
            bx = np.zeros(k, dtype=np.uint8)
        else:
            final = o[:k, -1]
            tail = o[:, :-1].reshape(-1)
            bx = (tail.astype(np.int64) @ self.frame.astype(np.int64) & 1).astype(np.uint8) if self.frame.size else 0
        bits = (final ^ bx)[:k]
        vals = 1 - 2 * bits.astype(np.int64)
        out = []
        for _, mask, sign in self.members:
            v = sign
            for r in range(k):
                if (mask >> r) & 1:
                    v *= int(vals[r])
            out.append(int(v))
        return out


def _tail_column_gates(rows: int, vedges: np.ndarray, basis: np.ndarray) -> list:
    cols = []
    for t in range(basis.shape[1]):
        gates = [("CZ", int(r), int(r) + 1) for r in np.flatnonzero(vedges[:, t])]
        for r in range(rows):
            gates += G.j_gates(int(basis[r, t]), r)
        cols.append(gates)
    return cols


def _frame_matrix(rows: int, col_gates: list) -> np.ndarray:
    """Bit matrix: tail outcome (r, t) for t < last  ->  x-bits of the frame before the final Z readout."""
    T = len(col_gates)
    out = np.zeros((rows * (T - 1), rows), dtype=np.uint8)
    for r in range(rows):
        for t in range(T - 1):
            p = PauliString.single(rows, r, "X")
            for later in col_gates[t + 1:]:
                for g in later:
                    p = conjugate_by_gate(p, g)
            out[r * (T - 1) + t] = [(p.x >> q) & 1 for q in range(rows)]
    return out


def _decode_members(observables: list, members: Sequence[PauliString]) -> list:
    k = len(observables)
    combos = {}
    for mask in range(1, 1 << k):
        acc = PauliString.identity(observables[0].num_qubits)
        for r in range(k):
            if (mask >> r) & 1:
                acc = acc * observables[r]
        combos[acc.key()] = (mask, acc.phase)
    out = []
    for p in members:
        if p.key() not in combos:
            raise RuntimeError(f"program does not measure {p.letters}")
        mask, phase = combos[p.key()]
        if phase % 2:
            raise RuntimeError("observable product is not Hermitian")
        out.append((p, mask, 1 if phase == 0 else -1))
    return out


def _observables(total: CliffordTableau, rows: Sequence[int]) -> list:
    inv = inverse(total)
    m = total.num_qubits
    out = []
    for r in rows:
        o = conjugate(inv, PauliString.single(m, r, "Z"))
        out.append(o)
    return out


def _restrict_all(obs: list, keep: Sequence[int]) -> list:
    out = []
    for o in obs:
        outside = sum(1 << q for q in range(o.num_qubits) if q not in keep)
        if (o.x | o.z) & outside:
            raise RuntimeError("observable leaks outside the tail rows")
        out.append(o.restrict(list(keep)))
    return out


def _narrow_program(u: int, members: Sequence[PauliString]) -> TailProgram:
    """Tail realizing W = u on the logical pair."""
    grp = c2_group()
    hh = c2_index([("H", 0), ("H", 1)])
    k = grp.mul(u, hh)
    B = np.zeros((2, NARROW_TAIL), dtype=np.int8)
    B[:, :8] = G.hook_block(G.hook_table()[k])
    v = np.zeros((1, NARROW_TAIL), dtype=np.uint8)
    for c in G.HOOK_VERTICAL_COLUMNS:
        v[0, c] = 1
    cols = _tail_column_gates(2, v, B)
    total = from_circuit(2, [g for col in cols for g in col])
    obs = _observables(total, (0, 1))
    return TailProgram("narrow", B, obs, _frame_matrix(2, cols), _decode_members(obs, members))


@lru_cache(maxsize=None)
def square_programs_narrow() -> tuple:
    """Rows 0..2 then columns 0..2 of the magic square."""
    return tuple(_narrow_program(row_col_measurement_program(i), square_lines()[i].members) for i in range(6))


@lru_cache(maxsize=None)
def line_programs_narrow() -> tuple:
    """One program per Pauli line, in enumerate_pauli_lines order."""
    return tuple(_narrow_program(line_measurement_program(i), enumerate_pauli_lines()[i].members)
                 for i in range(15))


def _line_kind_program(u: int, members) -> TailProgram:
    """Round-2 Clifford C = (H x H) u CZ, so that measuring X after C on CZ psi measures u."""
    cz = from_circuit(2, [("CZ", 0, 1)])
    hh_t = from_circuit(2, [("H", 0), ("H", 1)])
    c_tab = compose(compose(cz, c2_group().tableau(u)), hh_t)
    C = c2_group().index(c_tab)
    applied = c2_group().tableau(C)
    # state at the boundary is CZ psi; prover applies C then reads X = H then Z
    total = compose(compose(cz, applied), hh_t)
    obs = _observables(total, (0, 1))
    return TailProgram("line", C, obs, np.zeros((0, 2), dtype=np.uint8), _decode_members(obs, members))


@lru_cache(maxsize=None)
def square_programs_line() -> tuple:
    return tuple(_line_kind_program(row_col_measurement_program(i), square_lines()[i].members) for i in range(6))


def _local_segment(bits_per_row: Sequence[int]) -> np.ndarray:
    jjj = G.jjj_table()
    return np.array([jjj[u] for u in bits_per_row], dtype=np.int8)  # (rows, 3)


def _wide_tail_basis(m: int, s0, s1, s2, j9) -> np.ndarray:
    B = np.zeros((m, WIDE_TAIL), dtype=np.int8)
    B[:3, 0:3] = _local_segment(s0)
    B[:3, 3:6] = _local_segment(s1)
    B[:3, 6:9] = _local_segment(s2)
    B[:3, 9] = j9
    ident = G.jjj_table()[c1_group().identity]
    for r in range(3, m):
        for seg in range(3):
            B[r, 3 * seg: 3 * seg + 3] = ident
    return B


def _wide_tail_vedges(m: int) -> np.ndarray:
    v = np.zeros((m - 1, WIDE_TAIL), dtype=np.uint8)
    for t in WIDE_TAIL_CZ_COLUMNS:
        v[0, t] = v[1, t] = 1
    return v


def _search_negative_tail():
    """Local segments (s0, s1, s2) with J = H at the end measuring the negative pentagram line."""
    line = pentagram_lines()[4]
    group = set()
    gens = [p for p in line.members[:3]]
    for mask in range(8):
        acc = PauliString.identity(3)
        for k in range(3):
            if (mask >> k) & 1:
                acc = acc * gens[k]
        group.add(acc.key())
    g1 = c1_group()
    h = G.c1_by_name("H")
    ident = g1.identity
    candidates_s2 = [(ident, ident, ident), (h, h, h)]
    cz = [("CZ", 0, 1), ("CZ", 1, 2)]

    def local_inv(p: PauliString, us) -> PauliString:
        out = PauliString.identity(3)
        for q in range(3):
            letter = PauliString.single(1, 0, p.letter(q)) if p.letter(q) != "I" else None
            if letter is None:
                continue
            img = g1.act(g1.inv(us[q]), letter)
            out = out * img.embed(3, [q])
        return PauliString(3, out.x, out.z)

    def conj_cz(p: PauliString) -> PauliString:
        for g in cz:
            p = conjugate_by_gate(p, g)
        return PauliString(3, p.x, p.z)

    locals3 = [(a, b, c) for a in range(6) for b in range(6) for c in range(6)]
    for s2 in candidates_s2:
        base = []
        for r in range(3):
            z = PauliString.single(3, r, "Z")
            # undo J = H, then s2, then the CZs at the third segment boundary
            p = PauliString(3, z.z, z.x)
            p = conj_cz(local_inv(p, s2))
            base.append(p)
        for s1 in locals3:
            mid = [conj_cz(local_inv(p, s1)) for p in base]
            for s0 in locals3:
                fin = [local_inv(p, s0) for p in mid]
                keys = {q.key() for q in fin}
                if len(keys) == 3 and keys <= group:
                    # three distinct non-identity elements are independent unless they multiply to I
                    if (fin[0].x ^ fin[1].x ^ fin[2].x, fin[0].z ^ fin[1].z ^ fin[2].z) != (0, 0):
                        return s0, s1, s2
    raise RuntimeError("no local segments measure the negative line")


@lru_cache(maxsize=None)
def _negative_segments():
    return _search_negative_tail()


@lru_cache(maxsize=None)
def pentagram_programs(m: int) -> tuple:
    ident = c1_group().identity
    lines = pentagram_lines()
    progs = []
    for k, line in enumerate(lines):
        if k < 4:
            singles = [p for p in line.members if p.weight == 1]
            j9 = [0, 0, 0]
            for p in singles:
                q = [i for i in range(3) if p.letter(i) != "I"][0]
                j9[q] = 1 if p.letter(q) == "Y" else 0
            B = _wide_tail_basis(m, (ident,) * 3, (ident,) * 3, (ident,) * 3, j9)
        else:
            s0, s1, s2 = _negative_segments()
            B = _wide_tail_basis(m, s0, s1, s2, [0, 0, 0])
        cols = _tail_column_gates(m, _wide_tail_vedges(m), B)
        total = from_circuit(m, [g for col in cols for g in col])
        obs_full = _observables(total, range(m))
        obs = _restrict_all(obs_full[:3], (0, 1, 2))
        frame = _frame_matrix(m, cols)[:, :3]
        progs.append(TailProgram("wide", B, obs, frame, _decode_members(obs, line.members)))
    return tuple(progs)


# -- challenges and transcripts ---------------------------------------------------------------------

@dataclass
class Challenge:
    kind: str
    A: np.ndarray
    B: object = None

    def to_dict(self) -> dict:
        if self.B is None or isinstance(self.B, (int, np.integer)):
            b = None if self.B is None else int(self.B)
        else:
            b = np.asarray(self.B).tolist()
        return {"kind": self.kind, "A": np.asarray(self.A).tolist(), "B": b}


@dataclass
class Transcript:
    geometry: Geometry
    challenge: Challenge
    round1: np.ndarray
    round2: object = None

    def to_json(self) -> str:
        doc = {"geometry": {"kind": self.geometry.kind, "rows": self.geometry.rows,
                            "round1_cols": self.geometry.round1_cols, "round2_cols": self.geometry.round2_cols,
                            "header": self.geometry.header},
               "challenge": self.challenge.to_dict(),
               "round1": np.asarray(self.round1).tolist(),
               "round2": None if self.round2 is None else np.asarray(self.round2).tolist()}
        return json.dumps(doc, sort_keys=True)


def geometry_from_header(doc: dict) -> Geometry:
    kind, hdr = doc["kind"], doc["header"]
    if kind == "narrow":
        return narrow_geometry(int(hdr["n"]))
    if kind == "line":
        return line_geometry(int(hdr["n"]))
    if kind == "wide":
        return wide_geometry(int(hdr["m"]), int(hdr["n"]))
    raise ValueError(kind)


def transcript_from_json(text: str) -> Transcript:
    doc = json.loads(text)
    geo = geometry_from_header(doc["geometry"])
    ch = doc["challenge"]
    B = ch["B"]
    if B is not None and not isinstance(B, int):
        B = np.array(B, dtype=np.int8)
    r2 = doc["round2"]
    return Transcript(geo, Challenge(ch["kind"], np.array(ch["A"], dtype=np.int8), B),
                      np.array(doc["round1"], dtype=np.uint8), None if r2 is None else np.array(r2, dtype=np.uint8))


def verify_transcript(t: Transcript) -> bool:
    """Whether a faithful device could have produced these outcomes."""
    geo = t.geometry
    A = geo.check_round1(t.challenge.A)
    r1 = np.asarray(t.round1, dtype=np.uint8)
    if r1.shape != (geo.rows, geo.round1_cols):
        raise ValueError("round-1 outcomes have the wrong shape")
    lay = geo.layout(A, None if geo.kind == "line" else (t.challenge.B if t.round2 is not None else None))
    forced = np.full((geo.rows, geo.cols), 255, dtype=np.uint8)
    forced[:, :geo.round1_cols] = r1
    try:
        if t.round2 is None:
            window_run(lay, forced=forced, upto=geo.round1_cols, rng=np.random.default_rng(0))
            return True
        if geo.kind == "line":
            C = geo.check_round2(t.challenge.B)
            bits = np.asarray(t.round2, dtype=np.uint8).reshape(-1)
            if bits.shape != (geo.rows,):
                raise ValueError("round-2 outcomes have the wrong shape")
            window_run(lay, forced=forced, final_clifford=c2_group().tableau(C), final_forced=bits,
                       rng=np.random.default_rng(0))
            return True
        geo.check_round2(t.challenge.B)
        r2 = np.asarray(t.round2, dtype=np.uint8)
        if r2.shape != (geo.rows, geo.round2_cols):
            raise ValueError("round-2 outcomes have the wrong shape")
        forced[:, geo.round1_cols:] = r2
        window_run(lay, forced=forced, rng=np.random.default_rng(0))
        return True
    except Contradiction:
        return False


# -- provers -------------------------------------------------------------------------------

def _measure_rows(st: StabilizerState, letter: str, rows: int, rng, greedy: bool) -> np.ndarray:
    bits = np.zeros(rows, dtype=np.uint8)
    for r in range(rows):
        obs = PauliString.single(st.num_qubits, r, letter)
        bit, _, post = measure_pauli(st, obs, rng, forced=0 if greedy else None)
        if isinstance(post, StabilizerState):
            st = post
        bits[r] = bit
    return bits


class Prover:
    """Session interface: round1(A) then any number of round2(B) only through snapshots."""

    supports_snapshot = False

    def round1(self, A):
        raise NotImplementedError

    def round2(self, B):
        raise NotImplementedError

    def snapshot(self):
        raise NoCloning("this prover cannot copy its state")

    def restore(self, snap):
        raise NoCloning("this prover cannot copy its state")


class SimulatedProver(Prover):
    """Exact simulation of the measured grid.

    Every outcome outside the final readout is uniform and independent, so
    round 1 draws those bits and propagates the logical rows; the final
    readout is measured on the propagated state.  greedy=True answers 0
    whenever the outcome is free (the lexicographically smallest valid
    transcript).
    """

    def __init__(self, geometry: Geometry, rng=None, greedy: bool = False):
        self.geo = geometry
        self.rng = rng if rng is not None else np.random.default_rng()
        self.greedy = greedy
        self.state = None
        self.A = None
        self.spent = False

    def _bits(self, shape) -> np.ndarray:
        if self.greedy:
            return np.zeros(shape, dtype=np.uint8)
        return self.rng.integers(0, 2, size=shape, dtype=np.uint8)

    def round1(self, A):
        geo = self.geo
        A = geo.check_round1(A)
        out = self._bits((geo.rows, geo.round1_cols))
        st = LogicalState(geo.rows)
        basis = np.zeros((geo.rows, geo.cols), dtype=np.uint8)
        basis[:, :geo.round1_cols] = A
        grid = np.zeros((geo.rows, geo.cols), dtype=np.uint8)
        grid[:, :geo.round1_cols] = out
        st.run(basis, geo.vedges, grid, 0, geo.round1_cols)
        self.state, self.A, self.spent = st, A, False
        return out

    def _round2_from(self, st: LogicalState, B):
        geo = self.geo
        B = geo.check_round2(B)
        c1 = geo.round1_cols
        if geo.kind == "line":
            st = st.copy()
            st.cz_column(geo.vedges, geo.cols - 1)
            s = apply_clifford(st.to_state(), c2_group().tableau(B))
            return _measure_rows(s, "X", geo.rows, self.rng, self.greedy)
        basis = np.zeros((geo.rows, geo.cols), dtype=np.uint8)
        basis[:, c1:] = B
        out = np.zeros((geo.rows, geo.round2_cols), dtype=np.uint8)
        tail = self._bits((geo.rows, geo.round2_cols - 1))
        out[:, :-1] = tail
        grid = np.zeros((geo.rows, geo.cols), dtype=np.uint8)
        grid[:, c1:geo.cols - 1] = tail
        st = st.copy()
        st.run(basis, geo.vedges, grid, c1, geo.cols - 1)
        st.run(basis, geo.vedges, None, geo.cols - 1, geo.cols)
        out[:, -1] = _measure_rows(st.to_state(), "Z", geo.rows, self.rng, self.greedy)
        return out

    def round2(self, B):
        if self.state is None:
            raise ContractError("round 2 before round 1")
        if self.spent and not self.supports_snapshot:
            raise NoCloning("the post-round-1 state has already been measured")
        self.spent = True
        return self._round2_from(self.state, B)

    def residual(self) -> StabilizerState:
        """Logical state at the round boundary (for inspection)."""
        if self.state is None:
            raise ContractError("no round 1 yet")
        return self.state.to_state()


class HonestQuantumProver(SimulatedProver):
    """Faithful device: one round 2 per session, no copying."""


class HonestClassicalProver(SimulatedProver):
    """Same distribution, but the post-round-1 state can be snapshotted."""

    supports_snapshot = True

    def snapshot(self):
        return (self.state.copy(), self.A)

    def restore(self, snap):
        st, A = snap
        self.state, self.A = st.copy(), A


class LazyProver(HonestClassicalProver):
    """Deterministic: the lexicographically smallest valid outcome string."""

    def __init__(self, geometry: Geometry, rng=None):
        super().__init__(geometry, rng=np.random.default_rng(0), greedy=True)


def honest_prover(geometry: Geometry, rng=None, classical: bool = True) -> SimulatedProver:
    return HonestClassicalProver(geometry, rng) if classical else HonestQuantumProver(geometry, rng)


def lazy_adversarial_prover(geometry: Geometry, rng=None) -> LazyProver:
    return LazyProver(geometry)


class FaultyProver(Prover):
    """With probability eps per round-2 answer, flips one uniformly chosen bit of it."""

    def __init__(self, inner: Prover, eps: float, rng):
        if not 0 <= eps < 1:
            raise ValueError("eps must lie in [0, 1)")
        self.inner, self.eps, self.rng = inner, eps, rng
        self.supports_snapshot = inner.supports_snapshot
        self.faults = 0
        self.answers = 0

    def round1(self, A):
        return self.inner.round1(A)

    def round2(self, B):
        out = np.array(self.inner.round2(B), dtype=np.uint8)
        self.answers += 1
        if self.eps and self.rng.random() < self.eps:
            flat = out.reshape(-1)
            flat[int(self.rng.integers(0, flat.size))] ^= 1
            self.faults += 1
        return out

    def snapshot(self):
        return self.inner.snapshot()

    def restore(self, snap):
        self.inner.restore(snap)


def faulty_prover(inner: Prover, eps: float, rng) -> FaultyProver:
    return FaultyProver(inner, eps, rng)


class SampledProver(Prover):
    """Shifts a relational prover's outcomes by a stabilizer element drawn once per session.

    Vertex v's generator X_v prod_{u ~ v} Z_u flips the outcome of every
    neighbour and, when v is measured in Y, of v itself; a uniform product
    of generators maps any valid transcript to a uniform one on its coset.
    """

    def __init__(self, inner: Prover, geometry: Geometry, rng):
        if geometry.kind == "line":
            raise ValueError("the shift needs single-qubit X/Y readouts on every vertex")
        self.inner, self.geo, self.rng = inner, geometry, rng
        self.supports_snapshot = inner.supports_snapshot
        self.r = None
        self.parity = None

    def round1(self, A):
        geo = self.geo
        self.r = self.rng.integers(0, 2, size=(geo.rows, geo.cols), dtype=np.uint8)
        lay = geo.layout(geo.check_round1(A))
        self.parity = lay.neighbour_parity(self.r)
        out = np.array(self.inner.round1(A), dtype=np.uint8)
        c1 = geo.round1_cols
        shift = self.parity[:, :c1] ^ (self.r[:, :c1] & np.asarray(A, dtype=np.uint8))
        return out ^ shift

    def round2(self, B):
        geo = self.geo
        out = np.array(self.inner.round2(B), dtype=np.uint8)
        c1 = geo.round1_cols
        shift = self.parity[:, c1:] ^ (self.r[:, c1:] & np.asarray(B, dtype=np.uint8))
        return out ^ shift

    def snapshot(self):
        return (self.inner.snapshot(), self.r.copy(), self.parity.copy())

    def restore(self, snap):
        inner, r, par = snap
        self.inner.restore(inner)
        self.r, self.parity = r.copy(), par.copy()


def samp_from_rel(inner_factory: Callable, geometry: Geometry, rng) -> SampledProver:
    return SampledProver(inner_factory(geometry), geometry, rng)


class RewindOracle:
    """Commits round 1 once, then answers round-2 challenges from the same snapshot."""

    def __init__(self, prover: Prover):
        if not prover.supports_snapshot:
            raise NoCloning("rewinding needs a prover whose state can be copied")
        self.prover = prover
        self.snap = None
        self.round1 = None
        self.challenge = None
        self.queries = 0

    def start(self, A) -> np.ndarray:
        out = self.prover.round1(A)
        self.round1 = np.array(out, dtype=np.uint8)
        self.snap = self.prover.snapshot()
        self.challenge = np.array(A)
        return self.round1.copy()

    def query(self, B):
        if self.snap is None:
            raise ContractError("rewind before round 1")
        self.prover.restore(self.snap)
        self.queries += 1
        return self.prover.round2(B)


def rewind(oracle: RewindOracle, B):
    return oracle.query(B)


def run_session(prover: Prover, geometry: Geometry, A, B) -> Transcript:
    r1 = prover.round1(A)
    r2 = prover.round2(B)
    return Transcript(geometry, Challenge(geometry.kind, np.asarray(A), B), r1, r2)


# -- extraction drivers ----------------------------------------------------------------------

ProverFactory = Callable[[Geometry], Prover]


@dataclass
class ExtractConfig:
    """Sample counts for the two parity steps."""
    parity_step1: int = 16
    parity_step2: int = 64


def _bump(stats, key, k=1):
    if stats is not None:
        stats[key] = stats.get(key, 0) + k


def _session(factory: ProverFactory, geo: Geometry, A, stats) -> RewindOracle:
    oracle = RewindOracle(factory(geo))
    oracle.start(A)
    _bump(stats, "round1")
    return oracle


def _ask(oracle: RewindOracle, prog: TailProgram, stats) -> list:
    _bump(stats, "round2")
    return prog.values(oracle.query(prog.challenge))


# narrow

def algorithm_A_narrow(factory: ProverFactory, word: Sequence, stats=None) -> PauliString:
    """A non-stabilizer of g_1 ... g_n |++> from the six square programs."""
    oracle = _session(factory, narrow_geometry(len(word)), narrow_round1(word), stats)
    progs = square_programs_narrow()
    vals = [_ask(oracle, p, stats) for p in progs]
    return extract_nonstab_square(vals[:3], vals[3:])


def _pauli_labels(stabs) -> frozenset:
    return frozenset(p.letters for p in two_qubit_paulis()) - frozenset(stabs)


NC1_STABILIZERS = {"II": ("XI", "IX", "XX"), "HH": ("ZI", "IZ", "ZZ")}


def _coset_ints(word) -> list:
    return [G._c2(g) for g in word]


def nc1_sample(factory: ProverFactory, word: Sequence, rng, stats=None) -> PauliString:
    """One run of C(B(A)): a non-stabilizer of the word's state on |++>."""
    grp = C2Group()
    inner = lambda w: algorithm_A_narrow(factory, w, stats)
    handle = lambda w: algorithm_B(inner, grp, w, rng)
    _bump(stats, "calls")
    return algorithm_C_nc1(handle, _coset_ints(word), rng)


def extract_nc1(factory: ProverFactory, word: Sequence, rng, calls: int | None = None, stats=None) -> str:
    """II, HH, or unknown; a definite answer needs all 12 non-stabilizers of that state."""
    n = len(word)
    budget = calls if calls is not None else int(np.ceil(40 * np.log2(max(n, 2))))
    need = {k: _pauli_labels(v) for k, v in NC1_STABILIZERS.items()}
    seen = set()
    for _ in range(budget):
        seen.add(nc1_sample(factory, word, rng, stats).letters)
        for cand, ns in need.items():
            if ns <= seen:
                if stats is not None:
                    stats["seen"] = sorted(seen)
                return cand
    if stats is not None:
        stats["seen"] = sorted(seen)
    return "unknown"


def algorithm_A_narrow_lines(factory: ProverFactory, word: Sequence, rng, stats=None) -> int:
    """Majority vote over all 15 line programs; index of a violated line."""
    oracle = _session(factory, narrow_geometry(len(word)), narrow_round1(word), stats)
    tables = {p.key(): [] for p in two_qubit_paulis()}
    lines = enumerate_pauli_lines()
    for k, prog in enumerate(line_programs_narrow()):
        for p, v in zip(lines[k].members, _ask(oracle, prog, stats)):
            tables[p.key()].append(v)
    return line_index(majority_line_extract(tables, rng))


def _line_image(grp, u: int, idx: int) -> int:
    members = enumerate_pauli_lines()[idx].members
    keys = frozenset(grp.act(u, p).key() for p in members)
    for i, l in enumerate(enumerate_pauli_lines()):
        if frozenset(p.key() for p in l.members) == keys:
            return i
    raise RuntimeError("coset does not map lines to lines")


def nc1_line_sample(factory: ProverFactory, word: Sequence, rng, stats=None) -> int:
    grp = C2Group()
    w = _coset_ints(word) + [sample_plus_preserving_coset(rng)]
    f = grp.sample_f(rng)
    rand = kilian(grp, [grp.mul(f, w[0])] + w[1:], rng)
    _bump(stats, "calls")
    return _line_image(grp, grp.inv(f), algorithm_A_narrow_lines(factory, rand, rng, stats))


def extract_nc1_tolerant(factory: ProverFactory, word: Sequence, rng, samples: int | None = None,
                         stats=None) -> str:
    """Recovers the stabilizer line from how often each line is reported violated."""
    budget = samples if samples is not None else max(4 * len(word), 200)
    counts = [0] * 15
    for _ in range(budget):
        counts[nc1_line_sample(factory, word, rng, stats)] += 1
    best = recover_stabilizer_line(counts)
    if stats is not None:
        stats["counts"] = counts
        stats["line"] = best
    members = set(enumerate_pauli_lines()[best].labels)
    for cand, stabs in NC1_STABILIZERS.items():
        if members == set(stabs):
            return cand
    return "unknown"


# wide / parity

def algorithm_A_wide(factory: ProverFactory, cnots: np.ndarray, hs: np.ndarray, stats=None) -> PauliString:
    """Pentagram non-stabilizer of the state on rows 0..2 (a 3-qubit Pauli)."""
    m = hs.shape[1]
    oracle = _session(factory, wide_geometry(m, hs.shape[0]), wide_round1_arrays(cnots, hs), stats)
    quads = [_ask(oracle, p, stats) for p in pentagram_programs(m)]
    return extract_nonstab_pentagram(quads)


def palindrome_arrays(word: CnotWord, f: HmElement) -> tuple:
    """g_1 .. g_n, f, g_n .. g_1 as (cnots, hs) arrays."""
    m, n = word.m, len(word)
    cn = np.full((2 * n + 1, 2), -1, dtype=np.int64)
    for k, g in enumerate(word.letters):
        if g is not None:
            cn[k] = g
            cn[2 * n - k] = g
    hs = np.zeros((2 * n + 1, m, m), dtype=np.uint8)
    hs[n] = f.sym
    return cn, hs


def parity_sample(factory: ProverFactory, word: CnotWord, f: HmElement, rng, stats=None) -> PauliString:
    """One run of C(B(A)) with middle letter f: a non-stabilizer of (pi f pi^-1)|+++> on rows 0..2."""
    m = word.m
    cn, hs = palindrome_arrays(word, f)
    g = sample_h3_even(rng, m)
    rand = kilian_gm_arrays(cn, hs, rng, f=g.sym)
    _bump(stats, "calls")
    p = algorithm_A_wide(factory, cn, rand, stats).embed(m, [0, 1, 2])
    return canon(g.act(p)).restrict([0, 1, 2])


def _stab_keys(t: CliffordTableau) -> frozenset:
    out = set()
    for mask in range(1, 8):
        acc = PauliString.identity(3)
        for q in range(3):
            if (mask >> q) & 1:
                acc = acc * conjugate(t, PauliString.single(3, q, "X"))
        out.add(acc.key())
    return frozenset(out)


@lru_cache(maxsize=None)
def parity_witnesses() -> tuple:
    """Per even f in H_3: Paulis stabilizing pi f pi^-1 |+++> but not f |+++>."""
    pi = cycle3_tableau(3)
    out = []
    for f in h3_even_elements(3):
        ft = f.tableau()
        # pi f pi^-1 as a circuit: pi^-1 first
        c3 = compose(compose(inverse(pi), ft), pi)
        out.append((f, _stab_keys(c3) - _stab_keys(ft)))
    return tuple(out)


def parity_distinguisher(P: PauliString) -> tuple:
    """(f, witness set) with f . P a witness, preferring the largest set."""
    best = None
    for f, wit in parity_witnesses():
        if canon(f.act(P)).key() in wit and (best is None or len(wit) > len(best[1])):
            best = (f, wit)
    if best is None:
        raise RuntimeError(f"no distinguisher for {P.letters}")
    return best


def choose_distinguisher(samples: Sequence[PauliString]) -> tuple:
    """The f whose witness set holds f . P for the most step-1 samples P."""
    best, score = None, -1
    for f, wit in parity_witnesses():
        s = sum(canon(f.act(P)).key() in wit for P in samples)
        if s > score:
            best, score = (f, wit), s
    return best


def extract_parityL(factory: ProverFactory, word: CnotWord, rng, config: ExtractConfig | None = None,
                    stats=None) -> str:
    """identity or C3; 'identity' only on a witness no C3 instance can produce."""
    cfg = config or ExtractConfig()
    m = word.m
    if m < 3:
        raise ValueError("need m >= 3")
    ident = HmElement.identity(m)
    step1 = [parity_sample(factory, word, ident, rng, stats) for _ in range(cfg.parity_step1)]
    f3, wit = choose_distinguisher(step1)
    f = HmElement(m, np.pad(f3.sym, ((0, m - 3), (0, m - 3))))
    if stats is not None:
        stats["step1"] = [p.letters for p in step1]
        stats["f"] = f3.sym.tolist()
    for k in range(cfg.parity_step2):
        q = parity_sample(factory, word, f, rng, stats)
        if q.key() in wit:
            if stats is not None:
                stats["witness"] = q.letters
                stats["step2"] = k + 1
            return "identity"
    if stats is not None:
        stats["step2"] = cfg.parity_step2
    return "C3"


# line

def algorithm_A_line(factory: ProverFactory, U: Sequence, V: Sequence, stats=None) -> PauliString:
    oracle = _session(factory, line_geometry(len(U)), line_round1(U, V), stats)
    vals = [_ask(oracle, p, stats) for p in square_programs_line()]
    return extract_nonstab_square(vals[:3], vals[3:])


def line_sample(factory: ProverFactory, U: Sequence, V: Sequence, rng, stats=None) -> str:
    """Two-letter non-stabilizer of U|+> (x) V|+>, after reversal, end and Kilian randomization."""
    g1 = c1_group()
    grp = C1Group()
    U, V = [G._c1(u) for u in U], [G._c1(v) for v in V]
    rev = bool(rng.integers(0, 2))
    if rev:
        U, V = V, U
    th = theta_yz()
    if rng.integers(0, 2):
        U[-1] = g1.mul(U[-1], th)
    if rng.integers(0, 2):
        V[-1] = g1.mul(V[-1], th)
    f1, f2 = grp.sample_f(rng), grp.sample_f(rng)
    U2 = kilian(grp, [g1.mul(f1, U[0])] + U[1:], rng)
    V2 = kilian(grp, [g1.mul(f2, V[0])] + V[1:], rng)
    _bump(stats, "calls")
    p = algorithm_A_line(factory, U2, V2, stats)
    letters = []
    for q, f in ((0, f1), (1, f2)):
        a = p.letter(q)
        letters.append(a if a == "I" else g1.act(g1.inv(f), PauliString.from_str(a)).letters)
    if rev:
        letters = letters[::-1]
    return "".join(letters)


def line_reference(U: Sequence, V: Sequence) -> tuple:
    """Stabilizer axes (mod sign) of U|+> and V|+>."""
    g1 = c1_group()
    x = PauliString.from_str("X")
    return tuple(g1.act(g1.product([G._c1(u) for u in w]), x).letters for w in (U, V))


def extract_ac0mod6(factory: ProverFactory, U: Sequence, V: Sequence, rng, budget: int = 400,
                    stats=None):
    """(axis of U|+>, axis of V|+>) once a single product state is consistent, else 'unknown'.

    A product state with axes (a, b) is stabilized by aI, Ib and ab; it is
    ruled out as soon as one of those is reported as a non-stabilizer.
    """
    if len(U) != len(V) or not U:
        raise ValueError("need two non-empty words of equal length")
    alive = {(a, b): {a + "I", "I" + b, a + b} for a in "XYZ" for b in "XYZ"}
    seen = set()
    for _ in range(budget):
        seen.add(line_sample(factory, U, V, rng, stats))
        alive = {k: s for k, s in alive.items() if not (s & seen)}
        if len(alive) <= 1:
            break
    if stats is not None:
        stats["seen"] = sorted(seen)
    if len(alive) == 1:
        return next(iter(alive))
    return "unknown"
