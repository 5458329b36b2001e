"""Compiling Clifford words into grid layouts with X/Y measurement patterns.

Column picture.  Every layout has a full horizontal wire per row, so it acts
on one logical qubit per row.  Column c first applies its vertical CZs; then
measuring (r, c) in X (bit 0) or Y (bit 1) teleports row r through
J(0) = H or J(1) = H Sdg, leaving a byproduct X^s one column later.  An
unmeasured last column holds the output.

Word convention: a word (g_1, ..., g_n) denotes the operator g_1 ... g_n, so
g_n acts first and sits in the leftmost block.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .clifford2 import C2Coset, c1_group, c1_index, c2_group, c2_index
from .layout import MeasurementLayout, blank_layout
from .pauli import PauliString
from .tableau import CliffordTableau, conjugate_by_gate, from_circuit


def j_gates(bit: int, q: int) -> list:
    return [("H", q)] if not bit else [("Rzdg", q), ("H", q)]


# -- decomposition tables ------------------------------------------------------

@lru_cache(maxsize=None)
def jjj_table() -> tuple:
    """table[u] = lexicographically first (a, b, c) with J(c) J(b) J(a) in coset u."""
    g = c1_group()
    out = [None] * g.order
    for code in range(8):
        bits = ((code >> 2) & 1, (code >> 1) & 1, code & 1)
        gates = sum((j_gates(b, 0) for b in bits), [])
        u = c1_index(gates)
        if out[u] is None:
            out[u] = bits
    if any(v is None for v in out):
        raise RuntimeError("three J steps do not reach every single-qubit coset")
    return tuple(out)


def _hook_gates(bits) -> list:
    a, b, c, d = bits
    return [("CZ", 0, 1)] + j_gates(a, 0) + j_gates(b, 1) + j_gates(c, 0) + j_gates(d, 1)


@lru_cache(maxsize=None)
def _hook_pattern_cosets() -> np.ndarray:
    """Coset of (H x H) K (H x H) for each 16-bit pattern, K the four-hook product."""
    grp = c2_group()
    per_hook = np.zeros((16, 4, 4), dtype=np.int64)
    for nib in range(16):
        bits = ((nib >> 3) & 1, (nib >> 2) & 1, (nib >> 1) & 1, nib & 1)
        per_hook[nib] = from_circuit(2, _hook_gates(bits)).matrix
    hh = from_circuit(2, [("H", 0), ("H", 1)]).matrix.astype(np.int64)
    # row-vector convention: the hook acting first is the left factor
    two = np.einsum("aij,bjk->abik", per_hook, per_hook).reshape(256, 4, 4) & 1
    four = np.einsum("aij,bjk->abik", two, two).reshape(65536, 4, 4) & 1
    full = np.einsum("ij,ajk,kl->ail", hh, four, hh) & 1
    idx = grp.indices_of_matrices(full)
    if (idx < 0).any():
        raise RuntimeError("hook product left the Clifford group")
    return idx


@lru_cache(maxsize=None)
def hook_table() -> np.ndarray:
    """(720, 16) bits: the first pattern, with hook 1's top-left bit most significant."""
    idx = _hook_pattern_cosets()
    seen, first = np.unique(idx, return_index=True)
    if seen.size != c2_group().order:
        raise RuntimeError("four hooks do not reach every two-qubit coset")
    out = np.zeros((seen.size, 16), dtype=np.int8)
    for u, pat in zip(seen, first):
        out[u] = [(int(pat) >> (15 - k)) & 1 for k in range(16)]
    return out


def hook_block(bits16) -> np.ndarray:
    """2 x 8 basis block; hook k spans columns 2k, 2k+1 as (a, b / c, d) = (row0 a, row1 a, row0 b, row1 b)."""
    block = np.zeros((2, 8), dtype=np.int8)
    for k in range(4):
        a, b, c, d = bits16[4 * k: 4 * k + 4]
        block[0, 2 * k], block[1, 2 * k], block[0, 2 * k + 1], block[1, 2 * k + 1] = a, b, c, d
    return block


HOOK_VERTICAL_COLUMNS = (0, 2, 4, 6)


def _c1(u) -> int:
    return int(u) if not isinstance(u, str) else c1_by_name(u)


def c1_by_name(name: str) -> int:
    gates = {"I": [], "H": [("H", 0)], "S": [("Rz", 0)], "Sdg": [("Rzdg", 0)],
             "X": [], "Y": [], "Z": []}
    if name not in gates:
        raise ValueError(f"unknown single-qubit gate {name!r}")
    return c1_index(gates[name])


def _c2(u) -> int:
    return u.index if isinstance(u, C2Coset) else int(u)


# -- column model ------------------------------------------------------------------

def column_gates(layout: MeasurementLayout, c: int, basis=None, measured: bool = True) -> list:
    basis = layout.basis if basis is None else basis
    gates = [("CZ", int(r), int(r) + 1) for r in np.flatnonzero(layout.vedges[:, c])]
    if measured:
        for r in range(layout.rows):
            gates += j_gates(int(basis[r, c]), r)
    return gates


def compiled_gates(layout: MeasurementLayout, basis=None, upto: int | None = None) -> list:
    """Logical circuit realized by columns [0, upto); an unmeasured last column adds only its CZs."""
    upto = layout.cols if upto is None else upto
    gates = []
    for c in range(upto):
        measured = bool(layout.rounds[:, c].all())
        gates += column_gates(layout, c, basis, measured)
    return gates


def compiled_tableau(layout: MeasurementLayout, basis=None) -> CliffordTableau:
    return from_circuit(layout.rows, compiled_gates(layout, basis))


def outcome_grid(layout: MeasurementLayout, outcomes) -> np.ndarray:
    """R x L outcome bits from a MeasurementRecord, a dict or an array."""
    meas = layout.rounds > 0
    if isinstance(outcomes, np.ndarray) and outcomes.shape == (layout.rows, layout.cols):
        grid = outcomes.astype(np.uint8) & 1
        return grid
    grid = np.full((layout.rows, layout.cols), 255, dtype=np.uint8)
    if hasattr(outcomes, "qubits"):
        items = zip(outcomes.qubits, [(1 - o) // 2 for o in outcomes.outcomes])
    else:
        items = dict(outcomes).items()
    for v, bit in items:
        r, c = layout.coords(int(v))
        grid[r, c] = int(bit)
    if (grid[meas] == 255).any():
        raise ValueError("outcomes do not cover every measured vertex")
    grid[~meas] = 0
    return grid


def pauli_frame(layout: MeasurementLayout, outcomes, basis=None) -> PauliString:
    """P with residual = P U |+...+>, U the compiled signed circuit, signs included."""
    grid = outcome_grid(layout, outcomes)
    frame = PauliString.identity(layout.rows)
    for c in range(layout.cols):
        measured = bool(layout.rounds[:, c].all())
        for g in column_gates(layout, c, basis, measured):
            frame = conjugate_by_gate(frame, g)
        if measured:
            x = sum(1 << r for r in range(layout.rows) if grid[r, c])
            frame = frame * PauliString(layout.rows, x, 0)
    return frame


# -- single-qubit line -------------------------------------------------------------

def line_block_bits(g, last: bool) -> tuple:
    """Three basis bits for one letter; the last-applied letter absorbs the H frame."""
    grp = c1_group()
    h = c1_index([("H", 0)])
    g = _c1(g)
    k = grp.mul(g, h) if last else grp.mul(grp.mul(h, g), h)
    return jjj_table()[k]


def line_gadget(gates: Sequence) -> MeasurementLayout:
    n = len(gates)
    if n < 1:
        raise ValueError("need at least one gate")
    lay = blank_layout(1, 3 * n + 2)
    lay.basis[0, 0] = 0
    for i, g in enumerate(gates):
        pos = n - 1 - i
        bits = line_block_bits(g, last=(i == 0))
        lay.basis[0, 1 + 3 * pos: 4 + 3 * pos] = bits
    lay.header = {"kind": "line", "n": n, "block_columns": [[1 + 3 * (n - 1 - i), 4 + 3 * (n - 1 - i)] for i in range(n)]}
    return lay


# -- two-qubit brickwork -------------------------------------------------------------

def brickwork_block_bits(g, last: bool) -> np.ndarray:
    grp = c2_group()
    g = _c2(g)
    hh = c2_index([("H", 0), ("H", 1)])
    k = grp.mul(hh, g) if last else g
    return hook_table()[k]


def _brickwork_geometry(blocks: int) -> MeasurementLayout:
    lay = blank_layout(2, 8 * blocks + 2)
    for p in range(blocks):
        for k in HOOK_VERTICAL_COLUMNS:
            lay.vedges[0, 1 + 8 * p + k] = 1
    return lay


def brickwork_gadget(gates: Sequence) -> MeasurementLayout:
    n = len(gates)
    if n < 1:
        raise ValueError("need at least one gate")
    lay = _brickwork_geometry(n)
    lay.basis[:, 0] = 0
    for i, g in enumerate(gates):
        pos = n - 1 - i
        lay.basis[:, 1 + 8 * pos: 9 + 8 * pos] = hook_block(brickwork_block_bits(g, last=(i == 0)))
    lay.header = {"kind": "brickwork", "n": n,
                  "block_columns": [[1 + 8 * (n - 1 - i), 9 + 8 * (n - 1 - i)] for i in range(n)]}
    return lay


def compose_gadgets(a: MeasurementLayout, b: MeasurementLayout) -> MeasurementLayout:
    """b after a, joined by an X-measured buffer column; a's outputs are measured in X."""
    if len(a.outputs) != len(b.inputs) or a.rows != b.rows:
        raise ValueError("gadget widths differ")
    R = a.rows
    cols = a.cols + 1 + b.cols
    hedges = np.concatenate([a.hedges, np.ones((R, 2), dtype=np.uint8), b.hedges], axis=1)
    vedges = np.concatenate([a.vedges, np.zeros((max(R - 1, 0), 1), dtype=np.uint8), b.vedges], axis=1)
    basis = np.concatenate([a.basis, np.zeros((R, 1), dtype=np.int8), b.basis], axis=1)
    rounds = np.concatenate([a.rounds, np.ones((R, 1), dtype=np.uint8), b.rounds], axis=1)
    last_a = a.cols - 1
    basis[:, last_a] = np.where(a.rounds[:, last_a] == 0, 0, basis[:, last_a])
    rounds[:, last_a] = np.maximum(rounds[:, last_a], 1)
    shift = (a.cols + 1) * R
    header = {"kind": "composite", "parts": [a.header, b.header], "buffer_column": a.cols}
    return MeasurementLayout(R, cols, hedges, vedges, basis, rounds, list(a.inputs),
                             [v + shift for v in b.outputs], header)


# -- wide cluster: CNOT and H_m letters -----------------------------------------------

def _as_cnot(g, m: int):
    if g is None:
        return None
    if isinstance(g, str) and g == "id":
        return None
    if hasattr(g, "control"):
        g = (g.control, g.target)
    if isinstance(g, np.ndarray):
        off = g.copy() % 2
        np.fill_diagonal(off, 0)
        nz = np.argwhere(off)
        if len(nz) == 0:
            return None
        if len(nz) != 1 or not (np.diag(g) % 2).all():
            raise ValueError("CNOT letter is not one-hot")
        return int(nz[0][0]), int(nz[0][1])
    i, j = int(g[0]), int(g[1])
    if i == j or not (0 <= i < m and 0 <= j < m):
        raise ValueError(f"bad CNOT letter {g} on {m} wires")
    return i, j


def _as_hsym(h, m: int) -> np.ndarray:
    if h is None:
        return np.zeros((m, m), dtype=np.uint8)
    mat = np.asarray(getattr(h, "matrix", h), dtype=np.uint8) & 1
    if mat.shape != (m, m) or (mat != mat.T).any():
        raise ValueError("H_m letter must be a symmetric m x m bit matrix")
    return mat


def wide_input_bits(m: int) -> int:
    """Per letter: the one-hot CNOT matrix (m*m, row-major) then the symmetric H part (m*m)."""
    return 2 * m * m


def encode_wide_letter(g, h, m: int) -> np.ndarray:
    bits = np.zeros(2 * m * m, dtype=np.uint8)
    c = _as_cnot(g, m)
    if c is not None:
        bits[c[0] * m + c[1]] = 1
    bits[m * m:] = _as_hsym(h, m).reshape(-1)
    return bits


def _reversal_layers(m: int) -> list:
    """Odd-even transposition layers: layer l pairs rows (q, q+1) with q = l mod 2."""
    return [list(range(l % 2, m - 1, 2)) for l in range(m)]


def _patterns():
    """In-frame bit patterns: Rz step (3 bits) and swap blocks (16 bits)."""
    grp1 = c1_group()
    h1 = c1_index([("H", 0)])
    rz = c1_index([("Rz", 0)])
    rz_in_frame = grp1.mul(grp1.mul(h1, rz), h1)
    jjj = jjj_table()
    ht = hook_table()
    swap = c2_index([("SWAP", 0, 1)])
    swap_cz = c2_index([("CZ", 0, 1), ("SWAP", 0, 1)])
    swap_cx = c2_index([("CNOT", 0, 1), ("SWAP", 0, 1)])
    return {
        "rz": (np.array(jjj[grp1.identity], dtype=np.int8), np.array(jjj[rz_in_frame], dtype=np.int8)),
        "cz": (hook_block(ht[swap]), hook_block(ht[swap_cz])),
        "cx": (hook_block(ht[swap]), hook_block(ht[swap_cx])),
    }


class WideTemplate:
    """Letter template for one starting wire order.

    c0/c1 are the basis bits when the selecting input bit is 0/1; sel is the
    index of that input bit, or -1 where the bit is constant.
    """

    def __init__(self, m: int, reversed_start: bool):
        self.m = m
        pats = _patterns()
        width = 3 + 3 * 8 * m
        self.width = width
        c0 = np.zeros((m, width), dtype=np.int8)
        c1 = np.zeros((m, width), dtype=np.int8)
        sel = np.full((m, width), -1, dtype=np.int32)
        vcols = []
        wire_at = list(range(m))[::-1] if reversed_start else list(range(m))
        for q in range(m):
            w = wire_at[q]
            c0[q, 0:3], c1[q, 0:3] = pats["rz"]
            sel[q, 0:3] = m * m + w * m + w
        col = 3
        for kind in ("cz", "cx", "cx"):
            for layer in _reversal_layers(m):
                for q in layer:
                    a, b = wire_at[q], wire_at[q + 1]
                    p0, p1 = pats[kind]
                    c0[q:q + 2, col:col + 8], c1[q:q + 2, col:col + 8] = p0, p1
                    if kind == "cz":
                        lo, hi = min(a, b), max(a, b)
                        idx = m * m + lo * m + hi
                    else:
                        idx = a * m + b
                    sel[q:q + 2, col:col + 8] = idx
                    vcols += [(q, col + k) for k in HOOK_VERTICAL_COLUMNS]
                    wire_at[q], wire_at[q + 1] = b, a
                col += 8
        if wire_at != (list(range(m)) if reversed_start else list(range(m))[::-1]):
            raise RuntimeError("pass does not reverse the wire order")
        self.c0, self.c1, self.sel = c0, c1, sel
        self.vedges = np.zeros((m - 1, width), dtype=np.uint8)
        for q, c in vcols:
            self.vedges[q, c] = 1

    def fill(self, inputs: np.ndarray) -> np.ndarray:
        """inputs (k, 2 m^2) -> (k, m, width) basis bits."""
        k = inputs.shape[0]
        ext = np.concatenate([inputs.astype(np.int8), np.zeros((k, 1), dtype=np.int8)], axis=1)
        sel = np.where(self.sel < 0, ext.shape[1] - 1, self.sel)
        picked = ext[:, sel]
        return self.c0[None] ^ ((self.c0 ^ self.c1)[None] & picked)


def restore_pass(m: int, reversed_start: bool):
    """8m columns of plain swaps, undoing a reversed wire order."""
    pats = _patterns()
    basis = np.zeros((m, 8 * m), dtype=np.int8)
    vedges = np.zeros((m - 1, 8 * m), dtype=np.uint8)
    for l, layer in enumerate(_reversal_layers(m)):
        for q in layer:
            basis[q:q + 2, 8 * l: 8 * l + 8] = pats["cz"][0]
            for k in HOOK_VERTICAL_COLUMNS:
                vedges[q, 8 * l + k] = 1
    return basis, vedges


@lru_cache(maxsize=None)
def wide_templates(m: int) -> tuple:
    return WideTemplate(m, False), WideTemplate(m, True)


def wide_geometry_header(m: int, n: int) -> dict:
    letter = 3 + 24 * m
    restore = 8 * m if n % 2 else 0
    region = 1 + n * letter + restore + 1
    return {"m": m, "n": n, "letter_columns": letter, "rz_columns": 3, "pass_columns": 8 * m,
            "restore_columns": restore, "round1_columns": region}


def wide_round1(m: int, inputs: np.ndarray):
    """Basis and vertical edges of the round-1 region for raw letter bits.

    inputs has one row per letter in processing order (first row acts first).
    Returns (basis, vedges), with a final X column that removes the H frame.
    """
    if m < 3:
        raise ValueError("wide cluster needs m >= 3")
    n = inputs.shape[0]
    t0, t1 = wide_templates(m)
    hdr = wide_geometry_header(m, n)
    L = hdr["round1_columns"]
    basis = np.zeros((m, L), dtype=np.int8)
    vedges = np.zeros((m - 1, L), dtype=np.uint8)
    W = hdr["letter_columns"]
    for parity, tmpl in ((0, t0), (1, t1)):
        ks = np.arange(parity, n, 2)
        if ks.size == 0:
            continue
        blocks = tmpl.fill(inputs[ks])
        for j, k in enumerate(ks):
            c = 1 + k * W
            basis[:, c:c + W] = blocks[j]
            vedges[:, c:c + W] = tmpl.vedges
    if n % 2:
        rb, rv = restore_pass(m, True)
        c = 1 + n * W
        basis[:, c:c + 8 * m] = rb
        vedges[:, c:c + 8 * m] = rv
    return basis, vedges


def _wide_inputs(g: Sequence, h: Sequence, m: int) -> np.ndarray:
    if len(g) != len(h):
        raise ValueError("g and h must have the same length")
    n = len(g)
    rows = [encode_wide_letter(g[i], h[i], m) for i in range(n)]
    # processing order: (g_n, h_n) first
    return np.array(rows[::-1], dtype=np.uint8).reshape(n, 2 * m * m)


def wide_cluster_gadget(g: Sequence, h: Sequence, m: int | None = None) -> MeasurementLayout:
    """Layout realizing g_1 h_1 ... g_n h_n |+>^m mod Pauli (h_n acts first)."""
    if m is None:
        if not len(h):
            raise ValueError("cannot infer m from an empty word")
        m = _as_hsym_shape(h)
    if len(g) < 1:
        raise ValueError("need at least one letter")
    inputs = _wide_inputs(g, h, m)
    basis1, ved1 = wide_round1(m, inputs)
    L = basis1.shape[1] + 1
    lay = blank_layout(m, L)
    lay.basis[:, :-1] = basis1
    lay.vedges[:, :-1] = ved1
    lay.header = {"kind": "wide", **wide_geometry_header(m, len(g))}
    return lay


def _as_hsym_shape(h: Sequence) -> int:
    for x in h:
        if x is not None:
            return np.asarray(getattr(x, "matrix", x)).shape[0]
    raise ValueError("cannot infer m")


def wide_raw_basis(m: int, inputs: np.ndarray) -> np.ndarray:
    """Round-1 basis straight from raw bits, without validating one-hot letters."""
    return wide_round1(m, np.asarray(inputs, dtype=np.uint8))[0]


# -- self-checks ---------------------------------------------------------------------------

def check_brickwork_case(u: int, rng, table: np.ndarray | None = None) -> bool:
    """One-gate brickwork layout leaves u|++> mod Pauli; `table` overrides the hook table."""
    from .graphsim import run_layout
    from .stabilizer import apply_clifford, plus_state, same_mod_pauli
    lay = brickwork_gadget([u])
    if table is not None:
        k = c2_group().mul(c2_index([("H", 0), ("H", 1)]), u)
        lay.basis[:, 1:9] = hook_block(table[k])
    _, res = run_layout(lay, rng)
    return same_mod_pauli(res, apply_clifford(plus_state(2), c2_group().tableau(u)))


def check_line_case(u: int, rng) -> bool:
    from .graphsim import run_layout
    from .stabilizer import apply_clifford, plus_state, same_mod_pauli
    _, res = run_layout(line_gadget([u]), rng)
    return same_mod_pauli(res, apply_clifford(plus_state(1), c1_group().tableau(u)))


def wide_word_gates(g: Sequence, h: Sequence, m: int) -> list:
    """Circuit for g_1 h_1 ... g_n h_n in application order."""
    gates = []
    for k in range(len(g) - 1, -1, -1):
        hs = _as_hsym(h[k], m)
        gates += [("Rz", i) for i in range(m) if hs[i, i]]
        gates += [("CZ", i, j) for i in range(m) for j in range(i + 1, m) if hs[i, j]]
        c = _as_cnot(g[k], m)
        if c is not None:
            gates.append(("CNOT", c[0], c[1]))
    return gates


def check_wide_case(g: Sequence, h: Sequence, m: int, rng) -> bool:
    from .graphsim import run_layout
    from .stabilizer import apply_gates, plus_state, same_mod_pauli
    _, res = run_layout(wide_cluster_gadget(g, h, m), rng)
    return same_mod_pauli(res, apply_gates(plus_state(m), wide_word_gates(g, h, m)))


def wide_dependence(m: int, n: int, rng) -> dict:
    """Input bit -> set of round-1 basis positions that change when it flips."""
    base = rng.integers(0, 2, size=(n, wide_input_bits(m)), dtype=np.uint8)
    ref = wide_raw_basis(m, base)
    out = {}
    for k in range(n):
        for b in range(wide_input_bits(m)):
            alt = base.copy()
            alt[k, b] ^= 1
            diff = np.argwhere(wide_raw_basis(m, alt) != ref)
            out[(k, b)] = {(int(r), int(c)) for r, c in diff}
    return out


def single_input_dependence(m: int, n: int, rng) -> bool:
    """Whether every basis bit is driven by at most one input bit."""
    owner = {}
    for key, cells in wide_dependence(m, n, rng).items():
        for cell in cells:
            if cell in owner:
                return False
            owner[cell] = key
    return True
