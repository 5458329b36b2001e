"""Stabilizer states: evolution, measurement, postselection, support sampling."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf2
from .pauli import DimensionError, PauliString, commutes, pauli_mul
from .tableau import CliffordTableau, Gate, conjugate, conjugate_by_gate

PLUS, MINUS, NON_STABILIZER = "plus", "minus", "non-stabilizer"


class _Empty:
    def __repr__(self):
        return "Empty"

    def __bool__(self):
        return False


EMPTY = _Empty()


class InternalError(RuntimeError):
    pass


def _basis_gates(qubit: int, basis: str) -> list:
    """Gates taking a `basis` measurement on `qubit` to a Z measurement."""
    if basis == "Z":
        return []
    if basis == "X":
        return [("H", qubit)]
    if basis == "Y":
        return [("Rzdg", qubit), ("H", qubit)]
    raise ValueError(f"basis must be X, Y or Z, got {basis!r}")


def _undo_basis_gates(qubit: int, basis: str) -> list:
    if basis == "Z":
        return []
    if basis == "X":
        return [("H", qubit)]
    return [("H", qubit), ("Rz", qubit)]


class RowSolver:
    """Reusable elimination for x @ M = b."""

    def __init__(self, m: np.ndarray):
        m = gf2.as_bits(m)
        self.rows, self.cols = m.shape
        aug = np.concatenate([m, np.eye(self.rows, dtype=np.uint8)], axis=1)
        self.red, piv = gf2.row_reduce(aug)
        self.piv = [(i, c) for i, c in enumerate(piv) if c < self.cols]

    def solve(self, b: np.ndarray):
        t = np.concatenate([gf2.as_bits(b), np.zeros(self.rows, dtype=np.uint8)])
        for i, c in self.piv:
            if t[c]:
                t ^= self.red[i]
        if t[: self.cols].any():
            return None
        return t[self.cols:]


def product(gens: Sequence[PauliString], coeffs) -> PauliString:
    acc = PauliString(gens[0].num_qubits) if gens else PauliString(0)
    for g, c in zip(gens, coeffs):
        if c:
            acc = pauli_mul(acc, g)
    return acc


@dataclass(frozen=True)
class StabilizerState:
    num_qubits: int
    generators: tuple

    def __post_init__(self):
        if len(self.generators) != self.num_qubits:
            raise DimensionError("need exactly m generators")

    @property
    def gx(self) -> np.ndarray:
        return np.array([g.x_bits for g in self.generators], dtype=np.uint8).reshape(self.num_qubits, self.num_qubits)

    @property
    def gz(self) -> np.ndarray:
        return np.array([g.z_bits for g in self.generators], dtype=np.uint8).reshape(self.num_qubits, self.num_qubits)

    def check(self) -> None:
        gens = self.generators
        for g in gens:
            if g.phase not in (0, 2):
                raise InternalError(f"generator {g} is not Hermitian with sign +-1")
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                if not commutes(gens[a], gens[b]):
                    raise InternalError("generators do not commute")
        if gf2.rank(np.concatenate([self.gx, self.gz], axis=1)) != self.num_qubits:
            raise InternalError("generators are dependent")

    def to_text(self) -> str:
        return "\n".join([str(self.num_qubits)] + [str(g) for g in self.generators])

    @classmethod
    def from_text(cls, text: str) -> "StabilizerState":
        rows = text.split()
        m = int(rows[0])
        return cls(m, tuple(PauliString.from_str(r) for r in rows[1:1 + m]))

    def __str__(self):
        return ", ".join(str(g) for g in self.generators)


def zero_state(m: int) -> StabilizerState:
    return StabilizerState(m, tuple(PauliString(m, 0, 1 << i) for i in range(m)))


def plus_state(m: int) -> StabilizerState:
    return StabilizerState(m, tuple(PauliString(m, 1 << i, 0) for i in range(m)))


def from_graph(adjacency) -> StabilizerState:
    adj = np.asarray(adjacency, dtype=np.uint8)
    m = adj.shape[0]
    if adj.shape != (m, m) or not np.array_equal(adj, adj.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diag(adj)):
        raise ValueError("adjacency must have zero diagonal")
    gens = []
    for v in range(m):
        z = sum(1 << u for u in np.nonzero(adj[v])[0].tolist())
        gens.append(PauliString(m, 1 << v, z))
    return StabilizerState(m, tuple(gens))


def from_generators(gens: Sequence[PauliString]) -> StabilizerState:
    s = StabilizerState(len(gens), tuple(gens))
    s.check()
    return s


def apply_clifford(s: StabilizerState, t: CliffordTableau) -> StabilizerState:
    if t.num_qubits != s.num_qubits:
        raise DimensionError("tableau and state sizes differ")
    return StabilizerState(s.num_qubits, tuple(conjugate(t, g) for g in s.generators))


def apply_gates(s: StabilizerState, gates: Sequence[Gate]) -> StabilizerState:
    gens = list(s.generators)
    for gate in gates:
        gens = [conjugate_by_gate(g, gate) for g in gens]
    return StabilizerState(s.num_qubits, tuple(gens))


# -- membership ---------------------------------------------------------------

def _solver(s: StabilizerState) -> RowSolver:
    return RowSolver(np.concatenate([s.gx, s.gz], axis=1))


def group_element(s: StabilizerState, p: PauliString, solver: RowSolver | None = None):
    """The product of generators equal to p up to phase, or None."""
    solver = solver or _solver(s)
    coeffs = solver.solve(np.concatenate([p.x_bits, p.z_bits]))
    if coeffs is None:
        return None
    return product(s.generators, coeffs)


def is_stabilizer(s: StabilizerState, p: PauliString) -> str:
    if p.num_qubits != s.num_qubits:
        raise DimensionError("sizes differ")
    g = group_element(s, p)
    if g is None:
        return NON_STABILIZER
    rel = (g.phase - p.phase) % 4
    if rel == 0:
        return PLUS
    if rel == 2:
        return MINUS
    raise InternalError("group element differs by a factor of i")


# -- single qubit measurement -------------------------------------------------

def measure_pauli(s: StabilizerState, obs: PauliString, rng=None, forced: int | None = None):
    """Measure a Hermitian Pauli observable.

    Returns (bit, deterministic, state) with bit 0 for the +1 outcome, or
    (bit, det, EMPTY) when `forced` contradicts a deterministic outcome.
    """
    gens = list(s.generators)
    anti = [i for i, g in enumerate(gens) if not commutes(g, obs)]
    if anti:
        i = anti[0]
        if forced is None:
            bit = int(rng.integers(0, 2))
        else:
            bit = int(forced)
        piv = gens[i]
        for k in anti[1:]:
            gens[k] = pauli_mul(gens[k], piv)
        gens[i] = obs.with_phase((obs.phase + 2 * bit) % 4)
        return bit, False, StabilizerState(s.num_qubits, tuple(gens))
    g = group_element(s, obs)
    if g is None:
        raise InternalError("commuting observable outside the stabilizer group")
    rel = (g.phase - obs.phase) % 4
    bit = rel // 2
    if forced is not None and int(forced) != bit:
        return bit, True, EMPTY
    return bit, True, s


def measure_single(s: StabilizerState, qubit: int, basis: str, rng):
    """Returns (outcome as +-1, post-measurement state)."""
    if not 0 <= qubit < s.num_qubits:
        raise IndexError(qubit)
    obs = PauliString.single(s.num_qubits, qubit, basis)
    bit, _, post = measure_pauli(s, obs, rng)
    return 1 - 2 * bit, post


# -- multi qubit measurement ----------------------------------------------------

@dataclass
class MeasurementRecord:
    qubits: list
    bases: list
    outcomes: list  # +-1
    deterministic: list

    @property
    def bits(self) -> list:
        return [(1 - o) // 2 for o in self.outcomes]

    def to_dict(self) -> dict:
        return {"qubits": list(self.qubits), "bases": list(self.bases),
                "outcomes": list(self.outcomes), "deterministic": list(self.deterministic)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "MeasurementRecord":
        d = json.loads(text)
        return cls(d["qubits"], d["bases"], d["outcomes"], d["deterministic"])


@dataclass
class MeasurementPlan:
    """Outcome structure of a joint measurement.

    Outcome bits of the random positions are free; the others equal
    const + matrix @ free (mod 2).  `post` holds the post-measurement
    generators in the rotated frame, with the random positions' signs
    still to be filled in.
    """
    num_qubits: int
    qubits: list
    bases: list
    random_positions: list
    const: np.ndarray
    matrix: np.ndarray
    rotated: list = field(repr=False, default_factory=list)
    pivot_slots: list = field(repr=False, default_factory=list)

    def outcomes_for(self, free_bits) -> np.ndarray:
        free = gf2.as_bits(free_bits)
        out = (self.const ^ (self.matrix.astype(np.int64) @ free.astype(np.int64) & 1)).astype(np.uint8)
        out[self.random_positions] = free
        return out

    def sample(self, rng: np.random.Generator, shots: int) -> np.ndarray:
        r = len(self.random_positions)
        free = rng.integers(0, 2, size=(shots, r), dtype=np.uint8)
        out = np.empty((shots, len(self.qubits)), dtype=np.uint8)
        out[:] = self.const
        if r:
            out ^= (free.astype(np.int64) @ self.matrix.T.astype(np.int64) & 1).astype(np.uint8)
            out[:, self.random_positions] = free
        return out

    def support(self) -> set:
        r = len(self.random_positions)
        res = set()
        for v in range(1 << r):
            free = [(v >> i) & 1 for i in range(r)]
            res.add(tuple(self.outcomes_for(free).tolist()))
        return res

    def post_state(self, bits) -> StabilizerState:
        gens = list(self.rotated)
        for slot, pos in zip(self.pivot_slots, self.random_positions):
            q = self.qubits[pos]
            gens[slot] = PauliString(self.num_qubits, 0, 1 << q, 2 * int(bits[pos]))
        state = StabilizerState(self.num_qubits, tuple(gens))
        undo = []
        for q, b in zip(self.qubits, self.bases):
            undo += _undo_basis_gates(q, b)
        return apply_gates(state, undo)


def measurement_plan(s: StabilizerState, qubits: Sequence[int], bases: Sequence[str]) -> MeasurementPlan:
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise ValueError("duplicate qubits")
    if len(bases) != len(qubits):
        raise DimensionError("one basis per qubit")
    for q in qubits:
        if not 0 <= q < s.num_qubits:
            raise IndexError(q)
    m = s.num_qubits
    rot = []
    for q, b in zip(qubits, bases):
        rot += _basis_gates(q, b)
    gens = list(apply_gates(s, rot).generators)
    n = len(gens)
    k = len(qubits)

    # step 1: basis B of the measured X columns, chosen where the prefix rank grows
    gx = np.array([[(g.x >> q) & 1 for q in qubits] for g in gens], dtype=np.uint8).reshape(n, k)
    ranks = gf2.prefix_row_ranks(gx) if n else []
    basis_idx = [i for i in range(n) if ranks[i] > (ranks[i - 1] if i else 0)]
    bx = gx[basis_idx]
    _, pivot_cols = gf2.row_reduce(bx) if basis_idx else (None, [])
    basis = [gens[i] for i in basis_idx]
    new = list(gens)
    full = RowSolver(bx) if basis_idx else None
    for i in range(n):
        if i in basis_idx:
            continue
        coeffs = full.solve(gx[i]) if full else None
        if coeffs is None:
            if gx[i].any():
                raise InternalError("measured X part outside the basis span")
            continue
        new[i] = pauli_mul(gens[i], product(basis, coeffs))
    pivot_gens = []
    for j in pivot_cols:
        target = np.zeros(j + 1, dtype=np.uint8)
        target[j] = 1
        coeffs = RowSolver(bx[:, : j + 1]).solve(target)
        if coeffs is None:
            raise InternalError("pivot column not reachable")
        pivot_gens.append(product(basis, coeffs))
    # the pivot generators span the same group as B; they occupy B's slots
    for slot, g in zip(basis_idx, pivot_gens):
        new[slot] = g
    random_positions = list(pivot_cols)
    slots = list(basis_idx)
    for slot, pos in zip(slots, random_positions):
        new[slot] = PauliString(m, 0, 1 << qubits[pos])

    # step 2: deterministic outcomes from x G^(z) = e_j, x G^(x) = 0
    const = np.zeros(k, dtype=np.uint8)
    mat = np.zeros((k, len(random_positions)), dtype=np.uint8)
    post = StabilizerState(m, tuple(new))
    solver = _solver(post)
    slot_of = {slot: idx for idx, slot in enumerate(slots)}
    for j, q in enumerate(qubits):
        if j in random_positions:
            continue
        target = np.zeros(2 * m, dtype=np.uint8)
        target[m + q] = 1
        coeffs = solver.solve(target)
        if coeffs is None:
            raise InternalError("deterministic outcome without a Z_j stabilizer")
        g = product(new, coeffs)
        if g.x != 0 or g.z != 1 << q or g.phase not in (0, 2):
            raise InternalError("unexpected group element")
        const[j] = g.phase // 2
        for slot in np.nonzero(coeffs)[0].tolist():
            if slot in slot_of:
                mat[j, slot_of[slot]] = 1
    return MeasurementPlan(m, qubits, list(bases), random_positions, const, mat, new, slots)


def measure_multi(s: StabilizerState, qubits: Sequence[int], bases: Sequence[str], rng):
    plan = measurement_plan(s, qubits, bases)
    free = rng.integers(0, 2, size=len(plan.random_positions), dtype=np.uint8)
    bits = plan.outcomes_for(free)
    det = [j not in plan.random_positions for j in range(len(plan.qubits))]
    rec = MeasurementRecord(list(plan.qubits), list(bases), [1 - 2 * int(b) for b in bits], det)
    return rec, plan.post_state(bits)


def postselect(s: StabilizerState, qubits: Sequence[int], bases: Sequence[str], outcomes: Sequence[int]):
    """Project onto outcome bits (0 = +1).  Returns EMPTY if impossible."""
    plan = measurement_plan(s, qubits, bases)
    target = gf2.as_bits(outcomes)
    if len(target) != len(plan.qubits):
        raise DimensionError("one outcome per qubit")
    bits = plan.outcomes_for(target[plan.random_positions])
    if not np.array_equal(bits, target):
        return EMPTY
    return plan.post_state(bits)


def sample_outcomes(s: StabilizerState, qubits, bases, rng, shots: int) -> np.ndarray:
    return measurement_plan(s, qubits, bases).sample(rng, shots)


# -- comparison -----------------------------------------------------------------

def canonical_generators(s: StabilizerState) -> tuple:
    """Reduced generators of the stabilizer group, with exact signs."""
    m = s.num_qubits
    rows = list(s.generators)
    mat = np.concatenate([s.gx, s.gz], axis=1).reshape(m, 2 * m)
    r = 0
    for col in list(range(m)) + list(range(m, 2 * m)):
        hits = [i for i in range(r, m) if mat[i, col]]
        if not hits:
            continue
        p = hits[0]
        mat[[r, p]] = mat[[p, r]]
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(m):
            if i != r and mat[i, col]:
                mat[i] ^= mat[r]
                rows[i] = pauli_mul(rows[i], rows[r])
        r += 1
    return tuple(rows)


def same_state(a: StabilizerState, b: StabilizerState) -> bool:
    return canonical_generators(a) == canonical_generators(b)


def same_mod_pauli(a: StabilizerState, b: StabilizerState) -> bool:
    """Equal stabilizer groups up to signs (the states differ by a Pauli)."""
    ka = [(g.x, g.z) for g in canonical_generators(a)]
    kb = [(g.x, g.z) for g in canonical_generators(b)]
    return ka == kb


def reduce_to(s: StabilizerState, keep: Sequence[int]) -> StabilizerState:
    """State of `keep` when it is unentangled from the other qubits."""
    keep = list(keep)
    m = s.num_qubits
    rest = [q for q in range(m) if q not in keep]
    rest_mask = sum(1 << q for q in rest)
    # eliminate support on `rest` first so that what remains lives on `keep`
    rows = list(s.generators)
    mat = np.concatenate([s.gx, s.gz], axis=1).reshape(m, 2 * m)
    cols = rest + [m + q for q in rest]
    r = 0
    for col in cols:
        hits = [i for i in range(r, m) if mat[i, col]]
        if not hits:
            continue
        p = hits[0]
        mat[[r, p]] = mat[[p, r]]
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(m):
            if i != r and mat[i, col]:
                mat[i] ^= mat[r]
                rows[i] = pauli_mul(rows[i], rows[r])
        r += 1
    local = [g for g in rows if not ((g.x | g.z) & rest_mask)]
    if len(local) != len(keep):
        raise ValueError("kept qubits are entangled with the rest")
    return StabilizerState(len(keep), tuple(g.restrict(keep) for g in local))


# -- support sampling ---------------------------------------------------------------

def support_sample(z, c_block, rng) -> np.ndarray:
    """r C + z for a uniform r."""
    z = gf2.as_bits(z)
    c = gf2.as_bits(c_block)
    if c.ndim != 2 or c.shape[1] != z.shape[0]:
        raise DimensionError("C block and z sizes differ")
    r = rng.integers(0, 2, size=c.shape[0], dtype=np.uint8)
    return (z ^ (r.astype(np.int64) @ c.astype(np.int64) & 1)).astype(np.uint8)


def measurement_c_block(adjacency, basis_bits) -> np.ndarray:
    """C block of the graph-state measurement circuit: A + diag(b)."""
    adj = gf2.as_bits(adjacency).copy()
    b = gf2.as_bits(basis_bits)
    adj[np.arange(len(b)), np.arange(len(b))] ^= b
    return adj


def to_vector(s: StabilizerState) -> np.ndarray:
    from .dense import state_from_generators
    return state_from_generators(list(s.generators))
