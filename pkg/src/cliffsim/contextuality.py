"""Pauli lines, the magic square, the pentagram, and non-stabilizer extraction.

Pauli strings here are canonical (literal letters, phase 0); labels put
qubit 0 first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

from .clifford2 import c2_group, c2_index
from .pauli import PauliString, all_paulis, canonical_rep, commutes


class MalformedProver(ValueError):
    """Outcomes that violate a constraint no quantum device can violate."""


def label(p: PauliString) -> str:
    return p.letters


def canon(p) -> PauliString:
    if isinstance(p, str):
        p = PauliString.from_str(p)
    return canonical_rep(p)


def exact_sign(members: Sequence[PauliString]) -> int:
    acc = PauliString.identity(members[0].num_qubits)
    for m in members:
        acc = acc * m
    if acc.x or acc.z or acc.phase % 2:
        raise ValueError("members do not multiply to +-identity")
    return 1 if acc.phase == 0 else -1


@dataclass(frozen=True)
class PauliLine:
    members: tuple  # canonical PauliStrings
    sign: int

    @property
    def labels(self) -> tuple:
        return tuple(label(p) for p in self.members)

    def __contains__(self, p) -> bool:
        return canon(p).key() in {q.key() for q in self.members}

    def incident(self, other: "PauliLine") -> bool:
        return bool({p.key() for p in self.members} & {q.key() for q in other.members})

    def __str__(self):
        return "{" + ",".join(self.labels) + "}" + ("+" if self.sign > 0 else "-")


def make_line(labels: Sequence[str]) -> PauliLine:
    ms = tuple(canon(s) for s in labels)
    for a, b in combinations(ms, 2):
        if not commutes(a, b):
            raise ValueError("line members must commute")
    return PauliLine(ms, exact_sign(ms))


@lru_cache(maxsize=None)
def two_qubit_paulis() -> tuple:
    """The 15 canonical non-identity two-qubit Paulis, sorted by label."""
    return tuple(sorted((p for p in all_paulis(2, include_identity=False)), key=label))


@lru_cache(maxsize=None)
def enumerate_pauli_lines() -> tuple:
    ps = two_qubit_paulis()
    seen = {}
    for a, b in combinations(ps, 2):
        if not commutes(a, b):
            continue
        c = canon(a * b)
        trio = tuple(sorted((a, b, c), key=label))
        seen[tuple(label(p) for p in trio)] = PauliLine(trio, exact_sign(trio))
    return tuple(seen[k] for k in sorted(seen))


def line_index(line: PauliLine) -> int:
    keys = frozenset(p.key() for p in line.members)
    for i, l in enumerate(enumerate_pauli_lines()):
        if frozenset(p.key() for p in l.members) == keys:
            return i
    raise KeyError(str(line))


def violated_lines(assignment: Mapping) -> list:
    """Lines whose assigned outcome product differs from the line sign."""
    values = {}
    for k, v in assignment.items():
        values[canon(k).key() if not isinstance(k, tuple) else k] = int(v)
    out = []
    for line in enumerate_pauli_lines():
        try:
            prod = 1
            for p in line.members:
                prod *= values[p.key()]
        except KeyError as exc:
            raise ValueError("assignment must cover all 15 canonical Paulis") from exc
        if prod != line.sign:
            out.append(line)
    return out


# -- magic square ------------------------------------------------------------------

MAGIC_SQUARE_TEXT = (("XX", "YY", "ZZ"), ("YZ", "ZX", "XY"), ("ZY", "XZ", "YX"))


@lru_cache(maxsize=None)
def magic_square() -> tuple:
    return tuple(tuple(canon(s) for s in row) for row in MAGIC_SQUARE_TEXT)


def square_lines() -> list:
    """Rows 0..2 then columns 0..2, as PauliLines in cell order."""
    sq = magic_square()
    rows = [PauliLine(tuple(sq[i]), exact_sign(sq[i])) for i in range(3)]
    cols = [PauliLine(tuple(sq[i][j] for i in range(3)), exact_sign([sq[i][j] for i in range(3)]))
            for j in range(3)]
    return rows + cols


def _bell():
    return [("CNOT", 0, 1), ("H", 0)]


def _maps_to_z(u: int, members: Sequence[PauliString]) -> bool:
    grp = c2_group()
    targets = {(0, 1), (0, 2), (0, 3)}  # ZI, IZ, ZZ as (x, z)
    return {grp.act(u, p).key() for p in members} == targets


@lru_cache(maxsize=None)
def row_col_measurement_program(index: int) -> int:
    """C2 coset u taking row/column `index` (rows 0..2, columns 3..5) to {ZI, IZ, ZZ} mod sign."""
    if not 0 <= index < 6:
        raise IndexError(index)
    members = square_lines()[index].members
    singles = [[], [("H", 0)], [("Rz", 0)], [("Rz", 0), ("H", 0)], [("H", 0), ("Rz", 0)],
               [("H", 0), ("Rz", 0), ("H", 0)]]
    for local in singles:
        for q in (0, 1):
            gates = [(g[0], q) for g in local] + _bell()
            u = c2_index(gates)
            if _maps_to_z(u, members):
                return u
    raise RuntimeError("no local-times-Bell program for this line")


@lru_cache(maxsize=None)
def line_measurement_program(line_idx: int) -> int:
    """The first coset (by key) measuring Pauli line `line_idx` of enumerate_pauli_lines."""
    members = enumerate_pauli_lines()[line_idx].members
    for u in range(c2_group().order):
        if _maps_to_z(u, members):
            return u
    raise RuntimeError("no program for this line")


def _check_triple(values: Sequence[int], sign: int, what: str):
    if len(values) != 3 or any(v not in (1, -1) for v in values):
        raise MalformedProver(f"{what}: need three +-1 outcomes")
    if values[0] * values[1] * values[2] != sign:
        raise MalformedProver(f"{what}: outcomes violate the product constraint")


def extract_nonstab_square(row_outcomes, col_outcomes) -> PauliString:
    """A cell whose row-table and column-table values disagree (row-major first)."""
    lines = square_lines()
    for i in range(3):
        _check_triple(row_outcomes[i], lines[i].sign, f"row {i}")
        _check_triple(col_outcomes[i], lines[3 + i].sign, f"column {i}")
    sq = magic_square()
    for i in range(3):
        for j in range(3):
            if row_outcomes[i][j] != col_outcomes[j][i]:
                return sq[i][j]
    raise MalformedProver("row and column tables agree, which the sign constraints forbid")


def square_line_intersection_check() -> bool:
    grp = c2_group()
    lines = [frozenset(p.key() for p in l.members) for l in enumerate_pauli_lines()]
    cells = [p for row in magic_square() for p in row]
    for u in range(grp.order):
        img = {grp.act(u, p).key() for p in cells}
        if any(not (img & l) for l in lines):
            return False
    return True


# -- tolerant voting ------------------------------------------------------------------

def majority_line_extract(tables: Mapping, rng) -> PauliLine:
    """tables: Pauli -> three +-1 outcomes; returns a uniformly random violated line."""
    nu = {}
    for p in two_qubit_paulis():
        vals = tables.get(p.key(), tables.get(label(p)))
        if vals is None or len(vals) != 3:
            raise ValueError(f"need three outcomes for {label(p)}")
        nu[p.key()] = 1 if sum(vals) > 0 else -1
    bad = violated_lines(nu)
    return bad[int(rng.integers(0, len(bad)))]


def line_classes(line: PauliLine) -> tuple:
    """(incident lines other than `line`, non-incident lines) as index lists."""
    lines = enumerate_pauli_lines()
    inc, non = [], []
    for i, l in enumerate(lines):
        if l == line:
            continue
        (inc if l.incident(line) else non).append(i)
    return inc, non


def recover_stabilizer_line(counts: Sequence[int]) -> int:
    """Index of the line whose class structure (1, 6, 8) best fits the counts.

    Score: squared spread inside each of the two larger classes plus the
    squared count of the candidate itself, which should be near zero.
    """
    lines = enumerate_pauli_lines()
    best, best_score = None, None
    for i, l in enumerate(lines):
        inc, non = line_classes(l)
        score = 0.0
        for cls in (inc, non):
            vals = [counts[j] for j in cls]
            mean = sum(vals) / len(vals)
            score += sum((v - mean) ** 2 for v in vals)
        score += counts[i] ** 2
        if best_score is None or score < best_score:
            best, best_score = i, score
    return best


# -- pentagram ----------------------------------------------------------------------------

PENTAGRAM_LINES_TEXT = (
    ("XII", "IXI", "IIX", "XXX"),
    ("XII", "IYI", "IIY", "XYY"),
    ("IXI", "YII", "IIY", "YXY"),
    ("IIX", "YII", "IYI", "YYX"),
    ("XXX", "XYY", "YXY", "YYX"),
)


@lru_cache(maxsize=None)
def pentagram_lines() -> tuple:
    return tuple(PauliLine(tuple(canon(s) for s in line), exact_sign([canon(s) for s in line]))
                 for line in PENTAGRAM_LINES_TEXT)


@lru_cache(maxsize=None)
def pentagram_nodes() -> tuple:
    """The 10 nodes in first-appearance order."""
    out = []
    for line in PENTAGRAM_LINES_TEXT:
        for s in line:
            if s not in out:
                out.append(s)
    return tuple(canon(s) for s in out)


def extract_nonstab_pentagram(quads) -> PauliString:
    lines = pentagram_lines()
    if len(quads) != 5:
        raise MalformedProver("need five line outcomes")
    seen: dict = {}
    for k, (line, vals) in enumerate(zip(lines, quads)):
        if len(vals) != 4 or any(v not in (1, -1) for v in vals):
            raise MalformedProver(f"line {k}: need four +-1 outcomes")
        prod = vals[0] * vals[1] * vals[2] * vals[3]
        if prod != line.sign:
            raise MalformedProver(f"line {k}: outcomes violate the product constraint")
        for p, v in zip(line.members, vals):
            seen.setdefault(p.key(), []).append(v)
    for p in pentagram_nodes():
        vals = seen[p.key()]
        if vals[0] != vals[1]:
            return p
    raise MalformedProver("line outcomes agree on every node, which the signs forbid")
