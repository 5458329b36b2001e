"""Grid graph states with per-vertex X/Y bases: the MeasurementLayout type.

Vertex (r, c) of an R x L grid has id c*R + r, so ids run top to bottom and
then left to right.  Every row carries a horizontal wire; vertical edges
join (r, c) and (r+1, c).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class MeasurementLayout:
    rows: int
    cols: int
    hedges: np.ndarray  # (rows, cols-1), edge (r,c)-(r,c+1)
    vedges: np.ndarray  # (rows-1, cols), edge (r,c)-(r+1,c)
    basis: np.ndarray   # (rows, cols) int8: 0 X, 1 Y, -1 none
    rounds: np.ndarray  # (rows, cols) uint8: 1 or 2, 0 for unmeasured
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    header: dict = field(default_factory=dict)

    def __post_init__(self):
        self.hedges = np.asarray(self.hedges, dtype=np.uint8).reshape(self.rows, max(self.cols - 1, 0))
        self.vedges = np.asarray(self.vedges, dtype=np.uint8).reshape(max(self.rows - 1, 0), self.cols)
        self.basis = np.asarray(self.basis, dtype=np.int8).reshape(self.rows, self.cols)
        self.rounds = np.asarray(self.rounds, dtype=np.uint8).reshape(self.rows, self.cols)

    # -- geometry ----------------------------------------------------------
    @property
    def num_vertices(self) -> int:
        return self.rows * self.cols

    def vid(self, r: int, c: int) -> int:
        return c * self.rows + r

    def coords(self, v: int) -> tuple:
        return v % self.rows, v // self.rows

    def edges(self) -> list:
        out = []
        R = self.rows
        for r, c in zip(*np.nonzero(self.hedges)):
            out.append((int(c) * R + int(r), (int(c) + 1) * R + int(r)))
        for r, c in zip(*np.nonzero(self.vedges)):
            out.append((int(c) * R + int(r), int(c) * R + int(r) + 1))
        return sorted(out)

    def adjacency(self) -> np.ndarray:
        n = self.num_vertices
        adj = np.zeros((n, n), dtype=np.uint8)
        for a, b in self.edges():
            adj[a, b] = adj[b, a] = 1
        return adj

    def neighbour_parity(self, r_bits: np.ndarray) -> np.ndarray:
        """(r A) as an R x L array for r given per grid vertex."""
        r_bits = np.asarray(r_bits, dtype=np.uint8).reshape(self.rows, self.cols)
        out = np.zeros_like(r_bits)
        h = self.hedges
        out[:, 1:] ^= r_bits[:, :-1] & h
        out[:, :-1] ^= r_bits[:, 1:] & h
        v = self.vedges
        out[1:, :] ^= r_bits[:-1, :] & v
        out[:-1, :] ^= r_bits[1:, :] & v
        return out

    def measured_mask(self) -> np.ndarray:
        return self.rounds > 0

    def is_full_wire(self) -> bool:
        return bool(self.hedges.all())

    def check(self) -> None:
        if self.hedges.shape != (self.rows, max(self.cols - 1, 0)):
            raise ValueError("horizontal edge array has the wrong shape")
        if self.vedges.shape != (max(self.rows - 1, 0), self.cols):
            raise ValueError("vertical edge array has the wrong shape")
        meas = self.rounds > 0
        if (self.basis[meas] < 0).any():
            raise ValueError("a measured vertex has no basis")
        outs = {self.coords(v) for v in self.outputs}
        for (r, c) in outs:
            if self.rounds[r, c] != 0:
                raise ValueError("output vertex is measured")

    def with_basis(self, basis: np.ndarray) -> "MeasurementLayout":
        return MeasurementLayout(self.rows, self.cols, self.hedges, self.vedges, basis, self.rounds,
                                 list(self.inputs), list(self.outputs), dict(self.header))

    # -- serialization --------------------------------------------------------
    def to_text(self) -> str:
        doc = {
            "rows": self.rows,
            "cols": self.cols,
            "edges": [[list(self.coords(a)), list(self.coords(b))] for a, b in self.edges()],
            "basis": ["".join("." if b < 0 else str(int(b)) for b in row) for row in self.basis],
            "rounds": ["".join(str(int(x)) for x in row) for row in self.rounds],
            "inputs": [list(self.coords(v)) for v in self.inputs],
            "outputs": [list(self.coords(v)) for v in self.outputs],
            "header": self.header,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_text(cls, text: str) -> "MeasurementLayout":
        doc = json.loads(text)
        R, L = doc["rows"], doc["cols"]
        h = np.zeros((R, max(L - 1, 0)), dtype=np.uint8)
        v = np.zeros((max(R - 1, 0), L), dtype=np.uint8)
        for (r1, c1), (r2, c2) in doc["edges"]:
            if r1 == r2 and abs(c1 - c2) == 1:
                h[r1, min(c1, c2)] = 1
            elif c1 == c2 and abs(r1 - r2) == 1:
                v[min(r1, r2), c1] = 1
            else:
                raise ValueError("edge is not between grid neighbours")
        basis = np.array([[-1 if ch == "." else int(ch) for ch in row] for row in doc["basis"]], dtype=np.int8)
        rounds = np.array([[int(ch) for ch in row] for row in doc["rounds"]], dtype=np.uint8)
        ins = [c * R + r for r, c in doc["inputs"]]
        outs = [c * R + r for r, c in doc["outputs"]]
        return cls(R, L, h, v, basis.reshape(R, L), rounds.reshape(R, L), ins, outs, doc["header"])


def blank_layout(rows: int, cols: int, measured_cols: int | None = None) -> MeasurementLayout:
    """Full horizontal wires, no vertical edges, outputs in the last column."""
    measured_cols = cols - 1 if measured_cols is None else measured_cols
    hedges = np.ones((rows, max(cols - 1, 0)), dtype=np.uint8)
    vedges = np.zeros((max(rows - 1, 0), cols), dtype=np.uint8)
    basis = np.full((rows, cols), -1, dtype=np.int8)
    rounds = np.zeros((rows, cols), dtype=np.uint8)
    rounds[:, :measured_cols] = 1
    inputs = [r for r in range(rows)]
    outputs = [(cols - 1) * rows + r for r in range(rows)] if measured_cols < cols else []
    return MeasurementLayout(rows, cols, hedges, vedges, basis, rounds, inputs, outputs, {})
