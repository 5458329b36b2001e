"""Command-line driver: instance generation, gadget checks, extraction batches, benchmarks.

Exit codes: 0 success, 1 a check or extraction failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import gadgets as G
from . import hardness as Hd
from . import protocol as P
from .clifford2 import c1_group, c2_group, read_word, word_product, write_word
from .randomize import random_symmetric_stack

KINDS_GEN = ("s6", "cnot-promise", "ldag")
KINDS_EXTRACT = ("nc1", "nc1-tolerant", "parityL", "line")


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    kind: str = ""
    target: str = ""
    n: int = 10
    m: int = 3
    prover: str = "honest"
    epsilon: float = 0.0
    seed: int = 0
    samples: int | None = None
    instances: int = 10
    out: str | None = None
    quick: bool = False

    def check(self):
        if self.n < 1 or self.m < 1 or self.instances < 1:
            raise UsageError("sizes must be positive")
        if not 0 <= self.epsilon < 1:
            raise UsageError("epsilon must lie in [0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must fit in 64 bits")
        if self.samples is not None and self.samples < 1:
            raise UsageError("samples must be positive")
        if self.prover not in ("honest", "lazy", "faulty"):
            raise UsageError(f"unknown prover {self.prover!r}")


def _emit(cfg: ExperimentConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- gen ---------------------------------------------------------------------------

def cmd_gen(cfg: ExperimentConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    if cfg.kind == "s6":
        target = cfg.target or "II"
        if target not in ("II", "HH"):
            raise UsageError("s6 target is II or HH")
        if cfg.n < 2:
            raise UsageError("s6 words need n >= 2")
        word = Hd.gen_s6_promise_instance(target, cfg.n, rng)
        _emit(cfg, write_word(word, target))
    elif cfg.kind == "cnot-promise":
        target = cfg.target or "identity"
        if target not in ("identity", "C3"):
            raise UsageError("cnot-promise target is identity or C3")
        if cfg.m < 3 or (target == "C3" and cfg.n < 12):
            raise UsageError("need m >= 3, and n >= 12 for C3")
        w = Hd.gen_promise_instance(target, cfg.n, cfg.m, rng)
        _emit(cfg, Hd.write_cnot_instance(w, target, cfg.seed))
    elif cfg.kind == "ldag":
        d = Hd.random_ldag(cfg.n, cfg.m, rng)
        bit = Hd.ldag_path_parity(d, 0, cfg.m - 1)
        w = Hd.cnotword_to_cycle_promise(Hd.ldag_to_cnotword(d))
        _emit(cfg, Hd.write_cnot_instance(w, "C3" if bit else "identity", cfg.seed))
    else:
        raise UsageError(f"gen --kind must be one of {', '.join(KINDS_GEN)}")
    print(f"gen {cfg.kind}: wrote {cfg.out or 'stdout'}", file=sys.stderr)
    return 0


# -- verify-gadgets -------------------------------------------------------------------------

def cmd_verify_gadgets(cfg: ExperimentConfig, table: np.ndarray | None = None) -> int:
    rng = np.random.default_rng(cfg.seed)
    failures = []
    cosets = range(c2_group().order)
    if cfg.quick:
        cosets = sorted(rng.choice(c2_group().order, size=40, replace=False).tolist())
    for u in cosets:
        if not G.check_brickwork_case(int(u), rng, table):
            failures.append(f"brickwork coset {u}")
    for u in range(c1_group().order):
        if not G.check_line_case(u, rng):
            failures.append(f"line coset {u}")
    wide_trials = 5 if cfg.quick else 40
    for t in range(wide_trials):
        m = int(rng.integers(3, 7))
        n = int(rng.integers(1, 5))
        g = [None if rng.random() < 0.3 else tuple(int(v) for v in rng.choice(m, 2, replace=False))
             for _ in range(n)]
        h = list(random_symmetric_stack(n, m, rng))
        if not G.check_wide_case(g, h, m, rng):
            failures.append(f"wide trial {t} (m={m}, n={n})")
    if not G.single_input_dependence(3, 2, rng):
        failures.append("wide single-input dependence")
    report = {"brickwork": len(cosets), "line": c1_group().order, "wide": wide_trials, "failures": failures}
    if cfg.out:
        _emit(cfg, json.dumps(report, indent=1) + "\n")
    for f in failures:
        print(f"FAIL {f}")
    print(f"verify-gadgets: {len(failures)} failures "
          f"({len(cosets)} brickwork, {c1_group().order} line, {wide_trials} wide cases)")
    return 1 if failures else 0


# -- extract -------------------------------------------------------------------------------

def _factory(cfg: ExperimentConfig, rng):
    if cfg.prover == "honest":
        return lambda g: P.HonestClassicalProver(g, rng)
    if cfg.prover == "lazy":
        return P.LazyProver
    return lambda g: P.FaultyProver(P.HonestClassicalProver(g, rng), cfg.epsilon, rng)


def _extract_one(cfg: ExperimentConfig, k: int, rng) -> dict:
    fac = _factory(cfg, rng)
    stats: dict = {}
    t0 = time.perf_counter()
    if cfg.kind in ("nc1", "nc1-tolerant"):
        truth = ("II", "HH")[k % 2]
        w = Hd.gen_s6_promise_instance(truth, cfg.n, rng)
        if cfg.kind == "nc1":
            verdict = P.extract_nc1(fac, w, rng, calls=cfg.samples, stats=stats)
        else:
            verdict = P.extract_nc1_tolerant(fac, w, rng, samples=cfg.samples, stats=stats)
        ok = verdict == truth
        definite_wrong = verdict not in (truth, "unknown")
    elif cfg.kind == "parityL":
        truth = ("identity", "C3")[k % 2]
        w = Hd.gen_promise_instance(truth, max(cfg.n, 12), cfg.m, rng)
        ecfg = P.ExtractConfig(parity_step2=cfg.samples or 64)
        verdict = P.extract_parityL(fac, w, rng, ecfg, stats)
        ok = verdict == truth
        definite_wrong = truth == "C3" and verdict == "identity"
    else:
        g1 = c1_group()
        U = rng.integers(0, g1.order, cfg.n).tolist()
        V = rng.integers(0, g1.order, cfg.n).tolist()
        truth = P.line_reference(U, V)
        verdict = P.extract_ac0mod6(fac, U, V, rng, budget=cfg.samples or 400, stats=stats)
        ok = verdict == truth
        definite_wrong = verdict not in (truth, "unknown")
        truth, verdict = "".join(truth), verdict if isinstance(verdict, str) else "".join(verdict)
    return {"instance": k, "truth": truth, "verdict": verdict, "correct": bool(ok),
            "definite_wrong": bool(definite_wrong), "oracle_calls": stats.get("calls", 0),
            "round2_queries": stats.get("round2", 0), "wall_time": time.perf_counter() - t0}


def cmd_extract(cfg: ExperimentConfig) -> int:
    if cfg.kind not in KINDS_EXTRACT:
        raise UsageError(f"extract --kind must be one of {', '.join(KINDS_EXTRACT)}")
    if cfg.kind == "parityL" and cfg.m < 3:
        raise UsageError("parityL needs m >= 3")
    count = min(cfg.instances, 4) if cfg.quick else cfg.instances
    seeds = np.random.SeedSequence(cfg.seed).spawn(count)
    records = [_extract_one(cfg, k, np.random.default_rng(s)) for k, s in enumerate(seeds)]
    acc = sum(r["correct"] for r in records) / len(records)
    unknown = sum(r["verdict"] == "unknown" for r in records) / len(records)
    wrong = sum(r["definite_wrong"] for r in records)
    summary = {"kind": cfg.kind, "prover": cfg.prover, "epsilon": cfg.epsilon, "n": cfg.n, "m": cfg.m,
               "instances": len(records), "accuracy": acc, "unknown_rate": unknown, "definite_wrong": wrong,
               "mean_wall_time": float(np.mean([r["wall_time"] for r in records]))}
    if cfg.out:
        _emit(cfg, json.dumps({"config": asdict(cfg), "summary": summary, "records": records}, indent=1) + "\n")
    print(f"extract {cfg.kind} ({cfg.prover}): accuracy {acc:.3f}, unknown {unknown:.3f}, "
          f"wrong definite {wrong}, {len(records)} instances")
    return 1 if wrong else 0


# -- bench ----------------------------------------------------------------------------------

def _timeit(fn, reps: int) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def cmd_bench(cfg: ExperimentConfig) -> int:
    from .stabilizer import measure_multi, plus_state, apply_gates
    from .tableau import compose, from_circuit
    from .graphsim import run_layout
    rng = np.random.default_rng(cfg.seed)
    sizes = [2, 4, 8] if cfg.quick else [2, 4, 8, 16, 32]
    reps = 3 if cfg.quick else 10
    rows = []
    for m in sizes:
        gates = []
        for _ in range(4 * m):
            a, b = (int(v) for v in rng.choice(m, 2, replace=False)) if m > 1 else (0, 0)
            gates += [("H", a), ("CNOT", a, b), ("Rz", b)]
        t1, t2 = from_circuit(m, gates), from_circuit(m, gates[::-1])
        ident = from_circuit(m, [])
        st = apply_gates(plus_state(m), gates)
        qs = list(range(m))
        lay = G.brickwork_gadget([0] * max(1, m // 2))
        rows.append({
            "m": m,
            "compose_identity": _timeit(lambda: compose(ident, ident), reps),
            "compose": _timeit(lambda: compose(t1, t2), reps),
            "measure_multi": _timeit(lambda: measure_multi(st, qs, ["X"] * m, rng), reps),
            "layout_cols": lay.cols,
            "layout_sim": _timeit(lambda: run_layout(lay, rng), reps),
        })
    report = {"schema": ["m", "compose_identity", "compose", "measure_multi", "layout_cols", "layout_sim"],
              "rows": rows}
    if cfg.out:
        _emit(cfg, json.dumps(report, indent=1) + "\n")
    for r in rows:
        print(f"m={r['m']:3d} compose {r['compose'] * 1e6:9.1f}us  measure_multi {r['measure_multi'] * 1e6:9.1f}us  "
              f"layout({r['layout_cols']} cols) {r['layout_sim'] * 1e3:8.2f}ms")
    return 0


# -- entry point -------------------------------------------------------------------------------

COMMANDS = {"gen": cmd_gen, "verify-gadgets": cmd_verify_gadgets, "extract": cmd_extract, "bench": cmd_bench}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cliffsim", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON file with ExperimentConfig fields (flags override it)")
    ap.add_argument("--kind")
    ap.add_argument("--target")
    ap.add_argument("--n", type=int)
    ap.add_argument("--m", type=int)
    ap.add_argument("--prover", choices=["honest", "lazy", "faulty"])
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--instances", type=int)
    ap.add_argument("--out")
    ap.add_argument("--quick", action="store_true", default=None)
    return ap


def make_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig(command=args.command)
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        known = {f.name for f in fields(ExperimentConfig)}
        bad = set(doc) - known
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(sorted(bad))}")
        for k, v in doc.items():
            setattr(cfg, k, v)
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            setattr(cfg, f.name, v)
    cfg.check()
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = make_config(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"cliffsim: {exc}", file=sys.stderr)
        return 2


def read_instance_file(path: str):
    """Word file of either kind: (kind, target, word)."""
    with open(path) as fh:
        text = fh.read()
    if "# kind" in text:
        header, w = Hd.read_cnot_instance(text)
        return "cnot", header.get("kind"), w
    target, word = read_word(text)
    return "s6", target, word


def check_instance_file(path: str) -> bool:
    kind, target, w = read_instance_file(path)
    if kind == "cnot":
        return Hd.word_product_kind(w) == target
    from .clifford2 import C2Coset, hh
    want = C2Coset.identity() if target == "II" else hh()
    return word_product(w).key == want.key


if __name__ == "__main__":
    sys.exit(main())
