"""Accuracy and cost of the extraction drivers as the instance length grows.

    python3 scripts/extraction_sweep.py --kind nc1 --sizes 10 30 100 --instances 20
"""

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from cliffsim import hardness as Hd
from cliffsim import protocol as P


@dataclass
class SweepConfig:
    kind: str = "nc1"
    sizes: list = field(default_factory=lambda: [10, 30, 100])
    m: int = 4
    instances: int = 20
    prover: str = "honest"
    seed: int = 0


def factory(name, rng):
    if name == "lazy":
        return P.lazy_adversarial_prover
    return lambda g: P.honest_prover(g, rng)


def one(cfg: SweepConfig, n: int, k: int) -> dict:
    rng = np.random.default_rng([cfg.seed, n, k])
    fac = factory(cfg.prover, rng)
    stats = {}
    t0 = time.perf_counter()
    if cfg.kind == "nc1":
        truth = ("II", "HH")[k % 2]
        verdict = P.extract_nc1(fac, Hd.gen_s6_promise_instance(truth, n, rng), rng, stats=stats)
    elif cfg.kind == "parityL":
        truth = ("identity", "C3")[k % 2]
        w = Hd.gen_promise_instance(truth, max(n, 12), cfg.m, rng)
        verdict = P.extract_parityL(fac, w, rng, stats=stats)
    else:
        U, V = rng.integers(0, 6, n).tolist(), rng.integers(0, 6, n).tolist()
        truth = "".join(P.line_reference(U, V))
        got = P.extract_ac0mod6(fac, U, V, rng, stats=stats)
        verdict = got if got == "unknown" else "".join(got)
    return {"correct": verdict == truth, "unknown": verdict == "unknown", "calls": stats.get("calls", 0),
            "round2": stats.get("round2", 0), "secs": time.perf_counter() - t0}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", choices=["nc1", "parityL", "line"], default="nc1")
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 30, 100])
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--prover", choices=["honest", "lazy"], default="honest")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    cfg = SweepConfig(args.kind, args.sizes, args.m, args.instances, args.prover, args.seed)
    rows = []
    for n in cfg.sizes:
        recs = [one(cfg, n, k) for k in range(cfg.instances)]
        row = {"n": n, "accuracy": np.mean([r["correct"] for r in recs]),
               "unknown": np.mean([r["unknown"] for r in recs]),
               "mean_calls": np.mean([r["calls"] for r in recs]),
               "mean_round2": np.mean([r["round2"] for r in recs]),
               "mean_secs": np.mean([r["secs"] for r in recs])}
        rows.append({k: float(v) if k != "n" else v for k, v in row.items()})
        print(f"n={n:4d}  accuracy {row['accuracy']:.2f}  unknown {row['unknown']:.2f}  "
              f"calls {row['mean_calls']:7.1f}  round-2 {row['mean_round2']:8.1f}  {row['mean_secs']:.2f}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"config": asdict(cfg), "rows": rows}, fh, indent=1)


if __name__ == "__main__":
    main()
