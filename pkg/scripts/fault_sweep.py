"""Tolerant NC1 extraction under injected round-2 faults.

    python3 scripts/fault_sweep.py --eps 0 0.01 0.02 0.05 --n 30 --instances 20
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from cliffsim import hardness as Hd
from cliffsim import protocol as P


@dataclass
class FaultConfig:
    eps: list = field(default_factory=lambda: [0.0, 0.01, 0.02, 0.05])
    n: int = 30
    instances: int = 20
    seed: int = 0


def run(cfg: FaultConfig):
    for eps in cfg.eps:
        correct = 0
        for k in range(cfg.instances):
            rng = np.random.default_rng([cfg.seed, k, int(eps * 1e4)])
            truth = ("II", "HH")[k % 2]
            w = Hd.gen_s6_promise_instance(truth, cfg.n, rng)
            fac = lambda g, rng=rng: P.faulty_prover(P.honest_prover(g, rng), eps, rng)
            correct += P.extract_nc1_tolerant(fac, w, rng) == truth
        print(f"eps={eps:.3f}  correct {correct}/{cfg.instances}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.05])
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    run(FaultConfig(a.eps, a.n, a.instances, a.seed))


if __name__ == "__main__":
    main()
