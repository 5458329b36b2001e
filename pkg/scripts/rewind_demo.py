"""One rewinding session on the narrow grid, printed step by step."""

import argparse

import numpy as np

from cliffsim import hardness as Hd
from cliffsim import protocol as P
from cliffsim.contextuality import extract_nonstab_square, square_lines


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--target", choices=["II", "HH"], default="II")
    ap.add_argument("--lazy", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    rng = np.random.default_rng(a.seed)
    word = Hd.gen_s6_promise_instance(a.target, a.n, rng)
    geo = P.narrow_geometry(a.n)
    prover = P.lazy_adversarial_prover(geo) if a.lazy else P.honest_prover(geo, rng)
    oracle = P.RewindOracle(prover)
    A = P.narrow_round1(word)
    r1 = oracle.start(A)
    print(f"grid {geo.rows} x {geo.cols}, round 1 on {geo.round1_cols} columns, {int(r1.sum())} ones")
    vals = []
    for prog, line in zip(P.square_programs_narrow(), square_lines()):
        r2 = oracle.query(prog.challenge)
        v = prog.values(r2)
        ok = P.verify_transcript(P.Transcript(geo, P.Challenge("narrow", A, prog.challenge), r1, r2))
        print(f"  {str(line):22s} -> {v}  verified {ok}")
        vals.append(v)
    p = extract_nonstab_square(vals[:3], vals[3:])
    print(f"non-stabilizer of the committed state: {p.letters}")


if __name__ == "__main__":
    main()
