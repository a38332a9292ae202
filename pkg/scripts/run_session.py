#!/usr/bin/env python3
"""Run simulated preference sessions across profiles/seeds and print the
alignment curves (the experiment behind the preference-learning acceptance
criterion)."""

import argparse
import time

import numpy as np

from legendgen.feedback import PROFILES, run_session
from legendgen.fixtures import corpus_split
from legendgen.pipeline import Document


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profiles", nargs="*", default=list(PROFILES))
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--tuples", type=int, default=50)
    args = ap.parse_args()

    train_svgs, held_svgs = corpus_split()
    training = [Document.from_svg(t) for _, t in train_svgs]
    heldout = [Document.from_svg(t) for _, t in held_svgs]
    print(f"corpus: {len(training)} training charts, {len(heldout)} heldout")

    for profile in args.profiles:
        t0 = time.time()
        curves = []
        for seed in range(args.seeds):
            res = run_session(profile, training, heldout, seed=seed,
                              target_tuples=args.tuples)
            curves.append(res.accuracy_at)
        checkpoints = sorted(curves[0])
        medians = {n: float(np.median([c[n] for c in curves])) for n in checkpoints}
        print(f"{profile}:")
        for n in checkpoints:
            spread = [round(c[n], 3) for c in curves]
            print(f"  after {n:3d} tuples: median={medians[n]:.3f} seeds={spread}")
        print(f"  elapsed {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
