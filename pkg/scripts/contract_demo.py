"""Train under a wall-clock contract on a problem too large to finish, and report how long it took."""

import argparse
import time

import numpy as np

from cif.forest import CIFConfig, fit, predict
from cif.synthetic import random_walks


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--minutes", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--length", type=int, default=500)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    data = random_walks(args.n, args.length, seed=9)
    fit(random_walks(20, args.length), CIFConfig(num_trees=1))  # jit warm-up
    t0 = time.perf_counter()
    model = fit(data, CIFConfig(contract_minutes=args.minutes), n_jobs=args.threads)
    wall = time.perf_counter() - t0
    times = np.array([t.build_time_s for t in model.trees])
    print(f"trees built:          {len(model.trees)}")
    print(f"wall time:            {wall:.1f}s (budget {args.minutes * 60:.0f}s, slowest tree {times.max():.2f}s)")
    print(f"projected 500 trees:  {times.mean() * 500 / args.threads:.0f}s")
    print(f"train accuracy:       {np.mean(predict(model, data) == data.y()):.3f}")


if __name__ == "__main__":
    main()
