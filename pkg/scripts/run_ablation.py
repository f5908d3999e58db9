"""CIF vs TSF vs Hybrid over seeded resamples, plus the 1-NN baseline on the original split.

    python3 scripts/run_ablation.py --datasets GunPoint ItalyPowerDemand ArrowHead --folds 5 --out results/ablation.csv
"""

import argparse
from pathlib import Path

import numpy as np

from cif.evaluation import pairwise_significance, read_results, run_experiment, write_pairwise_csv
from cif.forest import CIFConfig

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data-dir", type=Path, default=ROOT / "data")
    ap.add_argument("--datasets", nargs="+", default=["GunPoint", "ItalyPowerDemand", "ArrowHead"])
    ap.add_argument("--folds", type=int, default=5)
    ap.add_argument("--trees", type=int, default=None)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "ablation.csv")
    args = ap.parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)

    for ds in args.datasets:
        paths = args.data_dir / f"{ds}_TRAIN.ts", args.data_dir / f"{ds}_TEST.ts"
        for mode in ("cif", "tsf", "hybrid"):
            res = run_experiment(*paths, CIFConfig(mode=mode, num_trees=args.trees), args.folds, args.out, args.threads)
            print(f"{ds:20s} {mode:7s} {np.mean([r.accuracy for r in res]):.4f}", flush=True)
        nn = run_experiment(*paths, "1nn", 1, args.out)
        print(f"{ds:20s} 1nn     {nn[0].accuracy:.4f} (original split)", flush=True)

    rows = read_results(args.out)
    scores = {}
    for clf in ("CIF", "TSF", "HYBRID"):
        scores[clf] = np.array([float(r["accuracy"]) for r in rows if r["classifier"] == clf])
        print(f"mean {clf:7s} {scores[clf].mean():.4f}")
    write_pairwise_csv(pairwise_significance(scores), args.out.with_name(args.out.stem + "_pairwise.csv"))


if __name__ == "__main__":
    main()
