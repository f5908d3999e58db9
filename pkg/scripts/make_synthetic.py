"""Write a planted-window problem as _TRAIN/_TEST .ts files."""

import argparse
from pathlib import Path

from cif.synthetic import planted_window
from cif.tsdata import write_ts_file


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("synthetic"))
    ap.add_argument("--name", default="PlantedWindow")
    ap.add_argument("--n-train", type=int, default=60)
    ap.add_argument("--n-test", type=int, default=100)
    ap.add_argument("--length", type=int, default=100)
    ap.add_argument("--window", type=int, nargs=2, default=(40, 60))
    ap.add_argument("--shift", type=float, default=1.0)
    ap.add_argument("--dims", type=int, default=1)
    ap.add_argument("--informative-dim", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n = args.n_train + args.n_test
    data = planted_window(n, args.length, tuple(args.window), args.shift, args.dims, args.informative_dim, seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_ts_file(data.subset(range(args.n_train)), args.out_dir / f"{args.name}_TRAIN.ts")
    write_ts_file(data.subset(range(args.n_train, n)), args.out_dir / f"{args.name}_TEST.ts")
    print(f"wrote {args.out_dir}/{args.name}_TRAIN.ts and _TEST.ts")


if __name__ == "__main__":
    main()
