"""Root gap and node counts of the epi and lepi cut families on MPKPG instances."""

import argparse
import statistics

from lepi.apps import build_model, generate_mpkpg
from lepi.bnc import SolveConfig, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=30)
    ap.add_argument("--m", type=int, default=5)
    ap.add_argument("--beta", type=float, default=0.5)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--time-limit", type=float, default=120.0)
    args = ap.parse_args()

    rows = {"none": [], "epi": [], "lepi": []}
    for seed in range(args.instances):
        model = build_model(generate_mpkpg(args.n, args.m, args.beta, seed))
        line = [f"seed {seed:3d}"]
        for fam in rows:
            rep = solve(model, SolveConfig(cut_family=fam, time_limit=args.time_limit))
            rows[fam].append(rep)
            line.append(f"{fam}: rgap {rep.root_gap_pct:6.2f}% nodes {rep.nodes:6d} {rep.time_s:6.2f}s")
        print("  ".join(line))
    print()
    for fam, reps in rows.items():
        print(f"{fam:5s} solved {sum(r.solved for r in reps):3d}  "
              f"mean rgap {statistics.mean(r.root_gap_pct for r in reps):6.2f}%  "
              f"median nodes {statistics.median(r.nodes for r in reps):8.1f}  "
              f"mean time {statistics.mean(r.time_s for r in reps):6.2f}s")


if __name__ == "__main__":
    main()
