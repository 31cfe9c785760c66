"""Sweep t and tabulate how tightly K(t) and the ellipse wrap the convex hull of the reachable set."""
import argparse
import csv
import sys

import numpy as np

from safe_horizon.sim.model import fmt
from safe_horizon.verify import jaccard_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-min", type=float, default=1.6)
    ap.add_argument("--t-max", type=float, default=50.0)
    ap.add_argument("--n", type=int, default=25)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["t", "dj_hull_kset", "dj_hull_ellipse"])
    for t, dk, de in jaccard_table(np.geomspace(args.t_min, args.t_max, args.n)):
        w.writerow([fmt(float(t)), fmt(dk), fmt(de)])


if __name__ == "__main__":
    main()
