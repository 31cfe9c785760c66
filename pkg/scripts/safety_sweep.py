"""Run many seeded random lossy scenarios and report collisions and the closest approach."""
import argparse
import time

from safe_horizon.sim import random_scenario, run_scenario
from safe_horizon.sim.model import fmt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--drop", type=float, default=0.5)
    args = ap.parse_args()

    t0 = time.perf_counter()
    worst, hits = float("inf"), 0
    for r in range(args.runs):
        log = run_scenario(random_scenario(args.seed * 100_003 + r, drop_probability=args.drop))
        hits += log.collisions()
        worst = min(worst, log.min_pair_distance())
    print(f"runs={args.runs} collisions={hits} min_pair_distance={fmt(worst)} "
          f"elapsed={time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
