"""Six-robot outage comparison: run with and without safe horizons and report what the outage robots did."""
import argparse
from pathlib import Path

from safe_horizon.sim import outage_scenario, run_scenario
from safe_horizon.sim.model import fmt
from safe_horizon.verify import outage_behaviour


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="outage_runs")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for label, use in (("horizons", True), ("baseline", False)):
        log = run_scenario(outage_scenario(use_horizons=use))
        log.write_csv(out / f"outage_{label}.csv")
        print(f"[{label}] collisions={log.collisions()} min_pair_distance={fmt(log.min_pair_distance())}")
        for r, b in outage_behaviour(log).items():
            print(
                f"  robot {r}: last packet t={fmt(b['last_tick_time'])} horizon={fmt(b['horizon'])} "
                f"stopped at t={fmt(b['observed_stop'])} travelled {fmt(b['travel'])} during the outage"
            )


if __name__ == "__main__":
    main()
