#!/usr/bin/env python3
"""Reproduce the headline experiments: satisfaction vs. session count, and
improved vs. degraded user counts, for both popularity distributions.

Writes one CSV + manifest per distribution under results/ and prints a
compact table. Everything is seeded, so reruns are byte-identical.
"""

import argparse
from pathlib import Path

from popalloc import ScenarioConfig, SystemParams, emit_sweep_outputs, run_sweep

CAPACITY_MBPS = 30.0
BETA_MAX_MBPS = 2.0
BETA_MIN_MBPS = 0.6
TOTAL_USERS = 200
SESSION_RANGE = range(5, 41)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replications", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--zipf-s", type=float, default=1.0)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    args = parser.parse_args()

    params = SystemParams.from_mbps(CAPACITY_MBPS, BETA_MAX_MBPS, BETA_MIN_MBPS)
    for dist in ("uniform", "zipf"):
        config = ScenarioConfig(
            params=params,
            session_counts=tuple(SESSION_RANGE),
            total_users=TOTAL_USERS,
            dist=dist,
            zipf_s=args.zipf_s,
            replications=args.replications,
            seed=args.seed,
        )
        rows = run_sweep(config)
        csv_path, manifest_path = emit_sweep_outputs(
            rows, args.out_dir / f"satisfaction_sweep_{dist}.csv", config
        )
        print(f"\n{dist}: wrote {csv_path} (+ {manifest_path.name})")
        print(f"{'M':>4} {'sat_equal':>10} {'sat_prop':>10} {'improved':>9} {'degraded':>9}")
        for row in rows:
            if row.session_count % 5 == 0:
                print(
                    f"{row.session_count:>4} {row.avg_sat_equal_mean:>10.4f} "
                    f"{row.avg_sat_prop_mean:>10.4f} {row.improved_mean:>9.2f} "
                    f"{row.degraded_mean:>9.2f}"
                )


if __name__ == "__main__":
    main()
