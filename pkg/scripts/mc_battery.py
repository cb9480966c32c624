"""Check analytic cylinder probabilities against seeded Monte Carlo on the
built-in 20-event battery."""

import argparse
import time
from dataclasses import dataclass

import numpy as np

from gaussex import willems
from gaussex.testing import mc_battery


@dataclass
class BatteryConfig:
    samples: int = 100_000
    seed: int = 2024
    workers: int = 1
    sigmas: float = 4.0


def main(cfg: BatteryConfig) -> int:
    start = time.perf_counter()
    worst = 0.0
    for label, system, event in mc_battery():
        p = willems.cylinder_probability(system, event)
        est, _ = willems.mc_estimate(system, event, cfg.samples, cfg.seed, workers=cfg.workers)
        se = max(np.sqrt(p * (1.0 - p) / cfg.samples), 1.0 / cfg.samples)
        z = abs(est - p) / se
        worst = max(worst, z)
        print(f"{'ok ' if z <= cfg.sigmas else 'BAD'} {label:<34} analytic {p:.6f}  mc {est:.6f}  z {z:.2f}")
    print(f"max |z| {worst:.2f}, elapsed {time.perf_counter() - start:.2f} s")
    return 0 if worst <= cfg.sigmas else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=BatteryConfig.samples)
    p.add_argument("--seed", type=int, default=BatteryConfig.seed)
    p.add_argument("--workers", type=int, default=BatteryConfig.workers)
    p.add_argument("--sigmas", type=float, default=BatteryConfig.sigmas)
    raise SystemExit(main(BatteryConfig(**vars(p.parse_args()))))
