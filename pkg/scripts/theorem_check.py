"""Compose random morphism pairs two ways (normal form, and interconnection of
weakened names followed by elimination) and report the worst disagreement."""

import argparse
import time
from dataclasses import dataclass

import numpy as np

from gaussex import willems
from gaussex.testing import random_morphism


@dataclass
class TheoremConfig:
    pairs: int = 200
    max_dim: int = 4
    seed: int = 0


def main(cfg: TheoremConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    worst_joint = worst_comp = 0.0
    noncomp = 0
    start = time.perf_counter()
    for _ in range(cfg.pairs):
        a, b, c = (int(d) for d in rng.integers(0, cfg.max_dim + 1, size=3))
        rep = willems.theorem_check(random_morphism(rng, a, b), random_morphism(rng, b, c))
        noncomp += not rep.complementary
        worst_joint = max(worst_joint, rep.joint_distance)
        worst_comp = max(worst_comp, rep.composite_distance)
    elapsed = time.perf_counter() - start
    print(f"pairs {cfg.pairs}, non-complementary {noncomp}")
    print(f"worst joint distance     {worst_joint:.3e}")
    print(f"worst composite distance {worst_comp:.3e}")
    print(f"elapsed {elapsed:.2f} s")
    return 0 if noncomp == 0 and max(worst_joint, worst_comp) < 1e-8 else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--pairs", type=int, default=TheoremConfig.pairs)
    p.add_argument("--max-dim", type=int, default=TheoremConfig.max_dim)
    p.add_argument("--seed", type=int, default=TheoremConfig.seed)
    raise SystemExit(main(TheoremConfig(**vars(p.parse_args()))))
