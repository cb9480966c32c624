"""Noisy resistor walk-through: the open system P_VI, its marginals and
pushforward, and interconnection with an ideal voltage source."""

import argparse
from dataclasses import dataclass

import numpy as np

from gaussex import category, extgauss, quadratic, willems
from gaussex.linalg import Subspace


@dataclass
class ResistorConfig:
    resistance: float = 0.5
    sigma: float = 0.25
    voltage: float = 1.0


def show(label: str, chi) -> None:
    print(f"{label}: fibre dim {chi.fibre_dim}, mean {np.round(chi.mean, 12).tolist()}, "
          f"cov {np.round(chi.cov, 12).tolist()}")


def main(cfg: ResistorConfig) -> None:
    r, s2 = cfg.resistance, cfg.sigma**2
    # V = R I + e with I uninformative; reorder the name to (V, I)
    gen = category.make([[r]], extgauss.normal([0.0], [[s2]]))
    p_vi = category.compose(category.swap(1, 1), category.name(gen))
    show("P_VI", p_vi.noise)
    show("P_V", category.marginal(p_vi, [0]).noise)
    show("P_I", category.marginal(p_vi, [1]).noise)
    show("V - R I", extgauss.pushforward([[1.0, -r]], p_vi.noise))

    resistor = willems.GaussianSystem(p_vi.noise)
    source = willems.GaussianSystem(
        extgauss.make([cfg.voltage, 0.0], np.zeros((2, 2)), Subspace.span([0.0, 1.0]))
    )
    print(f"complementary: {willems.is_complementary(resistor, source)}")
    joint = willems.interconnect(resistor, source)
    show("I after clamping V", willems.eliminate(joint, [1]).dist)
    show("same, by adding precisions", extgauss.pushforward(
        [[0.0, 1.0]], quadratic.interconnect_precision(resistor.dist, source.dist)))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--resistance", type=float, default=ResistorConfig.resistance)
    p.add_argument("--sigma", type=float, default=ResistorConfig.sigma)
    p.add_argument("--voltage", type=float, default=ResistorConfig.voltage)
    main(ResistorConfig(**vars(p.parse_args())))
