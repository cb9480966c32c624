"""Random instances for property tests and experiment scripts."""

from __future__ import annotations

import numpy as np

from . import category, extgauss, linrel, willems
from .category import GaussExMorphism
from .extgauss import ExtendedGaussian
from .gauss import GaussianDist, GaussMorphism
from .linalg import Subspace, orthonormalize
from .linrel import TotalLinRel

__all__ = [
    "rng_from",
    "random_matrix",
    "random_rank_deficient",
    "random_subspace",
    "random_psd",
    "random_gaussian",
    "random_extgauss",
    "random_morphism",
    "random_gauss_morphism",
    "random_linrel",
    "mc_battery",
]


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_matrix(rng, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols))


def random_rank_deficient(rng, rows: int, cols: int, r: int | None = None) -> np.ndarray:
    if r is None:
        r = int(rng.integers(0, min(rows, cols) + 1))
    return rng.standard_normal((rows, r)) @ rng.standard_normal((r, cols))


def random_subspace(rng, n: int, d: int | None = None) -> Subspace:
    if d is None:
        d = int(rng.integers(0, n + 1))
    if d == 0:
        return Subspace.zero(n)
    return orthonormalize(rng.standard_normal((n, d)))


def random_psd(rng, n: int, r: int | None = None) -> np.ndarray:
    if r is None:
        r = int(rng.integers(0, n + 1))
    a = rng.standard_normal((n, r))
    return a @ a.T


def random_gaussian(rng, n: int, centered: bool = False) -> GaussianDist:
    mean = np.zeros(n) if centered else rng.standard_normal(n)
    return GaussianDist(mean, random_psd(rng, n))


def random_extgauss(rng, n: int, centered: bool = False, fibre_dim: int | None = None) -> ExtendedGaussian:
    psi = random_gaussian(rng, n, centered)
    return extgauss.make(psi.mean, psi.cov, random_subspace(rng, n, fibre_dim))


def random_morphism(rng, m: int, n: int) -> GaussExMorphism:
    return category.make(random_matrix(rng, n, m), random_extgauss(rng, n))


def random_gauss_morphism(rng, m: int, n: int) -> GaussMorphism:
    return GaussMorphism(random_matrix(rng, n, m), random_gaussian(rng, n))


def random_linrel(rng, m: int, n: int) -> TotalLinRel:
    return linrel.make(random_matrix(rng, n, m), random_subspace(rng, n))


def mc_battery() -> list[tuple[str, "willems.GaussianSystem", "willems.CylinderEvent"]]:
    """Twenty labelled events over open and closed systems, including
    correlated regions in two and three derived coordinates."""
    from .willems import Box, CylinderEvent, GaussianSystem

    inf = np.inf
    r, s2 = 0.5, 1.0 / 16.0
    resistor = GaussianSystem(category.name(category.make([[r]], extgauss.normal([0.0], [[s2]]))).noise)
    law = [-r, 1.0]
    std = GaussianSystem(extgauss.normal([0.0], [[1.0]]))
    rho = 0.7
    pair = GaussianSystem(extgauss.normal([0.5, -1.0], [[1.0, rho], [rho, 2.0]]))
    cov3 = np.array([[2.0, 0.6, -0.4], [0.6, 1.0, 0.3], [-0.4, 0.3, 1.5]])
    triple = GaussianSystem(extgauss.normal([0.0, 1.0, -0.5], cov3))
    # open system on R^3 with a one-dimensional fibre along (1, 1, 1)
    fib = Subspace.span([1.0, 1.0, 1.0])
    open3 = GaussianSystem(extgauss.make([1.0, 0.0, -1.0], np.diag([1.0, 2.0, 0.5]), fib))
    diffs = np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]])

    def box(lo, hi):
        return Box(np.atleast_1d(np.asarray(lo, dtype=float)), np.atleast_1d(np.asarray(hi, dtype=float)))

    return [
        ("resistor: V - R I >= 0", resistor, CylinderEvent.interval(law, 0.0, inf)),
        ("resistor: |V - R I| <= sigma", resistor, CylinderEvent.interval(law, -0.25, 0.25)),
        ("resistor: V - R I <= -0.5", resistor, CylinderEvent.interval(law, -inf, -0.5)),
        ("resistor: union of two tails", resistor,
         CylinderEvent(np.array([law]), (box(-inf, -0.3), box(0.3, inf)))),
        ("resistor: scaled law in [0, 1]", resistor, CylinderEvent.interval([-2 * r, 2.0], 0.0, 1.0)),
        ("std: x <= 1.96", std, CylinderEvent.interval([1.0], -inf, 1.96)),
        ("std: x >= 3", std, CylinderEvent.interval([1.0], 3.0, inf)),
        ("std: overlapping union", std, CylinderEvent([[1.0]], (box(-1.0, 0.5), box(0.0, 2.0)))),
        ("pair: x in [0, 1]", pair, CylinderEvent.interval([1.0, 0.0], 0.0, 1.0)),
        ("pair: positive quadrant", pair, CylinderEvent(np.eye(2), (box([0, 0], [inf, inf]),))),
        ("pair: centred box", pair, CylinderEvent(np.eye(2), (box([-0.5, -2.0], [1.5, 0.0]),))),
        ("pair: x + y <= 0", pair, CylinderEvent.interval([1.0, 1.0], -inf, 0.0)),
        ("pair: strip union", pair,
         CylinderEvent(np.eye(2), (box([-inf, -1.0], [0.0, inf]), box([-1.0, -inf], [inf, -2.0])))),
        ("triple: orthant", triple, CylinderEvent(np.eye(3), (box([0, 0, -inf], [inf, inf, 0]),))),
        ("triple: box", triple, CylinderEvent(np.eye(3), (box([-1, 0, -1.5], [1, 2, 0.5]),))),
        ("triple: two sums", triple,
         CylinderEvent(np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]), (box([0, -inf], [inf, 1.0]),))),
        ("open3: first difference >= 1", open3, CylinderEvent.interval(diffs[0], 1.0, inf)),
        ("open3: both differences", open3, CylinderEvent(diffs, (box([0.0, 0.0], [2.0, 2.0]),))),
        ("open3: second difference near 1", open3, CylinderEvent.interval(diffs[1], 0.5, 1.5)),
        ("open3: contrast tail", open3, CylinderEvent.interval([1.0, -2.0, 1.0], -inf, -1.0)),
    ]
