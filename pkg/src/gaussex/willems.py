"""Gaussian systems in Willems' measure-theoretic sense.

A system on R^n only assigns probabilities to Borel cylinders parallel to
its fibre. Events here are E = {x : C x in A} with C annihilating the fibre
and A a finite union of axis-aligned boxes in R^r.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import ndtr

# The frozen class is the only entry point exposing the integration
# tolerances together with a private seed.
from scipy.stats._multivariate import multivariate_normal_frozen

from . import category, extgauss
from .category import GaussExMorphism
from .errors import (
    BadIndex,
    BadPlacement,
    DimensionMismatch,
    InternalInconsistency,
    NotComplementary,
    NotParallel,
    UnsupportedRegion,
)
from .extgauss import ExtendedGaussian, KernelRep
from .gauss import tensor as gauss_tensor
from .linalg import (
    Subspace,
    as_matrix,
    default_tolerance,
    subspace_equal,
    subspace_intersect,
    subspace_sum,
)

__all__ = [
    "GaussianSystem",
    "Box",
    "CylinderEvent",
    "Placement",
    "cylinder_probability",
    "mc_estimate",
    "weaken",
    "is_complementary",
    "interconnect",
    "eliminate",
    "compose_via_interconnection",
    "TheoremReport",
    "theorem_check",
]

# Samples per independently seeded block; shards own whole blocks.
MC_BLOCK = 8192

# Absolute accuracy of correlated box probabilities (randomized lattice rule
# with a fixed seed, so results are reproducible).
CDF_ABSEPS = 1e-8


@dataclass(frozen=True, eq=False)
class GaussianSystem:
    """R^n equipped with an extended Gaussian distribution."""

    dist: ExtendedGaussian

    @property
    def dim(self) -> int:
        return self.dist.dim

    @property
    def fibre(self) -> Subspace:
        return self.dist.fibre

    @property
    def is_closed(self) -> bool:
        return self.dist.is_closed

    @classmethod
    def from_state(cls, st: GaussExMorphism) -> "GaussianSystem":
        if not st.is_state:
            raise DimensionMismatch("only states are Gaussian systems")
        return cls(st.noise)

    def to_state(self) -> GaussExMorphism:
        return category.state(self.dist)

    def equals(self, other: "GaussianSystem", tol=None) -> bool:
        return extgauss.equals(self.dist, other.dist, tol)


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box [lower, upper] in R^r; bounds may be infinite."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lower, dtype=float).reshape(-1)
        hi = np.array(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionMismatch("box bounds differ in length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must not be NaN")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def is_empty(self) -> bool:
        return bool(np.any(self.lower > self.upper))

    def intersect(self, other: "Box") -> "Box":
        return Box(np.maximum(self.lower, other.lower), np.minimum(self.upper, other.upper))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=-1)


@dataclass(frozen=True, eq=False)
class CylinderEvent:
    """The event {x : C x in union(boxes)}."""

    C: np.ndarray
    boxes: tuple = field(default=())

    def __post_init__(self):
        c = np.array(self.C, dtype=float)
        if c.ndim == 1:
            c = c.reshape(1, -1)
        boxes = tuple(self.boxes)
        if not boxes:
            raise ValueError("an event needs at least one box")
        if any(b.dim != c.shape[0] for b in boxes):
            raise DimensionMismatch("box dimension must equal the number of rows of C")
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "boxes", boxes)

    @classmethod
    def interval(cls, c, lower: float, upper: float) -> "CylinderEvent":
        return cls(np.reshape(np.asarray(c, dtype=float), (1, -1)), (Box([lower], [upper]),))

    @property
    def rows(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class Placement:
    """Injective assignment of a system's coordinates into R^total_dim."""

    total_dim: int
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx) or any(not 0 <= i < self.total_dim for i in idx):
            raise BadPlacement(f"{idx} is not an injective placement into R^{self.total_dim}")
        object.__setattr__(self, "indices", idx)

    def embedding(self) -> np.ndarray:
        e = np.zeros((self.total_dim, len(self.indices)))
        for j, i in enumerate(self.indices):
            e[i, j] = 1.0
        return e

    def free_axes(self) -> list[int]:
        used = set(self.indices)
        return [i for i in range(self.total_dim) if i not in used]


def _check_event(sys: GaussianSystem, ev: CylinderEvent, tol=None) -> None:
    t = default_tolerance() if tol is None else tol
    if ev.C.shape[1] != sys.dim:
        raise DimensionMismatch(f"event matrix has {ev.C.shape[1]} columns, system lives in R^{sys.dim}")
    leak = ev.C @ sys.fibre.basis
    scale = max(1.0, float(np.linalg.norm(ev.C)))
    if leak.size and float(np.linalg.norm(leak)) > t.eq * scale:
        raise NotParallel("event is not a cylinder parallel to the fibre")


def _derived_gaussian(sys: GaussianSystem, c: np.ndarray):
    return c @ sys.dist.mean, c @ sys.dist.cov @ c.T


# Analytic probabilities


def _box_prob_diagonal(mean, var, box: Box) -> float:
    p = 1.0
    for m, v, lo, hi in zip(mean, var, box.lower, box.upper):
        if v <= 0:
            p *= float(lo <= m <= hi)
        else:
            s = np.sqrt(v)
            p *= max(0.0, float(ndtr((hi - m) / s) - ndtr((lo - m) / s)))
    return p


def _interval_prob(f: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """P(lo <= f z <= hi) for scalar z ~ N(0, 1), f a column of loadings."""
    zlo, zhi = -np.inf, np.inf
    eps = 1e-13 * max(1.0, float(np.abs(f).max(initial=0.0)))
    for fi, a, b in zip(f, lo, hi):
        if abs(fi) <= eps:
            if not a <= 0.0 <= b:
                return 0.0
            continue
        l, u = a / fi, b / fi
        if fi < 0:
            l, u = u, l
        zlo, zhi = max(zlo, l), min(zhi, u)
    if zlo >= zhi:
        return 0.0
    return float(ndtr(zhi) - ndtr(zlo))


def _polytope_prob(f: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """P(lo <= F z <= hi) for z ~ N(0, I_k): quadrature over leading
    coordinates, exact normal CDF for the last one."""
    k = f.shape[1]
    if k == 0:
        return float(np.all((lo <= 0.0) & (0.0 <= hi)))
    if k == 1:
        return _interval_prob(f[:, 0], lo, hi)
    head, rest = f[:, 0], f[:, 1:]

    def integrand(z):
        return np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi) * _polytope_prob(rest, lo - head * z, hi - head * z)

    val, _ = integrate.quad(integrand, -12.0, 12.0, limit=200, epsabs=1e-12, epsrel=1e-10)
    return float(min(1.0, max(0.0, val)))


def _box_prob(mean: np.ndarray, cov: np.ndarray, box: Box) -> float:
    if box.is_empty:
        return 0.0
    r = mean.shape[0]
    off = cov - np.diag(np.diag(cov))
    if r <= 1 or float(np.abs(off).max()) <= 1e-14 * max(1.0, float(np.abs(cov).max())):
        return _box_prob_diagonal(mean, np.diag(cov), box)
    if r > 3:
        raise UnsupportedRegion("correlated regions are supported in at most 3 derived coordinates")
    w, v = np.linalg.eigh(cov)
    keep = w > 1e-12 * max(1.0, float(w.max()))
    if keep.all():
        dist = multivariate_normal_frozen(mean, cov, seed=0, abseps=CDF_ABSEPS, releps=0.0)
        val = float(dist.cdf(box.upper, lower_limit=box.lower))
        return min(1.0, max(0.0, val))
    # rank-deficient: at most two latent coordinates, integrated directly
    loadings = v[:, keep] * np.sqrt(w[keep])
    return _polytope_prob(loadings, box.lower - mean, box.upper - mean)


def cylinder_probability(sys: GaussianSystem, ev: CylinderEvent) -> float:
    """Probability of {x : C x in A}, via the Gaussian law of C x.

    Unions of boxes are handled by inclusion-exclusion over their
    intersections.
    """
    _check_event(sys, ev)
    mean, cov = _derived_gaussian(sys, ev.C)
    total = 0.0
    n = len(ev.boxes)
    for size in range(1, n + 1):
        for combo in itertools.combinations(ev.boxes, size):
            box = combo[0]
            for b in combo[1:]:
                box = box.intersect(b)
            total += (-1) ** (size + 1) * _box_prob(mean, cov, box)
    return float(min(1.0, max(0.0, total)))


# Monte-Carlo oracle


def _box_muller(rng: np.random.Generator, shape) -> np.ndarray:
    count = int(np.prod(shape))
    pairs = (count + 1) // 2
    u1 = 1.0 - rng.random(pairs)  # in (0, 1]
    u2 = rng.random(pairs)
    rad = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([rad * np.cos(2 * np.pi * u2), rad * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(shape)


def _block_hits(seed: int, block: int, size: int, mean, loadings, boxes) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, block])))
    z = _box_muller(rng, (size, loadings.shape[1]))
    pts = mean + z @ loadings.T
    inside = np.zeros(size, dtype=bool)
    for b in boxes:
        inside |= b.contains(pts)
    return int(inside.sum())


def mc_estimate(
    sys: GaussianSystem, ev: CylinderEvent, n_samples: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Frequency estimate of the event probability and its binomial standard error.

    Samples C x directly from its Gaussian law (fibre directions do not
    affect a parallel cylinder). Sample i always comes from the same seeded
    block, so the result does not depend on ``workers``.
    """
    _check_event(sys, ev)
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    mean, cov = _derived_gaussian(sys, ev.C)
    w, v = np.linalg.eigh(cov) if cov.size else (np.zeros(0), np.zeros((0, 0)))
    w = np.clip(w, 0.0, None)
    loadings = v * np.sqrt(w)
    sizes = [min(MC_BLOCK, n_samples - start) for start in range(0, n_samples, MC_BLOCK)]

    def run(block):
        return _block_hits(seed, block, sizes[block], mean, loadings, ev.boxes)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, range(len(sizes))))
    else:
        hits = sum(run(b) for b in range(len(sizes)))
    p = hits / n_samples
    return p, float(np.sqrt(p * (1.0 - p) / n_samples))


# Structural operations


def weaken(sys: GaussianSystem, placement: Placement) -> GaussianSystem:
    """Place a system into a larger product space; new axes are left free."""
    if len(placement.indices) != sys.dim:
        raise BadPlacement(f"placement maps {len(placement.indices)} coordinates, system has {sys.dim}")
    e = placement.embedding()
    placed = extgauss.pushforward(e, sys.dist)
    free = Subspace.coordinates(placement.total_dim, placement.free_axes())
    return GaussianSystem(extgauss.make(placed.mean, placed.cov, subspace_sum(placed.fibre, free)))


def is_complementary(s1: GaussianSystem, s2: GaussianSystem) -> bool:
    if s1.dim != s2.dim:
        raise DimensionMismatch("systems live on different spaces")
    return subspace_sum(s1.fibre, s2.fibre).dim == s1.dim


def interconnect(s1: GaussianSystem, s2: GaussianSystem) -> GaussianSystem:
    """Interconnection of complementary systems.

    Stacking kernel representations q = [q1; q2] with decoration psi1 (x) psi2
    gives the unique system whose events are generated by the intersections.
    """
    if not is_complementary(s1, s2):
        raise NotComplementary("fibres do not span the whole space")
    k1, k2 = extgauss.to_kernel_rep(s1.dist), extgauss.to_kernel_rep(s2.dist)
    rep = KernelRep(np.vstack([k1.q, k2.q]), gauss_tensor(k1.psi, k2.psi))
    out = extgauss.from_kernel_rep(rep)
    if not subspace_equal(out.fibre, subspace_intersect(s1.fibre, s2.fibre)):
        raise InternalInconsistency("interconnection fibre differs from D1 cap D2")
    return GaussianSystem(out)


def eliminate(sys: GaussianSystem, keep) -> GaussianSystem:
    """Forget every coordinate not listed in ``keep``."""
    keep = [int(i) for i in keep]
    if any(not 0 <= i < sys.dim for i in keep):
        raise BadIndex(f"indices {keep} out of range for R^{sys.dim}")
    proj = np.zeros((len(keep), sys.dim))
    for row, i in enumerate(keep):
        proj[row, i] = 1.0
    return GaussianSystem(extgauss.pushforward(proj, sys.dist))


@dataclass(frozen=True, eq=False)
class TheoremReport:
    composite: GaussExMorphism
    complementary: bool
    joint_distance: float
    composite_distance: float


def theorem_check(f: GaussExMorphism, g: GaussExMorphism) -> TheoremReport:
    """Run the name-interconnection pipeline and measure it against direct composition."""
    if f.cod_dim != g.dom_dim:
        raise DimensionMismatch("morphisms are not composable")
    lx, my, nz = f.dom_dim, f.cod_dim, g.cod_dim
    total = lx + my + nz
    s1 = weaken(GaussianSystem.from_state(category.name(f)), Placement(total, range(lx + my)))
    s2 = weaken(GaussianSystem.from_state(category.name(g)), Placement(total, range(lx, total)))
    comp = is_complementary(s1, s2)
    joint = interconnect(s1, s2)
    shared = category.compose_all(f, category.copy(my), category.tensor(category.identity(my), g))
    joint_dist = extgauss.distance(joint.dist, category.name(shared).noise)
    outer = eliminate(joint, list(range(lx)) + list(range(lx + my, total)))
    composite = category.conditional(outer.to_state(), lx)
    comp_dist = category.distance(composite, category.compose(g, f))
    return TheoremReport(composite, comp, joint_dist, comp_dist)


def compose_via_interconnection(f: GaussExMorphism, g: GaussExMorphism, tol=None) -> GaussExMorphism:
    """g o f obtained by interconnecting weakened names and eliminating Y."""
    t = default_tolerance() if tol is None else tol
    rep = theorem_check(f, g)
    if rep.joint_distance >= t.eq:
        raise InternalInconsistency(
            f"interconnected names differ from the shared composite by {rep.joint_distance:.3e}"
        )
    return rep.composite
