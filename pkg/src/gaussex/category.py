"""The Markov category of extended Gaussian maps.

A morphism R^m -> R^n is stored in normal form x |-> M x + chi, where chi is
an extended Gaussian on R^n and the columns of M are orthogonal to chi's
fibre. The decorated-cospan form (f, psi, q), composed by pushout, is kept
alongside as an independent route to the same composites.

``compose(g2, g1)`` is ordinary (right-to-left) composition g2 o g1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import extgauss, gauss, linrel
from .errors import BadIndex, DimensionMismatch, NotSurjective
from .extgauss import ExtendedGaussian
from .gauss import GaussianDist, GaussMorphism
from .linalg import (
    Subspace,
    as_matrix,
    default_tolerance,
    kernel,
    orthogonal_complement,
    pseudoinverse,
    pushout_cospan,
    rank,
)
from .linrel import TotalLinRel

__all__ = [
    "GaussExMorphism",
    "DecoratedCospan",
    "make",
    "state",
    "identity",
    "compose",
    "compose_all",
    "tensor",
    "to_cospan",
    "from_cospan",
    "compose_cospan",
    "structural",
    "copy",
    "discard",
    "swap",
    "add",
    "zero",
    "scalar",
    "matrix",
    "uninformative",
    "permutation",
    "embed_gauss",
    "embed_linrel",
    "marginal",
    "name",
    "is_deterministic",
    "conditional",
    "distance",
    "equals",
]


@dataclass(frozen=True, eq=False)
class GaussExMorphism:
    matrix: np.ndarray
    noise: ExtendedGaussian

    @property
    def dom_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def cod_dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_state(self) -> bool:
        return self.dom_dim == 0

    def __repr__(self):
        return (
            f"GaussExMorphism({self.dom_dim} -> {self.cod_dim}, "
            f"matrix={np.round(self.matrix, 12).tolist()}, noise={self.noise!r})"
        )


@dataclass(frozen=True, eq=False)
class DecoratedCospan:
    """R^m -f-> R^k <-q- R^n decorated with a Gaussian psi on the apex."""

    f: np.ndarray
    psi: GaussianDist
    q: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=float)
        q = np.array(self.q, dtype=float)
        if f.ndim != 2 or q.ndim != 2 or f.shape[0] != q.shape[0] or q.shape[0] != self.psi.dim:
            raise DimensionMismatch("cospan legs and decoration must share the apex")
        if rank(q) != q.shape[0]:
            raise NotSurjective("right leg of a decorated cospan must be surjective")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "q", q)

    @property
    def dom_dim(self) -> int:
        return self.f.shape[1]

    @property
    def cod_dim(self) -> int:
        return self.q.shape[1]


def make(m, noise: ExtendedGaussian) -> GaussExMorphism:
    m = np.array(m, dtype=float)
    if m.ndim != 2:
        m = as_matrix(m)
    if m.shape[0] != noise.dim:
        raise DimensionMismatch(f"matrix has {m.shape[0]} rows, noise lives in R^{noise.dim}")
    if noise.fibre.dim:
        m = noise.fibre.complement_projector @ m
    return GaussExMorphism(m, noise)


def state(chi: ExtendedGaussian) -> GaussExMorphism:
    return GaussExMorphism(np.zeros((chi.dim, 0)), chi)


def identity(n: int) -> GaussExMorphism:
    return matrix(np.eye(n))


def compose(g2: GaussExMorphism, g1: GaussExMorphism) -> GaussExMorphism:
    """g2 o g1 in normal form: (M2 M1, M2_* chi1 + chi2)."""
    if g1.cod_dim != g2.dom_dim:
        raise DimensionMismatch(
            f"cannot compose {g1.dom_dim}->{g1.cod_dim} with {g2.dom_dim}->{g2.cod_dim}"
        )
    noise = extgauss.convolve(extgauss.pushforward(g2.matrix, g1.noise), g2.noise)
    return make(g2.matrix @ g1.matrix, noise)


def compose_all(*morphisms: GaussExMorphism) -> GaussExMorphism:
    """Diagrammatic chain: compose_all(f, g, h) = h o g o f."""
    out = morphisms[0]
    for g in morphisms[1:]:
        out = compose(g, out)
    return out


def tensor(g1: GaussExMorphism, g2: GaussExMorphism) -> GaussExMorphism:
    m = np.zeros((g1.cod_dim + g2.cod_dim, g1.dom_dim + g2.dom_dim))
    m[: g1.cod_dim, : g1.dom_dim] = g1.matrix
    m[g1.cod_dim :, g1.dom_dim :] = g2.matrix
    return GaussExMorphism(m, extgauss.tensor(g1.noise, g2.noise))


def to_cospan(g: GaussExMorphism) -> DecoratedCospan:
    q = orthogonal_complement(g.noise.fibre).basis.T
    return DecoratedCospan(q @ g.matrix, gauss.pushforward(q, g.noise.gaussian()), q)


def from_cospan(c: DecoratedCospan) -> GaussExMorphism:
    """x |-> f(x) + q^{-1}(psi), read through the section q^+."""
    section = pseudoinverse(c.q)
    noise = extgauss.make(section @ c.psi.mean, section @ c.psi.cov @ section.T, kernel(c.q))
    return make(section @ c.f, noise)


def compose_cospan(c2: DecoratedCospan, c1: DecoratedCospan) -> DecoratedCospan:
    """Pushout composite c2 o c1 with decoration (i1)_* psi1 + (i2)_* psi2."""
    if c1.cod_dim != c2.dom_dim:
        raise DimensionMismatch("decorated cospans are not composable")
    i1, i2 = pushout_cospan(c1.q, c2.f)
    psi = gauss.convolve(gauss.pushforward(i1, c1.psi), gauss.pushforward(i2, c2.psi))
    return DecoratedCospan(i1 @ c1.f, psi, i2 @ c2.q)


# Structural morphisms


def matrix(m) -> GaussExMorphism:
    m = np.array(m, dtype=float)
    if m.ndim != 2:
        m = as_matrix(m)
    return GaussExMorphism(m, extgauss.dirac(np.zeros(m.shape[0])))


def copy(n: int) -> GaussExMorphism:
    return matrix(np.vstack([np.eye(n), np.eye(n)]))


def discard(n: int) -> GaussExMorphism:
    return matrix(np.zeros((0, n)))


def swap(m: int, n: int) -> GaussExMorphism:
    s = np.zeros((m + n, m + n))
    s[:n, m:] = np.eye(n)
    s[n:, :m] = np.eye(m)
    return matrix(s)


def add(n: int) -> GaussExMorphism:
    return matrix(np.hstack([np.eye(n), np.eye(n)]))


def zero(n: int) -> GaussExMorphism:
    return state(extgauss.dirac(np.zeros(n)))


def scalar(c: float) -> GaussExMorphism:
    return matrix([[float(c)]])


def uninformative(n: int) -> GaussExMorphism:
    """State initialising a completely unspecified variable in R^n."""
    return state(extgauss.uninformative(n))


def permutation(order, n: int | None = None) -> GaussExMorphism:
    """Deterministic map sending x to x[order] (a selection when shorter)."""
    order = list(order)
    n = len(order) if n is None else n
    p = np.zeros((len(order), n))
    for row, i in enumerate(order):
        p[row, i] = 1.0
    return matrix(p)


_STRUCTURAL = {
    "copy": copy,
    "discard": discard,
    "swap": swap,
    "add": add,
    "zero": zero,
    "scalar": scalar,
    "matrix": matrix,
    "uninformative": uninformative,
}


def structural(kind: str, *args) -> GaussExMorphism:
    """Look up a generator by name, e.g. ``structural("swap", 1, 2)``."""
    try:
        return _STRUCTURAL[kind](*args)
    except KeyError:
        raise ValueError(f"unknown structural morphism {kind!r}") from None


# Embeddings


def embed_gauss(g: GaussMorphism) -> GaussExMorphism:
    return make(g.matrix, extgauss.from_gaussian(g.noise))


def embed_linrel(r: TotalLinRel) -> GaussExMorphism:
    return make(r.matrix, extgauss.make(np.zeros(r.cod_dim), np.zeros((r.cod_dim,) * 2), r.fibre))


# Derived operations


def marginal(st: GaussExMorphism, coords) -> GaussExMorphism:
    """Pushforward of a state along the projection onto ``coords`` (in order)."""
    if not st.is_state:
        raise DimensionMismatch("marginal expects a state")
    coords = [int(i) for i in coords]
    bad = [i for i in coords if not 0 <= i < st.cod_dim]
    if bad:
        raise BadIndex(f"indices {bad} out of range for R^{st.cod_dim}")
    return compose(permutation(coords, st.cod_dim), st)


def name(f: GaussExMorphism) -> GaussExMorphism:
    """State u_X ; copy ; (id (x) f) on R^(m+n)."""
    m = f.dom_dim
    return compose_all(uninformative(m), copy(m), tensor(identity(m), f))


def is_deterministic(f: GaussExMorphism, tol=None) -> bool:
    t = default_tolerance() if tol is None else tol
    return f.noise.fibre.dim == 0 and float(np.linalg.norm(f.noise.cov)) < t.eq


def conditional(f: GaussExMorphism, x_dim: int) -> GaussExMorphism:
    """Conditional f|_X : A (x) X -> Y of f : A -> X (x) Y.

    The noise of f is written as q (x, y) = q M a + w with w ~ psi. Given a
    and x, the part of w outside im(q_Y) is observed exactly; the rest is
    solved for y through the pseudoinverse of q_Y, and ker(q_Y) stays free.
    """
    n = f.cod_dim
    if not 0 <= x_dim <= n:
        raise DimensionMismatch(f"cannot split R^{n} into a block of size {x_dim}")
    rep = extgauss.to_kernel_rep(f.noise)
    q, psi = rep.q, rep.psi
    qx, qy = q[:, :x_dim], q[:, x_dim:]
    obs = kernel(qy.T).basis.T
    gain, post_cov = gauss.conditioning_gain(psi, obs)
    resid = np.eye(q.shape[0]) - gain @ obs
    section = pseudoinverse(qy)
    on_a = section @ resid @ q @ f.matrix
    on_x = -section @ resid @ qx
    noise = extgauss.make(section @ resid @ psi.mean, section @ post_cov @ section.T, kernel(qy))
    return make(np.hstack([on_a, on_x]), noise)


def distance(f: GaussExMorphism, g: GaussExMorphism) -> float:
    if f.matrix.shape != g.matrix.shape:
        raise DimensionMismatch(
            f"morphisms {f.dom_dim}->{f.cod_dim} and {g.dom_dim}->{g.cod_dim} differ in type"
        )
    return max(float(np.linalg.norm(f.matrix - g.matrix)), extgauss.distance(f.noise, g.noise))


def equals(f: GaussExMorphism, g: GaussExMorphism, tol=None) -> bool:
    t = default_tolerance() if tol is None else tol
    return distance(f, g) < t.eq
