"""Total linear relations, as normal forms l(x) + D and as copartial cospans.

Composition is diagrammatic here: ``compose(first, second)`` runs ``first``
and feeds its output to ``second``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotSurjective, NotTotal
from .linalg import (
    Subspace,
    as_matrix,
    default_tolerance,
    image,
    kernel,
    orthogonal_complement,
    product,
    projector_distance,
    pseudoinverse,
    pushout_cospan,
    rank,
    subspace_sum,
)

__all__ = [
    "TotalLinRel",
    "CopartialMap",
    "make",
    "graph",
    "state",
    "uninformative",
    "identity",
    "copy",
    "discard",
    "swap",
    "relation_from_pairs",
    "compose",
    "tensor",
    "to_cospan",
    "from_cospan",
    "compose_cospan",
    "equals",
    "distance",
    "contains_pair",
]


@dataclass(frozen=True, eq=False)
class TotalLinRel:
    """The relation x |-> matrix @ x + fibre, with matrix columns orthogonal to fibre."""

    matrix: np.ndarray
    fibre: Subspace

    @property
    def dom_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def cod_dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"TotalLinRel({self.dom_dim} -> {self.cod_dim}, fibre_dim={self.fibre.dim})"


@dataclass(frozen=True, eq=False)
class CopartialMap:
    """Cospan X -f-> P <-q- Y with q surjective; relates x and y when f x = q y."""

    f: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        f = np.array(self.f, dtype=float)
        q = np.array(self.q, dtype=float)
        if f.ndim != 2 or q.ndim != 2 or f.shape[0] != q.shape[0]:
            raise DimensionMismatch("cospan legs must share their apex")
        if rank(q) != q.shape[0]:
            raise NotSurjective("right leg of a copartial map must be surjective")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "q", q)

    @property
    def dom_dim(self) -> int:
        return self.f.shape[1]

    @property
    def cod_dim(self) -> int:
        return self.q.shape[1]


def make(matrix, fibre: Subspace | None = None) -> TotalLinRel:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2:
        m = as_matrix(m)
    if fibre is None:
        fibre = Subspace.zero(m.shape[0])
    if fibre.ambient_dim != m.shape[0]:
        raise DimensionMismatch("fibre must live in the codomain")
    if fibre.dim:
        m = fibre.complement_projector @ m
    return TotalLinRel(m, fibre)


def graph(matrix) -> TotalLinRel:
    return make(as_matrix(matrix))


def state(fibre: Subspace) -> TotalLinRel:
    return make(np.zeros((fibre.ambient_dim, 0)), fibre)


def uninformative(n: int) -> TotalLinRel:
    return state(Subspace.full(n))


def identity(n: int) -> TotalLinRel:
    return graph(np.eye(n))


def copy(n: int) -> TotalLinRel:
    return graph(np.vstack([np.eye(n), np.eye(n)]))


def discard(n: int) -> TotalLinRel:
    return graph(np.zeros((0, n)))


def swap(m: int, n: int) -> TotalLinRel:
    s = np.zeros((m + n, m + n))
    s[:n, m:] = np.eye(n)
    s[n:, :m] = np.eye(m)
    return graph(s)


def relation_from_pairs(pairs, dom_dim: int) -> TotalLinRel:
    """Normal form of the relation spanned by the columns of ``pairs``.

    Each column stacks an input (first ``dom_dim`` entries) over an output.
    """
    pairs = np.array(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[0] < dom_dim:
        raise DimensionMismatch("pairs must be a matrix with the input block on top")
    bx, by = pairs[:dom_dim], pairs[dom_dim:]
    if rank(bx) != dom_dim:
        raise NotTotal("relation does not cover every input")
    fibre = image(by, kernel(bx))
    return make(by @ pseudoinverse(bx), fibre)


def compose(first: TotalLinRel, second: TotalLinRel) -> TotalLinRel:
    """(L ; M)(x) = g(l(x)) + g[D] + E."""
    if first.cod_dim != second.dom_dim:
        raise DimensionMismatch("relations are not composable")
    fibre = subspace_sum(image(second.matrix, first.fibre), second.fibre)
    return make(second.matrix @ first.matrix, fibre)


def tensor(r1: TotalLinRel, r2: TotalLinRel) -> TotalLinRel:
    m = np.zeros((r1.cod_dim + r2.cod_dim, r1.dom_dim + r2.dom_dim))
    m[: r1.cod_dim, : r1.dom_dim] = r1.matrix
    m[r1.cod_dim :, r1.dom_dim :] = r2.matrix
    return TotalLinRel(m, product(r1.fibre, r2.fibre))


def to_cospan(r: TotalLinRel) -> CopartialMap:
    q = orthogonal_complement(r.fibre).basis.T
    return CopartialMap(q @ r.matrix, q)


def from_cospan(c: CopartialMap) -> TotalLinRel:
    return make(pseudoinverse(c.q) @ c.f, kernel(c.q))


def compose_cospan(c1: CopartialMap, c2: CopartialMap) -> CopartialMap:
    """Pushout composition of X -> P <- Y and Y -> Q <- Z."""
    if c1.cod_dim != c2.dom_dim:
        raise DimensionMismatch("cospans are not composable")
    i1, i2 = pushout_cospan(c1.q, c2.f)
    return CopartialMap(i1 @ c1.f, i2 @ c2.q)


def distance(r1: TotalLinRel, r2: TotalLinRel) -> float:
    if r1.matrix.shape != r2.matrix.shape:
        raise DimensionMismatch("relations have different types")
    return max(
        projector_distance(r1.fibre, r2.fibre),
        float(np.linalg.norm(r1.matrix - r2.matrix)),
    )


def equals(r1: TotalLinRel, r2: TotalLinRel, tol=None) -> bool:
    t = default_tolerance() if tol is None else tol
    return distance(r1, r2) < t.eq


def contains_pair(r: TotalLinRel, x, y, tol=None) -> bool:
    """Membership test (x, y) in the relation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return r.fibre.contains_vector(y - r.matrix @ x, tol)
