"""Dense linear algebra with explicit rank tolerances.

Subspaces are stored as orthonormal bases and compared through their
projectors, so no result depends on which basis a computation happened to
produce. Every rank decision goes through singular values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput, NotSurjective

__all__ = [
    "ToleranceConfig",
    "default_tolerance",
    "set_default_tolerance",
    "as_matrix",
    "as_vector",
    "Subspace",
    "orthonormalize",
    "orthogonal_complement",
    "subspace_sum",
    "subspace_intersect",
    "image",
    "kernel",
    "pseudoinverse",
    "rank",
    "subspace_equal",
    "projector_distance",
    "contains",
    "product",
    "pushout_cospan",
    "symmetrize",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical slack used for rank and equality decisions.

    Args:
        rank: relative singular-value cutoff. Singular values below
            ``rank * max(sigma_max, 1)`` count as zero, so matrices whose
            entries are pure round-off have rank zero.
        orth: allowed deviation from orthonormality of stored bases.
        eq: slack for projector, mean and covariance comparisons.
    """

    rank: float = 1e-9
    orth: float = 1e-10
    eq: float = 1e-8

    def __post_init__(self):
        if min(self.rank, self.orth, self.eq) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.rank > 1e-6:
            raise ValueError("rank tolerance must not exceed 1e-6")


_DEFAULT: ToleranceConfig | None = None


def default_tolerance() -> ToleranceConfig:
    """Process-wide tolerance; ``GAUSSEX_TOL`` overrides the equality slack."""
    global _DEFAULT
    if _DEFAULT is None:
        env = os.environ.get("GAUSSEX_TOL")
        _DEFAULT = ToleranceConfig(eq=float(env)) if env else ToleranceConfig()
    return _DEFAULT


def set_default_tolerance(tol: ToleranceConfig | None) -> None:
    global _DEFAULT
    _DEFAULT = tol


def _tol(tol):
    return default_tolerance() if tol is None else tol


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        # A flat vector is read as a single row unless a column is requested.
        m = m.reshape(-1, 1) if cols == 1 and rows != 1 else m.reshape(1, -1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatch(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionMismatch(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteInput("matrix has non-finite entries")
    return m


def as_vector(v, dim: int | None = None) -> np.ndarray:
    x = np.array(v, dtype=float).reshape(-1)
    if dim is not None and x.shape[0] != dim:
        raise DimensionMismatch(f"expected vector of length {dim}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("vector has non-finite entries")
    return x


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _cutoff(s: np.ndarray, tol: ToleranceConfig) -> float:
    smax = float(s[0]) if s.size else 0.0
    return tol.rank * max(smax, 1.0)


# Residual norm below which a projector column counts as already spanned.
_CANON_SKIP = 1e-6


def _sign_fix(v: np.ndarray) -> np.ndarray:
    a = np.abs(v)
    if a.size == 0 or a.max() == 0:
        return v
    i = int(np.flatnonzero(a >= a.max() - 1e-12)[0])
    return -v if v[i] < 0 else v


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of R^n held as an orthonormal basis (n x d)."""

    basis: np.ndarray
    _canonical: bool = field(default=False, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise DimensionMismatch("subspace basis must be two-dimensional")
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0)), True)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n), True)

    @classmethod
    def span(cls, *vectors, n: int | None = None, tol=None) -> "Subspace":
        if not vectors:
            if n is None:
                raise ValueError("ambient dimension needed for an empty span")
            return cls.zero(n)
        return orthonormalize(np.column_stack([as_vector(v) for v in vectors]), tol)

    @classmethod
    def coordinates(cls, n: int, indices) -> "Subspace":
        """Span of the standard basis vectors at ``indices``."""
        idx = list(indices)
        b = np.zeros((n, len(idx)))
        for j, i in enumerate(idx):
            b[i, j] = 1.0
        return cls(b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @cached_property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @cached_property
    def complement_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.projector

    def canonical_basis(self) -> np.ndarray:
        """Deterministic basis depending only on the subspace.

        Gram-Schmidt over the projector's columns in index order, skipping
        columns already (numerically) spanned; each vector is then
        sign-fixed so its largest-magnitude entry is positive. Singular
        vectors of the projector would not do: they are arbitrary inside
        the repeated eigenvalue 1 once dim >= 2.
        """
        if self._canonical or self.dim == 0:
            return self.basis.copy()
        p = self.projector
        vecs: list[np.ndarray] = []
        for i in range(self.ambient_dim):
            v = p[:, i].copy()
            for _ in range(2):  # second pass restores orthogonality
                for b in vecs:
                    v -= (b @ v) * b
            norm = float(np.linalg.norm(v))
            if norm > _CANON_SKIP:
                vecs.append(v / norm)
            if len(vecs) == self.dim:
                break
        if len(vecs) < self.dim:
            _, _, vt = np.linalg.svd(p)
            vecs = list(vt[: self.dim])
        return np.array([_sign_fix(v) for v in vecs]).T

    def contains_vector(self, v, tol=None) -> bool:
        t = _tol(tol)
        v = as_vector(v, self.ambient_dim)
        r = v - self.projector @ v
        return float(np.linalg.norm(r)) <= t.eq * max(1.0, float(np.linalg.norm(v)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def orthonormalize(spanning, tol=None) -> Subspace:
    """Orthonormal basis of the column space of ``spanning``."""
    t = _tol(tol)
    a = np.array(spanning, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch("spanning set must be a matrix")
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput("spanning set has non-finite entries")
    n = a.shape[0]
    if a.shape[1] == 0 or n == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    k = int(np.sum(s > _cutoff(s, t)))
    return Subspace(u[:, :k])


def orthogonal_complement(d: Subspace) -> Subspace:
    n = d.ambient_dim
    if d.dim == 0:
        return Subspace.full(n)
    if d.dim == n:
        return Subspace.zero(n)
    u, _, _ = np.linalg.svd(d.basis, full_matrices=True)
    return Subspace(u[:, d.dim :])


def _same_ambient(d1: Subspace, d2: Subspace):
    if d1.ambient_dim != d2.ambient_dim:
        raise DimensionMismatch(
            f"subspaces live in R^{d1.ambient_dim} and R^{d2.ambient_dim}"
        )


def subspace_sum(d1: Subspace, d2: Subspace, tol=None) -> Subspace:
    _same_ambient(d1, d2)
    return orthonormalize(np.hstack([d1.basis, d2.basis]), tol)


def subspace_intersect(d1: Subspace, d2: Subspace, tol=None) -> Subspace:
    _same_ambient(d1, d2)
    both = subspace_sum(orthogonal_complement(d1), orthogonal_complement(d2), tol)
    return orthogonal_complement(both)


def image(m, d: Subspace, tol=None) -> Subspace:
    m = as_matrix(m)
    if m.shape[1] != d.ambient_dim:
        raise DimensionMismatch(
            f"map with {m.shape[1]} columns applied to subspace of R^{d.ambient_dim}"
        )
    return orthonormalize(m @ d.basis, tol)


def kernel(m, tol=None) -> Subspace:
    t = _tol(tol)
    m = np.array(m, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch("kernel expects a matrix")
    r, n = m.shape
    if r == 0 or n == 0:
        return Subspace.full(n)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    k = int(np.sum(s > _cutoff(s, t)))
    return Subspace(vt[k:].T)


def rank(m, tol=None) -> int:
    t = _tol(tol)
    m = np.array(m, dtype=float)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > _cutoff(s, t)))


def pseudoinverse(m, tol=None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the shared rank cutoff."""
    t = _tol(tol)
    m = np.array(m, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatch("pseudoinverse expects a matrix")
    if m.size == 0:
        return np.zeros((m.shape[1], m.shape[0]))
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    keep = s > _cutoff(s, t)
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def projector_distance(d1: Subspace, d2: Subspace) -> float:
    _same_ambient(d1, d2)
    return float(np.linalg.norm(d1.projector - d2.projector))


def subspace_equal(d1: Subspace, d2: Subspace, tol=None) -> bool:
    t = _tol(tol)
    return projector_distance(d1, d2) < t.eq


def contains(outer: Subspace, inner: Subspace, tol=None) -> bool:
    """True when ``inner`` is a subspace of ``outer``."""
    t = _tol(tol)
    _same_ambient(outer, inner)
    r = inner.basis - outer.projector @ inner.basis
    return float(np.linalg.norm(r)) < t.eq


def product(d1: Subspace, d2: Subspace) -> Subspace:
    """Cartesian product D1 x D2 inside R^(n1+n2)."""
    n1, n2 = d1.ambient_dim, d2.ambient_dim
    b = np.zeros((n1 + n2, d1.dim + d2.dim))
    b[:n1, : d1.dim] = d1.basis
    b[n1:, d1.dim :] = d2.basis
    return Subspace(b)


def pushout_cospan(p, g, tol=None) -> tuple[np.ndarray, np.ndarray]:
    """Pushout of P <-p- Y -g-> Q for surjective ``p``.

    The apex W is realised as R^w, identified with the orthogonal complement
    of im([p; -g]) in P + Q. Returns the legs (i1: P -> W, i2: Q -> W).
    """
    p = np.array(p, dtype=float)
    g = np.array(g, dtype=float)
    if p.ndim != 2 or g.ndim != 2 or p.shape[1] != g.shape[1]:
        raise DimensionMismatch("pushout legs must share their domain")
    kp, kq = p.shape[0], g.shape[0]
    if rank(p, tol) != kp:
        raise NotSurjective("left leg of the pushout is not surjective")
    stacked = np.vstack([p, -g])
    coker = kernel(stacked.T, tol)
    w = coker.basis.T
    return w[:, :kp], w[:, kp:]
