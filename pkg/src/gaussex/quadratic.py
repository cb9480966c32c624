"""Partial quadratic functions and the precision/covariance duality.

A :class:`PartialQuadratic` is

    f(x) = 1/2 (x - a)^T A (x - a) + b^T (x - a) + c   if x - a in S
         = +inf                                        otherwise

with A positive semidefinite and supported on S, b in S and the base point
a orthogonal to S. Allowing a nonzero base point keeps the family closed
under Legendre-Fenchel conjugation once linear terms are present; for
centered distributions a = 0 and b = 0.

The affine extension (b, a, c) is experimental: it is only checked against
the numeric supremum oracle and the equality-conditioning example.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, Infeasible
from .extgauss import ExtendedGaussian
from . import extgauss
from .gauss import clean_covariance
from .linalg import (
    Subspace,
    as_matrix,
    as_vector,
    default_tolerance,
    kernel,
    orthogonal_complement,
    orthonormalize,
    projector_distance,
    pseudoinverse,
    subspace_intersect,
    subspace_sum,
)

__all__ = [
    "PartialQuadratic",
    "make",
    "zero_form",
    "indicator",
    "precision_form",
    "covariance_form",
    "legendre_conjugate",
    "numeric_conjugate",
    "add",
    "from_precision_form",
    "interconnect_precision",
    "form_kernel",
    "distance",
    "equals",
]


@dataclass(frozen=True, eq=False)
class PartialQuadratic:
    A: np.ndarray
    lin: np.ndarray
    offset: float
    domain: Subspace
    shift: np.ndarray

    @property
    def dim(self) -> int:
        return self.domain.ambient_dim

    def __call__(self, x) -> float:
        x = as_vector(x, self.dim)
        d = x - self.shift
        if not self.domain.contains_vector(d):
            return float("inf")
        return float(0.5 * d @ self.A @ d + self.lin @ d + self.offset)

    def __repr__(self):
        return (
            f"PartialQuadratic(dim={self.dim}, domain_dim={self.domain.dim}, "
            f"A={np.round(self.A, 12).tolist()}, lin={np.round(self.lin, 12).tolist()}, "
            f"offset={self.offset:.12g}, shift={np.round(self.shift, 12).tolist()})"
        )


def make(A, lin=None, offset: float = 0.0, domain: Subspace | None = None, shift=None) -> PartialQuadratic:
    """Canonical form: A and lin compressed onto the domain, shift orthogonal to it."""
    A = np.array(A, dtype=float)
    if A.ndim != 2:
        A = as_matrix(A)
    n = A.shape[0]
    A = as_matrix(A, n, n) if n else np.zeros((0, 0))
    lin = np.zeros(n) if lin is None else as_vector(lin, n)
    shift = np.zeros(n) if shift is None else as_vector(shift, n)
    if domain is None:
        domain = Subspace.full(n)
    if domain.ambient_dim != n:
        raise DimensionMismatch("domain must live in the same space as the form")
    p = domain.projector
    A = clean_covariance(p @ A @ p)
    return PartialQuadratic(A, p @ lin, float(offset), domain, shift - p @ shift)


def zero_form(n: int) -> PartialQuadratic:
    return make(np.zeros((n, n)))


def indicator(domain: Subspace, shift=None) -> PartialQuadratic:
    """iota[x - shift in domain]."""
    n = domain.ambient_dim
    return make(np.zeros((n, n)), domain=domain, shift=shift)


def precision_form(chi: ExtendedGaussian) -> PartialQuadratic:
    """1/2 (x - mu)^T Sigma^+ (x - mu) on mu + S, with S = im(Sigma) + D."""
    support = subspace_sum(orthonormalize(chi.cov), chi.fibre)
    omega = pseudoinverse(chi.cov)
    mu = chi.mean
    return make(
        omega,
        lin=-omega @ mu,
        offset=0.5 * float(mu @ omega @ mu),
        domain=support,
        shift=mu,
    )


def covariance_form(chi: ExtendedGaussian) -> PartialQuadratic:
    """1/2 x^T Sigma x + mu^T x on the orthogonal complement of D."""
    return make(chi.cov, lin=chi.mean, domain=orthogonal_complement(chi.fibre))


def _inner_complement(outer: Subspace, inner: Subspace) -> Subspace:
    """Orthogonal complement of ``inner`` taken inside ``outer``."""
    return subspace_intersect(outer, orthogonal_complement(inner))


def legendre_conjugate(f: PartialQuadratic) -> PartialQuadratic:
    """Closed-form convex conjugate f*(y) = sup_x y^T x - f(x)."""
    a_plus = pseudoinverse(f.A)
    range_a = orthonormalize(f.A)
    dom = subspace_sum(range_a, orthogonal_complement(f.domain))
    flat = _inner_complement(f.domain, range_a)
    return make(
        a_plus,
        lin=f.shift - a_plus @ f.lin,
        offset=0.5 * float(f.lin @ a_plus @ f.lin) - f.offset,
        domain=dom,
        shift=flat.projector @ f.lin,
    )


def numeric_conjugate(f: PartialQuadratic, y, tol: float = 1e-9) -> float:
    """sup over the domain of y^T x - f(x), by least squares in domain coordinates.

    Returns +inf when the concave objective is unbounded. Independent of
    :func:`legendre_conjugate`; used as its oracle.
    """
    y = as_vector(y, f.dim)
    basis = f.domain.basis
    hess = basis.T @ f.A @ basis
    grad = basis.T @ (y - f.lin)
    base = float(y @ f.shift) - f.offset
    if basis.shape[1] == 0:
        return base
    t, *_ = np.linalg.lstsq(hess, grad, rcond=None)
    if np.linalg.norm(hess @ t - grad) > tol * max(1.0, float(np.linalg.norm(grad))):
        return float("inf")
    return base + float(grad @ t - 0.5 * t @ hess @ t)


def _affine_meet(f1: PartialQuadratic, f2: PartialQuadratic, tol) -> np.ndarray:
    """A point of (a1 + S1) cap (a2 + S2); raises Infeasible if none."""
    b1, b2 = f1.domain.basis, f2.domain.basis
    gap = f2.shift - f1.shift
    stacked = np.hstack([b1, -b2])
    if stacked.shape[1] == 0:
        coef = np.zeros(0)
    else:
        coef, *_ = np.linalg.lstsq(stacked, gap, rcond=None)
    miss = float(np.linalg.norm(stacked @ coef - gap)) if gap.size else 0.0
    if miss > tol.eq * max(1.0, float(np.linalg.norm(gap))):
        raise Infeasible("domains of the two forms do not intersect")
    return f1.shift + b1 @ coef[: b1.shape[1]]


def add(f1: PartialQuadratic, f2: PartialQuadratic, tol=None) -> PartialQuadratic:
    """Pointwise sum; the domain is the intersection of the two domains."""
    t = default_tolerance() if tol is None else tol
    if f1.dim != f2.dim:
        raise DimensionMismatch("forms on different spaces")
    point = _affine_meet(f1, f2, t)
    dom = subspace_intersect(f1.domain, f2.domain)
    A = f1.A + f2.A
    lin = np.zeros(f1.dim)
    const = 0.0
    base = point - dom.projector @ point
    for f in (f1, f2):
        d = base - f.shift
        lin += f.A @ d + f.lin
        const += 0.5 * float(d @ f.A @ d) + float(f.lin @ d) + f.offset
    return make(A, lin=lin, offset=const, domain=dom, shift=base)


def form_kernel(f: PartialQuadratic) -> Subspace:
    """Directions d with f(x + d) = f(x) everywhere."""
    n = f.dim
    constraints = np.vstack([f.A, f.lin.reshape(1, n), orthogonal_complement(f.domain).basis.T])
    return kernel(constraints)


def from_precision_form(f: PartialQuadratic, tol=None) -> ExtendedGaussian:
    """Extended Gaussian whose precision form is f, up to the additive constant."""
    t = default_tolerance() if tol is None else tol
    flat = _inner_complement(f.domain, orthonormalize(f.A))
    if float(np.linalg.norm(flat.basis.T @ f.lin)) > t.eq * max(1.0, float(np.linalg.norm(f.lin))):
        raise Infeasible("form is unbounded below along a flat direction")
    cov = pseudoinverse(f.A)
    return extgauss.make(f.shift - cov @ f.lin, cov, flat)


def interconnect_precision(chi1: ExtendedGaussian, chi2: ExtendedGaussian) -> ExtendedGaussian:
    """Interconnection by adding precision forms."""
    if chi1.dim != chi2.dim:
        raise DimensionMismatch("distributions on different spaces")
    return from_precision_form(add(precision_form(chi1), precision_form(chi2)))


def _rel(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    scale = max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y)))
    return float(np.linalg.norm(x - y)) / scale


def distance(f: PartialQuadratic, g: PartialQuadratic, ignore_offset: bool = False) -> float:
    """Largest componentwise difference, relative to magnitude once above 1.

    Precisions of nearly singular covariances are huge, so absolute
    differences would mostly measure conditioning rather than agreement.
    """
    if f.dim != g.dim:
        raise DimensionMismatch("forms on different spaces")
    parts = [
        projector_distance(f.domain, g.domain),
        _rel(f.A, g.A),
        _rel(f.lin, g.lin),
        _rel(f.shift, g.shift),
    ]
    if not ignore_offset:
        parts.append(_rel(f.offset, g.offset))
    return max(parts)


def equals(f: PartialQuadratic, g: PartialQuadratic, tol=None, ignore_offset: bool = False) -> bool:
    t = default_tolerance() if tol is None else tol
    return distance(f, g, ignore_offset) < t.eq
