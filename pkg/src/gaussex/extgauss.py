"""Extended Gaussian distributions psi + D in canonical form.

An extended Gaussian is a Gaussian measure restricted to the Borel
cylinders parallel to a fibre D. Only its image in R^n / D carries
information, so the canonical representative keeps the mean orthogonal to
D and the covariance supported on the orthogonal complement of D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gauss
from .errors import DimensionMismatch, NotSurjective
from .gauss import GaussianDist, clean_covariance
from .linalg import (
    Subspace,
    as_matrix,
    as_vector,
    default_tolerance,
    image,
    kernel,
    orthogonal_complement,
    product,
    projector_distance,
    pseudoinverse,
    rank,
    subspace_sum,
)

__all__ = [
    "ExtendedGaussian",
    "KernelRep",
    "make",
    "from_gaussian",
    "uninformative",
    "dirac",
    "normal",
    "from_kernel_rep",
    "to_kernel_rep",
    "equals",
    "distance",
    "pushforward",
    "tensor",
    "convolve",
    "is_canonical",
]


@dataclass(frozen=True, eq=False)
class ExtendedGaussian:
    """Canonical triple (fibre, mean, cov).

    Build instances with :func:`make`; the constructor trusts its input.
    """

    fibre: Subspace
    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.fibre.ambient_dim

    @property
    def fibre_dim(self) -> int:
        return self.fibre.dim

    @property
    def is_closed(self) -> bool:
        return self.fibre.dim == 0

    def gaussian(self) -> GaussianDist:
        """The canonical Gaussian representative psi with psi + D = self."""
        return GaussianDist(self.mean, self.cov)

    def __repr__(self):
        return (
            f"ExtendedGaussian(dim={self.dim}, fibre_dim={self.fibre_dim}, "
            f"mean={np.round(self.mean, 12).tolist()}, cov={np.round(self.cov, 12).tolist()})"
        )


@dataclass(frozen=True, eq=False)
class KernelRep:
    """Pullback q^{-1}(psi) along a surjection q: R^n -> R^k."""

    q: np.ndarray
    psi: GaussianDist

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 2 or q.shape[0] != self.psi.dim:
            raise DimensionMismatch("kernel map rows must match the Gaussian dimension")
        if rank(q) != q.shape[0]:
            raise NotSurjective("kernel representation map is not surjective")
        object.__setattr__(self, "q", q)


def make(mean, cov, fibre: Subspace | None = None) -> ExtendedGaussian:
    """Canonicalize (mean, cov, fibre): project both onto the fibre's complement."""
    mean = as_vector(mean)
    n = mean.shape[0]
    cov = as_matrix(cov, rows=n, cols=n) if n else np.zeros((0, 0))
    if fibre is None:
        fibre = Subspace.zero(n)
    if fibre.ambient_dim != n:
        raise DimensionMismatch(f"fibre lives in R^{fibre.ambient_dim}, mean in R^{n}")
    cov = clean_covariance(cov)
    if fibre.dim:
        p = fibre.complement_projector
        mean = p @ mean
        cov = clean_covariance(p @ cov @ p)
    return ExtendedGaussian(fibre, mean, cov)


def from_gaussian(psi: GaussianDist, fibre: Subspace | None = None) -> ExtendedGaussian:
    return make(psi.mean, psi.cov, fibre)


def uninformative(n: int) -> ExtendedGaussian:
    """The fibre-R^n state: any point, no statistics."""
    return ExtendedGaussian(Subspace.full(n), np.zeros(n), np.zeros((n, n)))


def dirac(point) -> ExtendedGaussian:
    point = as_vector(point)
    return make(point, np.zeros((point.size, point.size)))


def normal(mean, cov) -> ExtendedGaussian:
    mean = as_vector(mean)
    return make(mean, as_matrix(cov, mean.size, mean.size))


def from_kernel_rep(k: KernelRep) -> ExtendedGaussian:
    """Extended Gaussian q^{-1}(psi): fibre ker q, pushed through the section q^+."""
    section = pseudoinverse(k.q)
    return make(section @ k.psi.mean, section @ k.psi.cov @ section.T, kernel(k.q))


def to_kernel_rep(chi: ExtendedGaussian) -> KernelRep:
    """Kernel representation with q the transposed orthonormal basis of D^perp."""
    q = orthogonal_complement(chi.fibre).basis.T
    return KernelRep(q, gauss.pushforward(q, chi.gaussian()))


def distance(chi1: ExtendedGaussian, chi2: ExtendedGaussian) -> float:
    """Max of projector, mean and covariance discrepancies of canonical forms."""
    if chi1.dim != chi2.dim:
        raise DimensionMismatch("extended Gaussians on different spaces")
    return max(
        projector_distance(chi1.fibre, chi2.fibre),
        float(np.linalg.norm(chi1.mean - chi2.mean)),
        float(np.linalg.norm(chi1.cov - chi2.cov)),
    )


def equals(chi1: ExtendedGaussian, chi2: ExtendedGaussian, tol=None) -> bool:
    t = default_tolerance() if tol is None else tol
    return distance(chi1, chi2) < t.eq


def is_canonical(chi: ExtendedGaussian, tol=None) -> bool:
    t = default_tolerance() if tol is None else tol
    p = chi.fibre.projector
    return (
        float(np.linalg.norm(p @ chi.mean)) < t.eq
        and float(np.linalg.norm(p @ chi.cov)) < t.eq
        and float(np.linalg.norm(chi.cov - chi.cov.T)) < t.eq
    )


def pushforward(m, chi: ExtendedGaussian) -> ExtendedGaussian:
    """M_*(psi + D) = M_*psi + M[D]."""
    m = as_matrix(m)
    if m.shape[1] != chi.dim:
        raise DimensionMismatch(f"cannot push R^{chi.dim} along a {m.shape} matrix")
    return make(m @ chi.mean, m @ chi.cov @ m.T, image(m, chi.fibre))


def tensor(chi1: ExtendedGaussian, chi2: ExtendedGaussian) -> ExtendedGaussian:
    psi = gauss.tensor(chi1.gaussian(), chi2.gaussian())
    # Block embedding of canonical pieces is already canonical.
    return ExtendedGaussian(product(chi1.fibre, chi2.fibre), psi.mean, psi.cov)


def convolve(chi1: ExtendedGaussian, chi2: ExtendedGaussian) -> ExtendedGaussian:
    """(psi1 + D1) + (psi2 + D2) = (psi1 + psi2) + (D1 + D2)."""
    if chi1.dim != chi2.dim:
        raise DimensionMismatch("convolution needs equal dimensions")
    return make(chi1.mean + chi2.mean, chi1.cov + chi2.cov, subspace_sum(chi1.fibre, chi2.fibre))
