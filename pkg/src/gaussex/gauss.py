"""Closed Gaussian systems and the category of Gaussian maps x -> Mx + noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotPSD
from .linalg import as_matrix, as_vector, default_tolerance, pseudoinverse, symmetrize

__all__ = [
    "GaussianDist",
    "GaussMorphism",
    "Conditioned",
    "dirac",
    "standard_normal",
    "pushforward",
    "tensor",
    "convolve",
    "condition_on_linear",
    "conditioning_gain",
    "compose",
    "identity",
    "distance",
    "morphism_distance",
]

# Eigenvalues down to this (relative) level are round-off and get clamped.
PSD_SLACK = 1e-10


def clean_covariance(cov: np.ndarray) -> np.ndarray:
    """Symmetrize and clamp round-off negative eigenvalues to zero."""
    cov = symmetrize(cov)
    if cov.size == 0:
        return cov
    w, v = np.linalg.eigh(cov)
    if w[0] >= 0:
        return cov
    scale = max(1.0, float(np.abs(w).max()))
    if w[0] < -PSD_SLACK * scale:
        raise NotPSD(f"covariance has eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return symmetrize((v * w) @ v.T)


@dataclass(frozen=True, eq=False)
class GaussianDist:
    """N(mean, cov) on R^n; cov may be singular."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = as_vector(self.mean)
        cov = as_matrix(self.cov, rows=mean.shape[0], cols=mean.shape[0]) if mean.size else np.zeros((0, 0))
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", clean_covariance(cov))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def __repr__(self):
        return f"GaussianDist(mean={self.mean.tolist()}, cov={self.cov.tolist()})"


@dataclass(frozen=True, eq=False)
class GaussMorphism:
    """The stochastic map x -> matrix @ x + noise."""

    matrix: np.ndarray
    noise: GaussianDist

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != self.noise.dim:
            raise DimensionMismatch("matrix rows must match the noise dimension")
        object.__setattr__(self, "matrix", m)

    @property
    def dom_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def cod_dim(self) -> int:
        return self.matrix.shape[0]


def dirac(mean) -> GaussianDist:
    mean = as_vector(mean)
    return GaussianDist(mean, np.zeros((mean.size, mean.size)))


def standard_normal(n: int = 1) -> GaussianDist:
    return GaussianDist(np.zeros(n), np.eye(n))


def pushforward(m, psi: GaussianDist) -> GaussianDist:
    m = as_matrix(m) if np.ndim(m) else as_matrix(m, 1, 1)
    if m.shape[1] != psi.dim:
        raise DimensionMismatch(f"cannot push R^{psi.dim} along a {m.shape} matrix")
    return GaussianDist(m @ psi.mean, m @ psi.cov @ m.T)


def tensor(psi1: GaussianDist, psi2: GaussianDist) -> GaussianDist:
    n1, n2 = psi1.dim, psi2.dim
    cov = np.zeros((n1 + n2, n1 + n2))
    cov[:n1, :n1] = psi1.cov
    cov[n1:, n1:] = psi2.cov
    return GaussianDist(np.concatenate([psi1.mean, psi2.mean]), cov)


def convolve(psi1: GaussianDist, psi2: GaussianDist) -> GaussianDist:
    if psi1.dim != psi2.dim:
        raise DimensionMismatch("convolution needs equal dimensions")
    return GaussianDist(psi1.mean + psi2.mean, psi1.cov + psi2.cov)


class Conditioned(NamedTuple):
    dist: GaussianDist
    off_support: bool


def conditioning_gain(psi: GaussianDist, obs) -> tuple[np.ndarray, np.ndarray]:
    """Gain K and posterior covariance for observing ``obs @ x`` exactly.

    The posterior mean for an observed value v is mean + K (v - obs @ mean).
    """
    obs = as_matrix(obs, cols=psi.dim) if np.size(obs) else np.zeros((0, psi.dim))
    s = psi.cov
    innov = obs @ s @ obs.T
    gain = s @ obs.T @ pseudoinverse(innov)
    return gain, s - gain @ obs @ s


def condition_on_linear(psi: GaussianDist, obs, value) -> Conditioned:
    """Condition x ~ psi on the exact observation ``obs @ x = value``.

    A value outside the affine support of ``obs @ x`` is replaced by its
    orthogonal projection onto that support, and ``off_support`` is set.
    """
    obs = np.array(obs, dtype=float)
    if obs.ndim != 2 or obs.shape[1] != psi.dim:
        raise DimensionMismatch(f"observation matrix must have {psi.dim} columns")
    value = as_vector(value, obs.shape[0])
    if obs.shape[0] == 0:
        return Conditioned(psi, False)
    gain, cov = conditioning_gain(psi, obs)
    resid = value - obs @ psi.mean
    innov = obs @ psi.cov @ obs.T
    support = innov @ pseudoinverse(innov)
    miss = resid - support @ resid
    tol = default_tolerance().eq
    off = float(np.linalg.norm(miss)) > tol * max(1.0, float(np.linalg.norm(resid)))
    return Conditioned(GaussianDist(psi.mean + gain @ resid, cov), off)


def identity(n: int) -> GaussMorphism:
    return GaussMorphism(np.eye(n), dirac(np.zeros(n)))


def compose(second: GaussMorphism, first: GaussMorphism) -> GaussMorphism:
    """(M, psi) o (N, chi) = (MN, psi + M_* chi)."""
    if second.dom_dim != first.cod_dim:
        raise DimensionMismatch("morphisms are not composable")
    return GaussMorphism(
        second.matrix @ first.matrix,
        convolve(second.noise, pushforward(second.matrix, first.noise)),
    )


def distance(psi1: GaussianDist, psi2: GaussianDist) -> float:
    if psi1.dim != psi2.dim:
        raise DimensionMismatch("distributions on different spaces")
    return max(
        float(np.linalg.norm(psi1.mean - psi2.mean)),
        float(np.linalg.norm(psi1.cov - psi2.cov)),
    )


def morphism_distance(f: GaussMorphism, g: GaussMorphism) -> float:
    if f.matrix.shape != g.matrix.shape:
        raise DimensionMismatch("morphisms have different types")
    return max(float(np.linalg.norm(f.matrix - g.matrix)), distance(f.noise, g.noise))
