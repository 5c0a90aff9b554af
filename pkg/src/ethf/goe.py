"""Gaussian orthogonal ensemble sampling and Wigner semicircle helpers.

Seeding
-------
Every random routine takes a *seed value*: an ``int``, a
:class:`numpy.random.SeedSequence` or a ready :class:`numpy.random.Generator`.
Ensembles derive per-realization streams with :func:`child_seed`, which keys a
``SeedSequence`` by ``(master, index, ...)`` so that realization ``k`` sees the
same stream regardless of how realizations are distributed over workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EigensolverError",
    "SemicircleLaw",
    "child_seed",
    "eigendecompose_symmetric",
    "make_rng",
    "sample_goe",
    "semicircle_cdf",
    "semicircle_moment",
    "semicircle_pdf",
]

# Threshold for the "first significant component" used in sign fixing.
SIGN_TOL = 1e-12


class EigensolverError(RuntimeError):
    """Raised when a symmetric eigendecomposition cannot be computed."""


def make_rng(seed) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` (int, SeedSequence or Generator)."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        raise ValueError("a seed is required; implicit OS entropy is not allowed")
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def child_seed(master: int, *index: int) -> np.random.SeedSequence:
    """Deterministic child seed for realization ``index`` of ensemble ``master``."""
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(i) for i in index))


def sample_goe(n: int, sigma: float, seed) -> np.ndarray:
    """Draw a real symmetric GOE matrix.

    Off-diagonal entries have standard deviation ``sigma`` and diagonal entries
    ``sigma * sqrt(2)``, so the spectrum fills ``[-2 sqrt(n) sigma, 2 sqrt(n) sigma]``.
    The result is exactly symmetric.
    """
    if n < 1:
        raise ValueError(f"matrix dimension must be >= 1, got {n}")
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    rng = make_rng(seed)
    a = rng.standard_normal((n, n))
    return (a + a.T) * (sigma / math.sqrt(2.0))


def eigendecompose_symmetric(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of ``m``.

    Each eigenvector is oriented so that its first component with magnitude
    above ``SIGN_TOL`` is positive.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise EigensolverError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if np.max(np.abs(m - m.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigendecomposition did not converge: {exc}") from exc
    significant = np.abs(v) > SIGN_TOL
    first = np.argmax(significant, axis=0)
    flip = v[first, np.arange(v.shape[1])] < 0
    v[:, flip] *= -1.0
    return w, v


def semicircle_pdf(lam, R: float):
    """Normalized semicircle density ``2/(pi R^2) sqrt(R^2 - lam^2)`` on ``[-R, R]``."""
    if not R > 0:
        raise ValueError(f"radius must be > 0, got {R}")
    lam = np.asarray(lam, dtype=np.float64)
    out = 2.0 / (math.pi * R * R) * np.sqrt(np.clip(R * R - lam * lam, 0.0, None))
    return out if out.ndim else float(out)


def semicircle_cdf(lam, R: float):
    if not R > 0:
        raise ValueError(f"radius must be > 0, got {R}")
    x = np.clip(np.asarray(lam, dtype=np.float64) / R, -1.0, 1.0)
    out = 0.5 + (x * np.sqrt(1.0 - x * x) + np.arcsin(x)) / math.pi
    return out if out.ndim else float(out)


def semicircle_moment(k: int, R: float) -> float:
    """k-th moment of the semicircle: ``Catalan(k/2) (R/2)^k`` for even k, else 0."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    if k % 2:
        return 0.0
    p = k // 2
    return math.comb(2 * p, p) / (p + 1) * (R / 2.0) ** k


@dataclass(frozen=True)
class SemicircleLaw:
    """Wigner semicircle law with support ``[-radius, radius]``."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")

    @classmethod
    def for_goe(cls, n: int, sigma: float) -> "SemicircleLaw":
        return cls(2.0 * math.sqrt(n) * sigma)

    def pdf(self, lam):
        return semicircle_pdf(lam, self.radius)

    def cdf(self, lam):
        return semicircle_cdf(lam, self.radius)

    def moment(self, k: int) -> float:
        return semicircle_moment(k, self.radius)

    def kolmogorov_distance(self, samples) -> float:
        """Sup distance between the empirical CDF of ``samples`` and the law."""
        x = np.sort(np.asarray(samples, dtype=np.float64))
        n = x.size
        f = self.cdf(x)
        upper = np.arange(1, n + 1) / n - f
        lower = f - np.arange(n) / n
        return float(max(upper.max(), lower.max()))
