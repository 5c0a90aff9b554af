"""Exact finite-N ensemble moments used as reference columns in reports.

These keep the orthogonality of the eigenvector matrix (Haar on O(N)) and the
fact that an eigenstate occupies ``Np`` *distinct* orbitals. They reduce to
the leading-order predictions when ``Np << N`` and ``N -> infinity``.

Haar moments used (i != j, a != b):

    E[psi_ia^2 psi_ja^2]           = 1 / (N (N + 2))
    E[psi_ia psi_ja psi_ib psi_jb] = -1 / ((N - 1) N (N + 2))
    E[psi_ia^4]                    = 3 / (N (N + 2))
"""
from __future__ import annotations

import math

__all__ = [
    "eigenstate_energy_variance",
    "eigenstate_offdiag_variance",
    "eigenstate_diag_variance",
    "random_vector_offdiag_variance",
    "sector_energy_variance",
    "thermal_offdiag_variance",
]


def eigenstate_offdiag_variance(N: int, Np: int) -> float:
    """Variance of ``C_ij`` (i != j) for an ``Np``-orbital eigenstate."""
    if N < 2:
        return 0.0
    return Np * (N - Np) / ((N - 1) * N * (N + 2))


def eigenstate_diag_variance(N: int, Np: int) -> float:
    """Variance of ``C_ii`` for an ``Np``-orbital eigenstate."""
    return 2.0 * Np * (N - Np) / (N * N * (N + 2))


def thermal_offdiag_variance(N: int, n_mean: float, n_sq_mean: float) -> float:
    """Variance of ``C^beta_ij`` (i != j) given the occupation moments of the spectrum.

    Fluctuations of ``sum_a n_a`` between realizations are O(1) and dropped.
    """
    if N < 2:
        return 0.0
    return N * (n_sq_mean - n_mean * n_mean) / ((N - 1) * (N + 2))


def eigenstate_energy_variance(N: int, Np: int, eta: float) -> float:
    """Variance of ``sum_{a in A} E_a`` over GOE realizations and uniform ``Np``-subsets.

    Sampling without replacement from a spectrum with population variance
    ``eta^2 (N + 1 - 2/N)`` plus the fluctuation of the spectral mean
    ``Var(tr eta V) = 2 N eta^2``.
    """
    if N < 2:
        return 2.0 * eta * eta * Np
    spread = eta * eta * (N + 1 - 2.0 / N)
    within = Np * (N - Np) / (N - 1) * spread
    between = (Np / N) ** 2 * 2.0 * N * eta * eta
    return within + between


def random_vector_offdiag_variance(N: int, Np: int) -> float:
    """Variance of ``<psi|c_i^+ c_j|psi>`` (i != j) for a Haar vector in the ``Np`` sector."""
    dim = math.comb(N, Np)
    if Np < 1 or Np > N - 1:
        return 0.0
    return math.comb(N - 2, Np - 1) / (dim * (dim + 2))


def sector_energy_variance(dim: int, etabar: float) -> float:
    """Variance of a uniformly picked eigenvalue of a ``dim``-dimensional GOE block.

    ``E[tr V^2] / dim = (dim + 1) etabar^2`` with diagonal variance ``2 etabar^2``.
    """
    return (dim + 1) * etabar * etabar
