"""Gibbs-ensemble predictions for the random free-fermion model.

Semicircle averages of the Fermi occupation are computed with Gauss-Chebyshev
quadrature of the second kind, whose weight ``sqrt(1 - x^2)`` is the
semicircle density itself. The closed forms in terms of ``I_1`` are the
Boltzmann (low-temperature) approximation of the same integrals and are
accurate only when ``exp(-beta (alpha - R))`` is small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import expit

from .model import FreeFermionModel, ModelParams

__all__ = [
    "ThermalAverages",
    "avg_occupation",
    "avg_occupation_high_t",
    "avg_occupation_low_t",
    "bessel_i1",
    "bessel_i1e",
    "chebyshev2_rule",
    "effective_beta",
    "fermi_occupation",
    "thermal_correlation_matrix",
]

DEFAULT_ORDER = 256
# Power series below, asymptotic expansion at and above.
BESSEL_SWITCH = 15.0


@dataclass(frozen=True)
class ThermalAverages:
    """Semicircle averages ``[n_beta]`` and ``[(n_beta)^2]`` at inverse temperature ``beta``."""

    beta: float
    n_mean: float
    n_sq_mean: float


def fermi_occupation(E, beta: float):
    """``1 / (exp(beta E) + 1)``, saturating cleanly for large ``|beta E|``."""
    out = expit(-beta * np.asarray(E, dtype=np.float64))
    return out if np.ndim(out) else float(out)


@lru_cache(maxsize=16)
def chebyshev2_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights with ``sum w f(x) ~= (2/pi) int_{-1}^{1} sqrt(1-x^2) f(x) dx``.

    The weights sum to one, i.e. they are the probability masses of the unit
    semicircle. Returned arrays are read-only and shared.
    """
    if order < 2:
        raise ValueError(f"quadrature order must be >= 2, got {order}")
    theta = np.arange(1, order + 1) * (math.pi / (order + 1))
    nodes = np.cos(theta)
    weights = (2.0 / (order + 1)) * np.sin(theta) ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def avg_occupation(params: ModelParams, beta: float, order: int = DEFAULT_ORDER) -> ThermalAverages:
    """Exact-Fermi semicircle averages of the occupation and its square."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    x, w = chebyshev2_rule(order)
    n = expit(-beta * (params.alpha + params.radius * x))
    return ThermalAverages(float(beta), float(np.dot(w, n)), float(np.dot(w, n * n)))


def avg_occupation_high_t(params: ModelParams, beta: float) -> ThermalAverages:
    """Linearized averages ``1/2 - alpha beta/4`` and ``1/4 - alpha beta/4`` (valid for ``alpha beta << 1``)."""
    ab = params.alpha * beta
    return ThermalAverages(float(beta), 0.5 - ab / 4.0, 0.25 - ab / 4.0)


def avg_occupation_low_t(params: ModelParams, beta: float) -> ThermalAverages:
    """Bessel closed forms ``2 e^{-alpha beta} I_1(beta R)/(beta R)`` and ``e^{-2 alpha beta} I_1(2 beta R)/(beta R)``."""
    if not beta > 0:
        raise ValueError(f"beta must be > 0 for the low-temperature forms, got {beta}")
    x = beta * params.radius
    ab = params.alpha * beta
    n_mean = 2.0 * bessel_i1e(x) * math.exp(x - ab) / x
    n_sq = bessel_i1e(2.0 * x) * math.exp(2.0 * x - 2.0 * ab) / x
    return ThermalAverages(float(beta), n_mean, n_sq)


def _i1_series(x: float) -> float:
    half = 0.5 * x
    q = half * half
    term = half
    total = term
    k = 0
    while term > 1e-17 * total:
        term *= q / ((k + 1) * (k + 2))
        total += term
        k += 1
    return total


def _i1e_asymptotic(x: float) -> float:
    # e^{-x} I_1(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k prod_{j<=k}(4 - (2j-1)^2) / (k! (8x)^k)
    term = 1.0
    total = 1.0
    k = 1
    while True:
        nxt = -term * (4.0 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or abs(nxt) < 1e-17 * abs(total):
            if abs(nxt) < abs(term):
                total += nxt
            break
        total += nxt
        term = nxt
        k += 1
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_i1e(x: float) -> float:
    """Exponentially scaled modified Bessel function ``e^{-x} I_1(x)`` for ``x >= 0``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x < BESSEL_SWITCH:
        return _i1_series(x) * math.exp(-x)
    return _i1e_asymptotic(x)


def bessel_i1(x: float) -> float:
    """Modified Bessel function of the first kind, order one, for ``x >= 0``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x < BESSEL_SWITCH:
        return _i1_series(x)
    return _i1e_asymptotic(x) * math.exp(x)


def thermal_correlation_matrix(model: FreeFermionModel, beta: float) -> np.ndarray:
    """``C^beta = sum_a psi^a (psi^a)^T n_beta(E_a)``."""
    if beta == 0:
        return 0.5 * np.eye(model.N)
    n = expit(-beta * model.energies)
    v = model.eigvecs
    c = (v * n) @ v.T
    return 0.5 * (c + c.T)


def effective_beta(params: ModelParams, filling: float, order: int = DEFAULT_ORDER,
                   tol: float = 1e-10) -> float:
    """Inverse temperature whose semicircle-averaged occupation equals ``filling``.

    ``[n_beta]`` decreases strictly from 1/2 at ``beta = 0``, so fillings in
    ``(0, 1/2]`` have a unique root, found by bisection.
    """
    if not 0.0 < filling <= 0.5:
        raise ValueError(f"filling must lie in (0, 1/2], got {filling}")
    if filling == 0.5:
        return 0.0

    def excess(beta):
        return avg_occupation(params, beta, order).n_mean - filling

    lo, hi = 0.0, 1.0 / params.alpha
    while excess(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ValueError(f"could not bracket filling {filling}")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    resid = abs(excess(beta))
    if resid > tol:
        raise ValueError(f"filling {filling} not resolved to {tol} (residual {resid:.3g})")
    return beta
