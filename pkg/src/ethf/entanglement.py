"""Subsystem entanglement entropies (natural log) of free-fermion eigenstates.

Two routes are provided: the correlation-matrix route, which only needs the
``m x m`` block of ``C``, and an exact route that builds the ``2**N`` state,
reorders modes so the subsystem comes first (with fermionic signs) and traces
out the rest. The exact route is a small-N oracle for the first.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from . import random_fock
from .model import EigenstateSpec, FreeFermionModel

__all__ = [
    "EntropyProfile",
    "Subsystem",
    "binary_entropy",
    "entanglement_entropy",
    "exact_reduced_entropy",
    "predicted_entropy_multi",
    "predicted_entropy_single",
    "reduced_entropy_from_state",
]

PROB_SLACK = 1e-12


@dataclass(frozen=True)
class Subsystem:
    indices: tuple[int, ...]

    def __init__(self, indices):
        idx = tuple(sorted(int(i) for i in indices))
        if any(i < 0 for i in idx) or len(set(idx)) != len(idx):
            raise ValueError(f"subsystem indices must be distinct and non-negative: {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def m(self) -> int:
        return len(self.indices)

    @classmethod
    def block(cls, start: int, m: int, N: int) -> "Subsystem":
        """``m`` consecutive sites from ``start``, wrapping around ``N``."""
        if not 0 <= m <= N:
            raise ValueError(f"block size {m} out of range for N={N}")
        return cls((start + k) % N for k in range(m))

    @classmethod
    def from_mask(cls, mask: int) -> "Subsystem":
        return cls(k for k in range(mask.bit_length()) if (mask >> k) & 1)

    def mask(self) -> int:
        return sum(1 << i for i in self.indices)

    def complement(self, N: int) -> "Subsystem":
        taken = set(self.indices)
        return Subsystem(i for i in range(N) if i not in taken)

    def check(self, N: int) -> None:
        if self.indices and self.indices[-1] >= N:
            raise ValueError(f"site {self.indices[-1]} out of range for N={N}")


@dataclass(frozen=True)
class EntropyProfile:
    sizes: np.ndarray
    entropies: np.ndarray
    errors: np.ndarray


def _as_subsystem(sub) -> Subsystem:
    return sub if isinstance(sub, Subsystem) else Subsystem(sub)


def binary_entropy(p):
    """``-p log p - (1-p) log(1-p)`` with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < -PROB_SLACK) or np.any(p > 1.0 + PROB_SLACK):
        raise ValueError("probability outside [0, 1]")
    p = np.clip(p, 0.0, 1.0)
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(p > 0, p * np.log(p), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return h if h.ndim else float(h)


def entanglement_entropy(C: np.ndarray, sub) -> float:
    """Entropy of ``sub`` from the eigenvalues of the restricted correlation matrix."""
    sub = _as_subsystem(sub)
    sub.check(C.shape[0])
    if sub.m == 0:
        return 0.0
    idx = np.asarray(sub.indices, dtype=np.intp)
    lam = np.linalg.eigvalsh(C[np.ix_(idx, idx)])
    return float(np.sum(binary_entropy(np.clip(lam, 0.0, 1.0))))


def _front_permutation(N: int, sub: Subsystem) -> np.ndarray:
    """Index map ``old basis index -> new index`` with ``sub`` sites in the low bits."""
    s = np.arange(1 << N, dtype=np.int64)
    new = np.zeros_like(s)
    order = list(sub.indices) + list(sub.complement(N).indices)
    for k, site in enumerate(order):
        new |= ((s >> site) & 1) << k
    return new


def reduced_entropy_from_state(state: np.ndarray, N: int, sub) -> float:
    """Von Neumann entropy of ``sub`` for a real ``2**N`` fermionic state of definite parity."""
    sub = _as_subsystem(sub)
    sub.check(N)
    m = sub.m
    if m in (0, N):
        return 0.0
    signs = kernels.reorder_signs(N, sub.mask(), random_fock.JW_SIGN)
    reordered = np.empty_like(state)
    reordered[_front_permutation(N, sub)] = signs * state
    amp = reordered.reshape(1 << (N - m), 1 << m)
    sv = np.linalg.svd(amp, compute_uv=False)
    p = sv * sv
    p = p[p > 0.0]
    return float(-np.sum(p * np.log(p)))


def exact_reduced_entropy(model: FreeFermionModel, spec: EigenstateSpec, sub) -> float:
    """Entropy of ``sub`` from the explicit Fock-space state (``N <= 12``)."""
    if model.N > random_fock.FULL_FOCK_MAX_SITES:
        raise ValueError(f"exact oracle limited to N <= {random_fock.FULL_FOCK_MAX_SITES}, got {model.N}")
    state = random_fock.slater_state(model, spec)
    return reduced_entropy_from_state(state, model.N, sub)


def predicted_entropy_single(N: int, m: int) -> float:
    """Average entropy of ``m <= N/2`` sites in a one-particle eigenstate."""
    if not 1 <= m <= N / 2:
        raise ValueError(f"m must lie in [1, N/2] = [1, {N / 2:g}], got {m}")
    return float(binary_entropy(m / N)) - 1.0 / (2.0 * (N - m))


def predicted_entropy_multi(N: int, Np: int, m: int) -> float:
    """Average entropy of ``m`` sites in an ``Np``-particle eigenstate (meaningful for ``m <~ Np``)."""
    if not 1 <= Np <= N - 1:
        raise ValueError(f"Np must lie in [1, {N - 1}], got {Np}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return m * float(binary_entropy(Np / N)) - m * m / (2.0 * (N - Np))


def thermal_entropy_density(filling: float) -> float:
    """Entropy per site of a Gibbs state with mean occupation ``filling``."""
    return float(binary_entropy(filling))
