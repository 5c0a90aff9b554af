"""Random free-fermion Hamiltonian: one realization and its eigenstates.

``H = alpha * sum_i c_i^+ c_i + eta * sum_ij c_i^+ V_ij c_j`` with ``V`` drawn
from the GOE. Diagonalizing ``eta V`` gives single-particle energies
``E_a = alpha + eps_a`` and orbitals ``psi^a``; a many-body eigenstate is a set
of occupied orbitals, never a ``2**N`` vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .goe import eigendecompose_symmetric, make_rng, sample_goe

__all__ = [
    "EigenstateSpec",
    "FreeFermionModel",
    "ModelParams",
    "build_model",
    "correlation_matrix",
    "eigenstate_energy",
    "particle_hole_complement",
    "sample_occupation",
]


@dataclass(frozen=True)
class ModelParams:
    """Ensemble parameters ``(N, alpha, eta)``.

    ``alpha`` must exceed the semicircle radius ``2 sqrt(N) eta`` so the
    single-particle spectrum is positive and the vacuum is the ground state.
    """

    N: int
    alpha: float
    eta: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if not self.eta > 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.alpha > self.radius:
            raise ValueError(
                f"alpha={self.alpha} must exceed the semicircle radius 2*sqrt(N)*eta={self.radius:.6g}"
            )

    @property
    def radius(self) -> float:
        return 2.0 * math.sqrt(self.N) * self.eta

    @classmethod
    def with_default_alpha(cls, N: int, eta: float = 1.0, alpha: float | None = None) -> "ModelParams":
        """Params with ``alpha`` defaulting to twice the semicircle radius."""
        if alpha is None:
            alpha = 4.0 * math.sqrt(N) * eta
        return cls(N, alpha, eta)


@dataclass(frozen=True, eq=False)
class FreeFermionModel:
    params: ModelParams
    energies: np.ndarray
    eigvecs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.energies.setflags(write=False)
        self.eigvecs.setflags(write=False)

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def flagged(self) -> bool:
        """True when a fluctuation pushed some single-particle energy to <= 0."""
        return bool(self.energies[0] <= 0.0)


@dataclass(frozen=True)
class EigenstateSpec:
    """Occupied orbital set of a many-body eigenstate (sorted, distinct)."""

    occupied: tuple[int, ...]

    def __init__(self, occupied=()):
        occ = tuple(sorted(int(a) for a in occupied))
        if any(a < 0 for a in occ):
            raise ValueError("mode indices must be non-negative")
        if len(set(occ)) != len(occ):
            raise ValueError(f"duplicate mode indices in {occ}")
        object.__setattr__(self, "occupied", occ)

    @property
    def Np(self) -> int:
        return len(self.occupied)

    def check(self, N: int) -> None:
        if self.occupied and self.occupied[-1] >= N:
            raise ValueError(f"mode index {self.occupied[-1]} out of range for N={N}")

    def index_array(self) -> np.ndarray:
        return np.asarray(self.occupied, dtype=np.intp)


def build_model(params: ModelParams, seed) -> FreeFermionModel:
    """Sample ``eta V`` and diagonalize it.

    Realizations with a non-positive energy are returned with
    ``flagged == True``; callers decide whether to exclude them.
    """
    eps, vecs = eigendecompose_symmetric(sample_goe(params.N, params.eta, seed))
    return FreeFermionModel(params, params.alpha + eps, vecs)


def sample_occupation(N: int, Np: int, seed) -> EigenstateSpec:
    """Uniformly random ``Np``-subset of the ``N`` orbitals."""
    if not 0 <= Np <= N:
        raise ValueError(f"Np must lie in [0, {N}], got {Np}")
    rng = make_rng(seed)
    return EigenstateSpec(rng.choice(N, size=Np, replace=False))


def eigenstate_energy(model: FreeFermionModel, spec: EigenstateSpec) -> float:
    spec.check(model.N)
    return float(np.sum(model.energies[spec.index_array()]))


def correlation_matrix(model: FreeFermionModel, spec: EigenstateSpec) -> np.ndarray:
    """``C_ij = <Psi| c_i^+ c_j |Psi> = sum_{a in A} psi^a_i psi^a_j`` (a rank-Np projector)."""
    spec.check(model.N)
    occ = model.eigvecs[:, spec.index_array()]
    c = occ @ occ.T
    return 0.5 * (c + c.T)


def particle_hole_complement(spec: EigenstateSpec, N: int) -> EigenstateSpec:
    spec.check(N)
    taken = set(spec.occupied)
    return EigenstateSpec(a for a in range(N) if a not in taken)
