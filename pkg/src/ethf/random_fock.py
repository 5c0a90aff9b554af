"""Fixed-particle Fock sectors, fermionic operators and fully random sector states.

Conventions
-----------
An occupation mask stores site ``k`` in bit ``k``. Basis states are ordered
``|n> = (c_0^+)^{n_0} (c_1^+)^{n_1} ... (c_{N-1}^+)^{n_{N-1}} |0>``, so site 0 is
leftmost in the Jordan-Wigner string and ``c_k^+`` acting on ``|n>`` picks up
``JW_SIGN`` once for every occupied site with index below ``k``. All full-Fock
oracles read ``JW_SIGN`` at call time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import sparse

from . import kernels
from .goe import eigendecompose_symmetric, make_rng, sample_goe
from .model import EigenstateSpec, FreeFermionModel, ModelParams

__all__ = [
    "JW_SIGN",
    "FockSector",
    "SectorCapError",
    "SectorOperator",
    "build_sector",
    "fock_correlation",
    "hopping_element",
    "match_etabar",
    "random_state_correlation",
    "sample_haar_vector",
    "sample_sector_hamiltonian",
    "sector_amplitudes",
    "sector_number_operator",
    "slater_state",
]

JW_SIGN = -1
SECTOR_CAP = 10**6
DENSE_CAP = 4096
FULL_FOCK_MAX_SITES = 12


class SectorCapError(ValueError):
    """Requested sector or dense solve exceeds the configured size cap."""


@dataclass(frozen=True, eq=False)
class FockSector:
    N: int
    Np: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    def index(self, mask: int) -> int:
        """Position of ``mask`` in the basis, or -1 if it is not a sector state."""
        k = int(np.searchsorted(self.basis, mask))
        if k < self.dim and self.basis[k] == mask:
            return k
        return -1


def build_sector(N: int, Np: int, cap: int = SECTOR_CAP) -> FockSector:
    """All ``N``-site masks with ``Np`` set bits, in ascending order."""
    if not 1 <= N <= 62:
        raise ValueError(f"N must lie in [1, 62], got {N}")
    if not 0 <= Np <= N:
        raise ValueError(f"Np must lie in [0, {N}], got {Np}")
    dim = math.comb(N, Np)
    if dim > cap:
        raise SectorCapError(f"sector dimension C({N},{Np})={dim} exceeds cap {cap}")
    masks = np.fromiter(
        (sum(1 << k for k in c) for c in combinations(range(N), Np)),
        dtype=np.int64,
        count=dim,
    )
    masks.sort()
    masks.setflags(write=False)
    return FockSector(N, Np, masks)


def hopping_element(state: int, i: int, j: int):
    """Apply ``c_i^+ c_j`` to basis mask ``state``.

    Returns ``None`` when the result vanishes, else ``(new_state, sign)``.
    """
    bj = 1 << j
    if not state & bj:
        return None
    if i == j:
        return state, 1
    bi = 1 << i
    if state & bi:
        return None
    lo, hi = min(i, j), max(i, j)
    between = bin(state & ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)).count("1")
    sign = JW_SIGN if between % 2 else 1
    return (state & ~bj) | bi, sign


@dataclass(frozen=True, eq=False)
class SectorOperator:
    sector: FockSector
    matrix: sparse.csr_matrix

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)


def sector_number_operator(sector: FockSector, i: int, j: int) -> SectorOperator:
    """Sparse matrix of ``c_i^+ c_j`` restricted to ``sector``."""
    if not (0 <= i < sector.N and 0 <= j < sector.N):
        raise ValueError(f"sites ({i}, {j}) out of range for N={sector.N}")
    rows, cols, vals = kernels.sector_hopping(sector.basis, i, j, JW_SIGN)
    m = sparse.csr_matrix((vals, (rows, cols)), shape=(sector.dim, sector.dim))
    return SectorOperator(sector, m)


def sample_haar_vector(dim: int, seed) -> np.ndarray:
    """Uniformly random real unit vector of length ``dim``."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    g = make_rng(seed).standard_normal(dim)
    return g / np.linalg.norm(g)


def random_state_correlation(sector: FockSector, psi: np.ndarray) -> np.ndarray:
    """``C^r_ij = <psi| c_i^+ c_j |psi>`` for a real vector in ``sector``."""
    psi = np.ascontiguousarray(psi, dtype=np.float64)
    if psi.shape != (sector.dim,):
        raise ValueError(f"state has shape {psi.shape}, sector dimension is {sector.dim}")
    return kernels.sector_correlation(sector.basis, psi, sector.N, JW_SIGN)


def sample_sector_hamiltonian(sector: FockSector, alpha: float, etabar: float, seed,
                              cap: int = DENSE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Spectrum of ``Np alpha I + etabar * GOE`` on ``sector``."""
    if sector.dim > cap:
        raise SectorCapError(f"dense eigensolve of dimension {sector.dim} exceeds cap {cap}")
    if etabar < 0:
        raise ValueError(f"etabar must be >= 0, got {etabar}")
    shift = sector.Np * alpha
    if etabar == 0:
        return np.full(sector.dim, float(shift)), np.eye(sector.dim)
    h = sample_goe(sector.dim, etabar, seed)
    h[np.diag_indices_from(h)] += shift
    return eigendecompose_symmetric(h)


def match_etabar(params: ModelParams, Np: int) -> float:
    """Sector coupling whose spectral variance ``C(N,Np) etabar^2`` equals ``Np N eta^2``."""
    if not 1 <= Np <= params.N - 1:
        raise ValueError(f"Np must lie in [1, {params.N - 1}], got {Np}")
    return params.eta * math.sqrt(Np * params.N / math.comb(params.N, Np))


# full Fock space oracles

def slater_state(model: FreeFermionModel, spec: EigenstateSpec, site_order=None) -> np.ndarray:
    """``d_{a_1}^+ d_{a_2}^+ ... d_{a_k}^+ |0>`` as a ``2**N`` vector (``a_1 < a_2 < ...``).

    With ``site_order`` the modes are relabelled first: new site ``k`` is old
    site ``site_order[k]``. The physical state is unchanged; only its
    occupation-basis representation follows the new Jordan-Wigner ordering.
    """
    N = model.N
    if N > FULL_FOCK_MAX_SITES:
        raise ValueError(f"full Fock space limited to N <= {FULL_FOCK_MAX_SITES}, got {N}")
    spec.check(N)
    orbitals = model.eigvecs
    if site_order is not None:
        orbitals = orbitals[np.asarray(site_order, dtype=np.intp), :]
    state = np.zeros(1 << N)
    state[0] = 1.0
    for a in reversed(spec.occupied):
        state = kernels.apply_creation(state, np.ascontiguousarray(orbitals[:, a]), N, JW_SIGN)
    return state


def sector_amplitudes(state: np.ndarray, sector: FockSector) -> np.ndarray:
    """Restrict a ``2**N`` vector to the basis of ``sector``."""
    if state.shape != (1 << sector.N,):
        raise ValueError("state length does not match 2**N")
    return np.ascontiguousarray(state[sector.basis])


def fock_correlation(state: np.ndarray, N: int, Np: int) -> np.ndarray:
    """``<state| c_i^+ c_j |state>`` for a full-Fock vector supported on the ``Np`` sector."""
    sector = build_sector(N, Np)
    return random_state_correlation(sector, sector_amplitudes(state, sector))
