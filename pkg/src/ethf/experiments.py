"""Monte Carlo ensembles with analytic predictions attached.

Each experiment fans realizations out by index; realization ``k`` draws from
``child_seed(seed, k, stream)`` so results do not depend on the worker count.
Per-realization scalars are gathered in index order and reduced sequentially,
which keeps reports bit-identical for a given seed.

Standard errors treat realizations as the independent units. Pooled variances
of matrix entries are therefore reported with the spread of the
per-realization mean square, not with the (correlated) entry count.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from . import kernels, reference
from .entanglement import (
    Subsystem,
    binary_entropy,
    entanglement_entropy,
    predicted_entropy_multi,
    predicted_entropy_single,
)
from .goe import child_seed, make_rng
from .model import (
    ModelParams,
    build_model,
    correlation_matrix,
    eigenstate_energy,
    sample_occupation,
)
from .random_fock import (
    build_sector,
    match_etabar,
    random_state_correlation,
    sample_haar_vector,
    sample_sector_hamiltonian,
)
from .stats import EnsembleReport, Record, StatAccumulator
from .thermal import (
    avg_occupation,
    avg_occupation_high_t,
    avg_occupation_low_t,
    effective_beta,
    fermi_occupation,
    thermal_correlation_matrix,
)

__all__ = [
    "MODES",
    "ExperimentConfig",
    "run_entropy_scan",
    "run_eth_correlators",
    "run_experiment",
    "run_random_fock_compare",
    "run_spectrum_stats",
    "run_thermal_compare",
]

MODES = ("eth-correlators", "entropy-scan", "thermal-compare", "random-fock-compare", "spectrum-stats")

# child-seed stream ids within one realization
_MODEL, _OCC, _SUB, _HAAR, _SECTOR, _PICK = range(6)


@dataclass(frozen=True)
class ExperimentConfig:
    params: ModelParams
    Np: int
    realizations: int
    seed: int
    mode: str
    sizes: tuple[int, ...] = ()
    beta: float | None = None
    workers: int = 1
    exclude_flagged: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= self.Np <= self.params.N:
            raise ValueError(f"Np must lie in [0, {self.params.N}], got {self.Np}")
        if any(not 1 <= m <= self.params.N for m in self.sizes):
            raise ValueError(f"subsystem sizes must lie in [1, {self.params.N}], got {self.sizes}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.beta is not None and self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        object.__setattr__(self, "sizes", tuple(int(m) for m in self.sizes))

    @property
    def filling(self) -> float:
        return self.Np / self.params.N

    def echo(self) -> dict:
        d = asdict(self)
        d["params"] = asdict(self.params)
        d["sizes"] = list(self.sizes)
        return d


# fan-out

def _fan_out(task, cfg: ExperimentConfig, extra=None) -> list:
    args = [(cfg, k, extra) for k in range(cfg.realizations)]
    if cfg.workers == 1:
        return [task(a) for a in args]
    chunk = max(1, cfg.realizations // (4 * cfg.workers))
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(task, args, chunksize=chunk))


def _model(cfg: ExperimentConfig, k: int):
    model = build_model(cfg.params, child_seed(cfg.seed, k, _MODEL))
    if model.flagged and cfg.exclude_flagged:
        return None
    return model


@lru_cache(maxsize=32)
def _upper(n: int):
    return np.triu_indices(n, 1)


def _offdiag(c: np.ndarray) -> np.ndarray:
    return c[_upper(c.shape[0])]


def _entry_moments(c: np.ndarray) -> tuple[float, float, float, float]:
    d = np.diag(c)
    off = _offdiag(c)
    if off.size == 0:
        off = np.zeros(1)
    return float(d.mean()), float(np.mean(d * d)), float(off.mean()), float(np.mean(off * off))


# reductions

def _column(rows, key):
    return np.array([r[key] for r in rows], dtype=np.float64)


def mean_record(quantity, values, predicted=None, eq="none", **kw) -> Record:
    acc = StatAccumulator.from_values(values)
    return Record(quantity, acc.mean, acc.stderr, acc.count, variance=acc.variance,
                  predicted=predicted, prediction_eq=eq, **kw)


def variance_record(quantity, values, predicted=None, eq="none", **kw) -> Record:
    """Sample variance of a scalar; its standard error from the squared deviations."""
    acc = StatAccumulator.from_values(values)
    dev = StatAccumulator.from_values((np.asarray(values) - acc.mean) ** 2)
    return Record(quantity, acc.variance, dev.stderr, acc.count, variance=dev.variance,
                  predicted=predicted, prediction_eq=eq, **kw)


def pooled_variance_record(quantity, first, second, predicted=None, eq="none", **kw) -> Record:
    """Variance of exchangeable entries from per-realization first and second moments."""
    m1 = StatAccumulator.from_values(first)
    m2 = StatAccumulator.from_values(second)
    return Record(quantity, m2.mean - m1.mean * m1.mean, m2.stderr, m2.count, variance=m2.variance,
                  predicted=predicted, prediction_eq=eq, **kw)


def _report(cfg: ExperimentConfig, started: float, used: int, **meta) -> EnsembleReport:
    info = {
        "mode": cfg.mode,
        "config": cfg.echo(),
        "seed": cfg.seed,
        "kernel_backend": kernels.BACKEND,
        "realizations_requested": cfg.realizations,
        "realizations_used": used,
        "excluded_realizations": cfg.realizations - used,
    }
    info.update(meta)
    info["wall_time_s"] = time.perf_counter() - started
    return EnsembleReport(info)


def _exact_record(quantity, value, predicted, eq, what) -> Record:
    rel = abs(value - predicted) / abs(predicted) if predicted else abs(value)
    return Record(quantity, value, 0.0, 1, predicted=predicted, prediction_eq=eq, exact=True,
                  note=f"{what}; rel_diff={rel:.3e}")


def _require(kept, cfg):
    if not kept:
        raise RuntimeError(f"all {cfg.realizations} realizations were excluded")


# eth-correlators

def _eth_task(args):
    cfg, k, beta = args
    model = _model(cfg, k)
    if model is None:
        return None
    spec = sample_occupation(cfg.params.N, cfg.Np, child_seed(cfg.seed, k, _OCC))
    c_psi = correlation_matrix(model, spec)
    c_beta = thermal_correlation_matrix(model, beta)
    pd, pd2, po, po2 = _entry_moments(c_psi)
    bd, bd2, bo, bo2 = _entry_moments(c_beta)
    diff = c_psi - c_beta
    return {
        "psi_d": pd, "psi_d2": pd2, "psi_o": po, "psi_o2": po2,
        "beta_d": bd, "beta_d2": bd2, "beta_o": bo, "beta_o2": bo2,
        "gap": pd - bd,
        "max_abs_diff": float(np.max(np.abs(diff))),
        "rms_diff": float(np.sqrt(np.mean(diff * diff))),
    }


def run_eth_correlators(cfg: ExperimentConfig) -> EnsembleReport:
    """Pure-eigenstate versus Gibbs correlation matrices at the matched temperature."""
    if cfg.mode != "eth-correlators":
        raise ValueError(f"config mode is {cfg.mode!r}")
    N, Np = cfg.params.N, cfg.Np
    if not 1 <= Np <= N / 2:
        raise ValueError(f"eth-correlators needs 1 <= Np <= N/2, got Np={Np}, N={N}")
    started = time.perf_counter()
    beta = effective_beta(cfg.params, cfg.filling) if cfg.beta is None else cfg.beta
    avg = avg_occupation(cfg.params, beta)
    rows = _fan_out(_eth_task, cfg, beta)
    kept = [r for r in rows if r is not None]
    _require(kept, cfg)
    rep = _report(cfg, started, len(kept), beta=beta, n_mean=avg.n_mean, n_sq_mean=avg.n_sq_mean)
    col = lambda key: _column(kept, key)  # noqa: E731

    rep.add(mean_record("psi_diag_mean", col("psi_d"), Np / N, "purec"))
    rep.add(mean_record("psi_offdiag_mean", col("psi_o"), 0.0, "purec"))
    rep.add(pooled_variance_record("psi_offdiag_var", col("psi_o"), col("psi_o2"), Np / N**2, "purec",
                                   reference=reference.eigenstate_offdiag_variance(N, Np)))
    rep.add(pooled_variance_record("psi_diag_var", col("psi_d"), col("psi_d2"),
                                   reference=reference.eigenstate_diag_variance(N, Np),
                                   note="no closed-form prediction for i=j"))
    rep.add(mean_record("beta_diag_mean", col("beta_d"), avg.n_mean, "thermalc"))
    rep.add(mean_record("beta_offdiag_mean", col("beta_o"), 0.0, "thermalc"))
    rep.add(pooled_variance_record("beta_offdiag_var", col("beta_o"), col("beta_o2"), avg.n_sq_mean / N,
                                   "thermalc",
                                   reference=reference.thermal_offdiag_variance(N, avg.n_mean, avg.n_sq_mean)))
    rep.add(mean_record("diag_mean_gap", col("gap"), 0.0, "thermalc",
                        note="mean diag(C_psi) - mean diag(C_beta)"))
    rep.add(mean_record("max_abs_diff", col("max_abs_diff")))
    rep.add(mean_record("rms_diff", col("rms_diff")))
    return rep


# spectrum-stats

def _spectrum_task(args):
    cfg, k, _ = args
    model = _model(cfg, k)
    if model is None:
        return None
    spec = sample_occupation(cfg.params.N, cfg.Np, child_seed(cfg.seed, k, _OCC))
    return {"energy": eigenstate_energy(model, spec)}


def run_spectrum_stats(cfg: ExperimentConfig) -> EnsembleReport:
    """First two moments of many-body eigenenergies at fixed ``Np``."""
    if cfg.mode != "spectrum-stats":
        raise ValueError(f"config mode is {cfg.mode!r}")
    p, Np = cfg.params, cfg.Np
    started = time.perf_counter()
    rows = _fan_out(_spectrum_task, cfg)
    kept = [r for r in rows if r is not None]
    _require(kept, cfg)
    rep = _report(cfg, started, len(kept))
    energy = _column(kept, "energy")
    rep.add(mean_record("energy_mean", energy, Np * p.alpha, "E"))
    rep.add(variance_record("energy_var", energy, Np * p.N * p.eta**2, "E",
                            reference=reference.eigenstate_energy_variance(p.N, Np, p.eta)))
    return rep


# entropy-scan

def _entropy_task(args):
    cfg, k, _ = args
    model = _model(cfg, k)
    if model is None:
        return None
    N = cfg.params.N
    spec = sample_occupation(N, cfg.Np, child_seed(cfg.seed, k, _OCC))
    c = correlation_matrix(model, spec)
    rng = make_rng(child_seed(cfg.seed, k, _SUB))
    out = {}
    for m in cfg.sizes:
        sub = Subsystem.block(int(rng.integers(N)), m, N)
        out[m] = entanglement_entropy(c, sub)
    return out


def _entropy_prediction(N, Np, m):
    if Np == 1 and m <= N / 2:
        return predicted_entropy_single(N, m), "ent1"
    if 2 <= Np <= N - 1 and m <= Np:
        return predicted_entropy_multi(N, Np, m), "entmany"
    return None, "none"


def run_entropy_scan(cfg: ExperimentConfig) -> EnsembleReport:
    """Average subsystem entropy versus subsystem size ``m``."""
    if cfg.mode != "entropy-scan":
        raise ValueError(f"config mode is {cfg.mode!r}")
    if not cfg.sizes:
        raise ValueError("entropy-scan needs at least one subsystem size")
    N, Np = cfg.params.N, cfg.Np
    started = time.perf_counter()
    rows = _fan_out(_entropy_task, cfg)
    kept = [r for r in rows if r is not None]
    _require(kept, cfg)
    rep = _report(cfg, started, len(kept), validity_boundary_m=Np)
    density = float(binary_entropy(Np / N))
    for m in cfg.sizes:
        s = np.array([r[m] for r in kept])
        pred, eq = _entropy_prediction(N, Np, m)
        note = "m<=Np" if m <= Np else "m>Np: no prediction"
        rep.add(mean_record("entropy", s, pred, eq, label=str(m), note=note))
        if eq == "entmany":
            rep.add(mean_record("entropy_density", s / m, density, eq, label=str(m), note=note))
    return rep


# thermal-compare

def _thermal_task(args):
    cfg, k, beta = args
    model = _model(cfg, k)
    if model is None:
        return None
    n = fermi_occupation(model.energies, beta)
    return {"n": float(np.mean(n)), "n2": float(np.mean(n * n))}


def run_thermal_compare(cfg: ExperimentConfig) -> EnsembleReport:
    """Finite-N occupation averages versus the semicircle integral and its closed forms."""
    if cfg.mode != "thermal-compare":
        raise ValueError(f"config mode is {cfg.mode!r}")
    p = cfg.params
    if cfg.beta is not None:
        beta = cfg.beta
    elif 1 <= cfg.Np <= p.N / 2:
        beta = effective_beta(p, cfg.filling)
    else:
        raise ValueError("thermal-compare needs beta or 1 <= Np <= N/2")
    started = time.perf_counter()
    exact = avg_occupation(p, beta)
    high = avg_occupation_high_t(p, beta)
    rows = _fan_out(_thermal_task, cfg, beta)
    kept = [r for r in rows if r is not None]
    _require(kept, cfg)
    rep = _report(cfg, started, len(kept), beta=beta,
                  boltzmann_parameter=math.exp(-beta * (p.alpha - p.radius)))
    rep.add(mean_record("n_mean_sampled", _column(kept, "n"), exact.n_mean, "thermalc",
                        note="predicted: semicircle quadrature"))
    rep.add(mean_record("n_sq_mean_sampled", _column(kept, "n2"), exact.n_sq_mean, "thermalc",
                        note="predicted: semicircle quadrature"))
    rep.add(_exact_record("n_mean_quadrature_vs_high_t", exact.n_mean, high.n_mean, "thermalc",
                          "linearized high-temperature form"))
    rep.add(_exact_record("n_sq_mean_quadrature_vs_high_t", exact.n_sq_mean, high.n_sq_mean, "thermalc",
                          "linearized high-temperature form"))
    if beta > 0:
        low = avg_occupation_low_t(p, beta)
        rep.add(_exact_record("n_mean_quadrature_vs_bessel", exact.n_mean, low.n_mean, "n",
                              "Boltzmann closed form"))
        rep.add(_exact_record("n_sq_mean_quadrature_vs_bessel", exact.n_sq_mean, low.n_sq_mean, "nn",
                              "Boltzmann closed form"))
    return rep


# random-fock-compare

def _fock_task(args):
    cfg, k, ctx = args
    sector, etabar = ctx
    N, Np = cfg.params.N, cfg.Np
    out = {}
    psi = sample_haar_vector(sector.dim, child_seed(cfg.seed, k, _HAAR))
    out["haar_d"], _, out["haar_o"], out["haar_o2"] = _entry_moments(random_state_correlation(sector, psi))
    if etabar is not None:
        energies, vecs = sample_sector_hamiltonian(sector, cfg.params.alpha, etabar,
                                                   child_seed(cfg.seed, k, _SECTOR))
        pick = int(make_rng(child_seed(cfg.seed, k, _PICK)).integers(sector.dim))
        c = random_state_correlation(sector, np.ascontiguousarray(vecs[:, pick]))
        _, _, out["sec_o"], out["sec_o2"] = _entry_moments(c)
        out["sec_e"] = float(energies[pick])
        model = _model(cfg, k)
        if model is not None:
            spec = sample_occupation(N, Np, child_seed(cfg.seed, k, _OCC))
            _, _, out["free_o"], out["free_o2"] = _entry_moments(correlation_matrix(model, spec))
    return out


def run_random_fock_compare(cfg: ExperimentConfig) -> EnsembleReport:
    """Fully random sector states versus free-fermion eigenstates."""
    if cfg.mode != "random-fock-compare":
        raise ValueError(f"config mode is {cfg.mode!r}")
    p, N, Np = cfg.params, cfg.params.N, cfg.Np
    started = time.perf_counter()
    sector = build_sector(N, Np)
    dim = sector.dim
    etabar = match_etabar(p, Np) if 1 <= Np <= N - 1 else None
    rows = _fan_out(_fock_task, cfg, (sector, etabar))
    used = len(rows) if etabar is None else sum("free_o" in r for r in rows)
    rep = _report(cfg, started, used, sector_dim=dim, etabar=etabar,
                  note="excluded realizations affect only the free-fermion columns")
    col = lambda key, rs=rows: _column(rs, key)  # noqa: E731

    ran_c = math.comb(N - 2, Np - 1) / dim**2 if 1 <= Np <= N - 1 else 0.0
    ran_ref = reference.random_vector_offdiag_variance(N, Np)
    haar = pooled_variance_record("haar_offdiag_var", col("haar_o"), col("haar_o2"), ran_c, "ranC",
                                  reference=ran_ref)
    rep.add(haar)
    rep.add(mean_record("haar_diag_mean", col("haar_d"), Np / N, "ranC"))
    if etabar is None:
        return rep

    sec = pooled_variance_record("sector_offdiag_var", col("sec_o"), col("sec_o2"), ran_c, "ranC",
                                 reference=ran_ref)
    rep.add(sec)
    rep.add(Record("sector_minus_haar_offdiag_var", sec.measured - haar.measured,
                   math.hypot(sec.stderr, haar.stderr), len(rows), predicted=0.0, prediction_eq="ranC",
                   note="two-sample comparison"))
    rep.add(mean_record("sector_energy_mean", col("sec_e"), Np * p.alpha, "ranE"))
    rep.add(variance_record("sector_energy_var", col("sec_e"), dim * etabar**2, "ranE",
                            reference=reference.sector_energy_variance(dim, etabar)))

    free_rows = [r for r in rows if "free_o" in r]
    _require(free_rows, cfg)
    free = pooled_variance_record("free_offdiag_var", _column(free_rows, "free_o"),
                                  _column(free_rows, "free_o2"), Np / N**2, "purec",
                                  reference=reference.eigenstate_offdiag_variance(N, Np))
    rep.add(free)
    ratio = free.measured / sec.measured
    rel = math.hypot(free.stderr / free.measured, sec.stderr / sec.measured)
    rep.add(Record("free_to_sector_var_ratio", ratio, abs(ratio) * rel, len(rows),
                   predicted=(Np / N**2) / ran_c, prediction_eq="ranC",
                   reference=reference.eigenstate_offdiag_variance(N, Np) / ran_ref,
                   note="free-fermion / random-sector off-diagonal variance"))
    return rep


_RUNNERS = {
    "eth-correlators": run_eth_correlators,
    "entropy-scan": run_entropy_scan,
    "thermal-compare": run_thermal_compare,
    "random-fock-compare": run_random_fock_compare,
    "spectrum-stats": run_spectrum_stats,
}


def run_experiment(cfg: ExperimentConfig) -> EnsembleReport:
    return _RUNNERS[cfg.mode](cfg)
