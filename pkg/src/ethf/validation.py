"""Built-in oracle checks run by ``ethf validate``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .entanglement import Subsystem, entanglement_entropy, reduced_entropy_from_state
from .goe import child_seed
from .model import ModelParams, build_model, correlation_matrix, sample_occupation
from .random_fock import (
    build_sector,
    fock_correlation,
    random_state_correlation,
    sample_haar_vector,
    sector_number_operator,
    slater_state,
)
from .thermal import avg_occupation, avg_occupation_high_t, avg_occupation_low_t

__all__ = ["CheckResult", "LEVELS", "run_checks"]

LEVELS = {
    "fast": {"sizes": (4, 6, 8), "pairs": 4, "nnz_max_n": 8},
    "full": {"sizes": (4, 6, 8, 10), "pairs": 10, "nnz_max_n": 10},
}
VALIDATE_SEED = 20160901


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""
    op: str = "<"

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.3e} (need {self.op} {self.tolerance:.3g}) {self.detail}".rstrip()


def _pairs(sizes, pairs):
    for n in sizes:
        params = ModelParams.with_default_alpha(n)
        for k in range(pairs):
            model = build_model(params, child_seed(VALIDATE_SEED, n, k, 0))
            np_ = 1 + k % (n - 1)
            spec = sample_occupation(n, np_, child_seed(VALIDATE_SEED, n, k, 1))
            yield model, spec


def check_peschel_vs_exact(sizes, pairs) -> CheckResult:
    worst = 0.0
    count = 0
    for model, spec in _pairs(sizes, pairs):
        n = model.N
        c = correlation_matrix(model, spec)
        state = slater_state(model, spec)
        for mask in range(1, 1 << n):
            sub = Subsystem.from_mask(mask)
            d = abs(entanglement_entropy(c, sub) - reduced_entropy_from_state(state, n, sub))
            worst = max(worst, d)
            count += 1
    return CheckResult("peschel_vs_exact_rdm", worst < 1e-8, worst, 1e-8,
                       f"{count} bipartitions, N in {list(sizes)}")


def check_correlation_vs_fock(sizes, pairs) -> CheckResult:
    worst = 0.0
    for model, spec in _pairs(sizes, pairs):
        c_fock = fock_correlation(slater_state(model, spec), model.N, spec.Np)
        worst = max(worst, float(np.max(np.abs(c_fock - correlation_matrix(model, spec)))))
    return CheckResult("correlation_vs_fock", worst < 1e-10, worst, 1e-10)


def check_nnz_law(max_n) -> CheckResult:
    bad = 0
    total = 0
    for n in range(2, max_n + 1):
        for np_ in range(0, n + 1):
            sector = build_sector(n, np_)
            expect = math.comb(n - 2, np_ - 1) if np_ >= 1 else 0
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    total += 1
                    if sector_number_operator(sector, i, j).nnz != expect:
                        bad += 1
    return CheckResult("sector_nnz_law", bad == 0, float(bad), 0, f"mismatches among {total} operators, N <= {max_n}",
                       op="==")


def check_sector_hermiticity(max_n) -> CheckResult:
    worst = 0.0
    for n in range(2, max_n + 1):
        sector = build_sector(n, n // 2)
        for i in range(n):
            for j in range(n):
                a = sector_number_operator(sector, i, j).matrix
                b = sector_number_operator(sector, j, i).matrix
                worst = max(worst, float(abs(a.T - b).max()) if a.nnz or b.nnz else 0.0)
    return CheckResult("sector_transpose_symmetry", worst == 0.0, worst, 0, op="==")


def check_bessel_corridor() -> CheckResult:
    params = ModelParams(16, 20.0, 1.0)
    worst = 0.0
    used = 0
    for beta in np.linspace(0.05, 5.0, 20):
        if math.exp(-beta * (params.alpha - params.radius)) >= 1e-3:
            continue
        used += 1
        q = avg_occupation(params, beta).n_mean
        b = avg_occupation_low_t(params, beta).n_mean
        worst = max(worst, abs(q - b) / q)
    return CheckResult("quadrature_vs_bessel", worst < 1e-3, worst, 1e-3, f"{used} beta values")


def check_high_t_order() -> CheckResult:
    params = ModelParams(16, 20.0, 1.0)
    resid = []
    for ab in (1e-3, 1e-2):
        beta = ab / params.alpha
        resid.append(abs(avg_occupation(params, beta).n_mean - avg_occupation_high_t(params, beta).n_mean))
    order = math.log10(resid[1] / resid[0])
    return CheckResult("high_t_residual_order", order >= 1.9, order, 1.9, "log10 residual ratio", op=">=")


def check_backends() -> CheckResult:
    names = kernels.available_backends()
    if len(names) < 2:
        return CheckResult("kernel_backends_agree", True, 0.0, 1e-12, "single backend")
    sector = build_sector(8, 3)
    psi = sample_haar_vector(sector.dim, VALIDATE_SEED)
    a, b = (kernels.get_backend(n).sector_correlation(sector.basis, psi, 8, -1) for n in names)
    worst = float(np.max(np.abs(a - b)))
    return CheckResult("kernel_backends_agree", worst < 1e-12, worst, 1e-12, "+".join(names))


def check_trace_number() -> CheckResult:
    sector = build_sector(8, 3)
    psi = sample_haar_vector(sector.dim, VALIDATE_SEED + 1)
    d = abs(np.trace(random_state_correlation(sector, psi)) - 3)
    return CheckResult("sector_trace_number", d < 1e-12, d, 1e-12)


def run_checks(level: str = "fast") -> list[CheckResult]:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}")
    cfg = LEVELS[level]
    return [
        check_peschel_vs_exact(cfg["sizes"], cfg["pairs"]),
        check_correlation_vs_fock(cfg["sizes"], cfg["pairs"]),
        check_nnz_law(cfg["nnz_max_n"]),
        check_sector_hermiticity(min(cfg["nnz_max_n"], 8)),
        check_trace_number(),
        check_bessel_corridor(),
        check_high_t_order(),
        check_backends(),
    ]
