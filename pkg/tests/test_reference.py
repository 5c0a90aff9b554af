"""Exact finite-N moments against direct Monte Carlo with an independent Haar sampler."""
import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from ethf.reference import (
    eigenstate_diag_variance,
    eigenstate_energy_variance,
    eigenstate_offdiag_variance,
    random_vector_offdiag_variance,
    sector_energy_variance,
)


def test_haar_correlation_moments():
    N, Np, reps = 6, 2, 40_000
    mats = ortho_group.rvs(N, size=reps, random_state=1)
    occ = mats[:, :, :Np]
    c = occ @ np.transpose(occ, (0, 2, 1))
    off = c[:, 0, 1]
    diag = c[:, 0, 0]
    se = lambda x: np.std(x) / math.sqrt(x.size)  # noqa: E731
    assert abs(np.mean(off**2) - eigenstate_offdiag_variance(N, Np)) < 4 * se(off**2)
    assert abs(np.var(diag) - eigenstate_diag_variance(N, Np)) < 4 * se((diag - diag.mean()) ** 2)


def test_limits():
    assert eigenstate_offdiag_variance(8, 0) == 0.0
    assert eigenstate_offdiag_variance(8, 8) == 0.0
    assert random_vector_offdiag_variance(8, 0) == 0.0
    assert random_vector_offdiag_variance(8, 3) == pytest.approx(15 / (56 * 58))
    assert eigenstate_energy_variance(64, 16, 1.0) == pytest.approx(800.0, rel=0.01)
    assert sector_energy_variance(56, 0.5) == pytest.approx(57 * 0.25)


def test_energy_variance_by_simulation():
    from ethf.goe import child_seed
    from ethf.model import ModelParams, build_model, eigenstate_energy, sample_occupation

    N, Np, reps = 12, 4, 6000
    p = ModelParams.with_default_alpha(N)
    e = np.array([eigenstate_energy(build_model(p, child_seed(2, k, 0)), sample_occupation(N, Np, child_seed(2, k, 1)))
                  for k in range(reps)])
    dev = (e - e.mean()) ** 2
    assert abs(e.var(ddof=1) - eigenstate_energy_variance(N, Np, 1.0)) < 4 * dev.std() / math.sqrt(reps)
