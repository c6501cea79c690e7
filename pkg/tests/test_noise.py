"""White-noise sampling statistics and the per-mode linear solve."""

import numpy as np
import pytest

from spdecrit.lab import sample_spatial_white, solve_z1_mild
from spdecrit.lab.fields import PeriodicField
from spdecrit.lab.noise import _hermitian_gaussian


def test_equal_seeds_equal_fields():
    a = sample_spatial_white(1, (128,), 42)
    b = sample_spatial_white(1, (128,), 42)
    assert np.array_equal(a.values, b.values)
    c = sample_spatial_white(1, (128,), 43)
    assert not np.array_equal(a.values, c.values)


def test_per_mode_variance_flat():
    draws = 4000
    rng = np.random.default_rng(9)
    acc = np.zeros(64)
    for _ in range(draws):
        acc += np.abs(_hermitian_gaussian(rng, (64,))) ** 2
    var = acc / draws
    # unit variance at every mode, including the zero mode
    assert np.all(np.abs(var - 1.0) < 0.1)
    assert abs(np.mean(var) - 1.0) < 0.02


def test_distinct_modes_uncorrelated():
    draws = 4000
    rng = np.random.default_rng(10)
    samples = np.stack([_hermitian_gaussian(rng, (64,)) for _ in range(draws)])
    cov = np.mean(samples[:, 3] * np.conj(samples[:, 11]))
    assert abs(cov) < 0.05


def test_zero_noise_gives_zero_trajectory():
    traj = solve_z1_mild(1, (64,), 0.01, 50, seed=1, noise_scale=0.0)
    assert all(np.max(np.abs(f.values)) == 0.0 for f in traj.fields)


def test_trajectory_shape_and_times():
    traj = solve_z1_mild(1, (64,), 0.01, 50, seed=1)
    assert traj.steps == 50
    assert len(traj.fields) == 51
    assert np.allclose(np.diff(traj.times), 0.01)
    assert np.max(np.abs(traj.fields[0].values)) == 0.0  # zero initial data


def test_stationary_mode_variance_matches_closed_form():
    dt, steps, burn = 0.05, 2000, 400
    est = {2: [], 4: []}
    for seed in range(6):
        traj = solve_z1_mild(1, (32,), dt, steps, seed=100 + seed, diffusion_order=2.0)
        spec = np.stack([f.spectral for f in traj.fields[burn:]])
        for m in est:
            est[m].append(np.mean(np.abs(spec[:, m]) ** 2))
    for m, values in est.items():
        target = 1.0 / (2.0 * m**2)
        assert abs(float(np.mean(values)) / target - 1.0) < 0.1


def test_z1_field_smoothness_one_dim():
    from spdecrit.lab import estimate_holder_exponent

    fits = []
    for seed in range(6):
        traj = solve_z1_mild(1, (2048,), 2.5e-3, 400, seed=500 + seed)
        fits.append(estimate_holder_exponent(traj.final()))
    assert 0.35 <= float(np.mean(fits)) <= 0.60


def test_two_dims_supported():
    traj = solve_z1_mild(2, (32, 32), 0.01, 20, seed=3)
    assert traj.final().dim == 2
    assert np.isfinite(traj.final().values).all()


def test_rejects_bad_grids():
    with pytest.raises(ValueError):
        sample_spatial_white(1, (100,), 0)
    with pytest.raises(ValueError):
        solve_z1_mild(3, (16, 16, 16), 0.01, 5, 0)
