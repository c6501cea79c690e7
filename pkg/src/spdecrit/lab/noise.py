"""Gaussian field sampling and the mild solution of the first tree level.

White noise is drawn directly in frequency space: independent unit-
variance Gaussians per mode, Hermitian-symmetrized so samples are real.
The linear solve evolves every mode as an exact Ornstein-Uhlenbeck
update, so the only discretization is the time grid itself.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from .fields import PeriodicField, Trajectory, _check_shape, _conjugate_reverse


def _hermitian_gaussian(rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
    """Complex Gaussian array with conjugate symmetry and E|c_m|^2 = 1.

    Self-conjugate modes come out real with unit variance; paired modes
    split their variance between real and imaginary parts.
    """
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return 0.5 * (z + _conjugate_reverse(z))


def sample_spatial_white(dim: int, grid_shape: Tuple[int, ...], seed: int) -> PeriodicField:
    """Spatially white Gaussian field: flat unit spectrum, zero-mode included."""
    _check_shape(dim, tuple(grid_shape))
    rng = np.random.default_rng(seed)
    coeffs = _hermitian_gaussian(rng, tuple(grid_shape))
    return PeriodicField.from_spectral(coeffs)


def solve_z1_mild(
    dim: int,
    grid_shape: Tuple[int, ...],
    dt: float,
    steps: int,
    seed: int,
    diffusion_order: float = 2.0,
    noise_scale: float = 1.0,
) -> Trajectory:
    """Evolve the noise-forced linear equation from zero data.

    Mode m decays at rate |m|^order and receives a Gaussian increment of
    exact variance (1 - exp(-2 |m|^order dt)) / (2 |m|^order), which is
    the integrated forcing over one step; the zero mode performs a
    random walk of variance dt per step.
    """
    _check_shape(dim, tuple(grid_shape))
    if dt <= 0 or steps < 1:
        raise ValueError("need dt > 0 and steps >= 1")
    rng = np.random.default_rng(seed)
    shape = tuple(grid_shape)
    probe = PeriodicField(np.zeros(shape))
    lam = probe.mode_magnitudes() ** diffusion_order
    decay = np.exp(-lam * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        var = np.where(lam > 0, (1.0 - np.exp(-2.0 * lam * dt)) / (2.0 * lam), dt)
    std = noise_scale * np.sqrt(var)

    coeffs = np.zeros(shape, dtype=np.complex128)
    fields = [PeriodicField.from_spectral(coeffs.copy())]
    times = [0.0]
    for k in range(steps):
        eta = std * _hermitian_gaussian(rng, shape)
        coeffs = decay * coeffs + eta
        fields.append(PeriodicField.from_spectral(coeffs.copy()))
        times.append((k + 1) * dt)
    return Trajectory(dt=dt, times=np.array(times), fields=fields)
