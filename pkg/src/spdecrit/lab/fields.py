"""Real fields on a uniform torus grid and their dyadic frequency anatomy.

Fields live on [0, 2pi)^dim with integer wavenumbers.  The spectral
convention divides the forward transform by the point count, so the mean
square of the samples equals the sum of squared coefficient moduli.
Frequency blocks are sharp annuli: block -1 keeps |m| <= 1 and block
j >= 1 keeps 2^(j-1) < |m| <= 2^j, which partitions the modes exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np


class ResolutionError(ValueError):
    """The grid cannot resolve enough dyadic blocks."""


def _check_shape(dim: int, grid_shape: Tuple[int, ...]):
    if dim not in (1, 2):
        raise ValueError(f"only dim 1 and 2 are supported, got {dim}")
    if len(grid_shape) != dim:
        raise ValueError(f"grid shape {grid_shape} does not match dim {dim}")
    for n in grid_shape:
        if n < 4 or (n & (n - 1)) != 0:
            raise ValueError(f"grid points per axis must be a power of two >= 4, got {n}")


class PeriodicField:
    """Samples of a real field on a uniform periodic grid.

    The spectral view is computed on demand and cached; constructing
    from coefficients enforces Hermitian symmetry so values stay real.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=np.float64)
        _check_shape(values.ndim, values.shape)
        self.values = values
        self.dim = values.ndim
        self.grid_shape = values.shape
        self._spectral: Optional[np.ndarray] = None

    @classmethod
    def from_spectral(cls, coeffs: np.ndarray) -> "PeriodicField":
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        _check_shape(coeffs.ndim, coeffs.shape)
        values = np.fft.ifftn(coeffs) * coeffs.size
        f = cls(values.real)
        f._spectral = coeffs
        return f

    @property
    def spectral(self) -> np.ndarray:
        if self._spectral is None:
            self._spectral = np.fft.fftn(self.values) / self.values.size
        return self._spectral

    @property
    def npoints(self) -> int:
        return self.values.size

    def mode_magnitudes(self) -> np.ndarray:
        """Euclidean wavenumber magnitude per spectral entry."""
        axes = [np.fft.fftfreq(n, d=1.0 / n) for n in self.grid_shape]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.sqrt(sum(g * g for g in grids))

    def volume_element(self) -> float:
        return (2.0 * math.pi) ** self.dim / self.npoints

    def lq_norm(self, q: float) -> float:
        dv = self.volume_element()
        if q == math.inf:
            return float(np.max(np.abs(self.values)))
        return float((np.sum(np.abs(self.values) ** q) * dv) ** (1.0 / q))

    def mean_square(self) -> float:
        return float(np.mean(self.values**2))

    def copy(self) -> "PeriodicField":
        return PeriodicField(self.values.copy())


@dataclass
class Trajectory:
    """Uniformly spaced time samples of one evolving field."""

    dt: float
    times: np.ndarray
    fields: List[PeriodicField]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if len(self.times) != len(self.fields):
            raise ValueError("times and fields disagree in length")
        if len(self.times) > 1:
            gaps = np.diff(self.times)
            if not np.allclose(gaps, self.dt, rtol=1e-9, atol=1e-12):
                raise ValueError("trajectory times are not uniformly spaced")

    @property
    def steps(self) -> int:
        return len(self.fields) - 1

    def final(self) -> PeriodicField:
        return self.fields[-1]

    def values_array(self) -> np.ndarray:
        return np.stack([f.values for f in self.fields])


# ---------------------------------------------------------------------------
# dyadic frequency blocks


def _block_index(mags: np.ndarray) -> np.ndarray:
    """Block number per mode: -1 for |m| <= 1, else ceil(log2 |m|)."""
    idx = np.full(mags.shape, -1, dtype=np.int64)
    big = mags > 1.0
    idx[big] = np.ceil(np.log2(mags[big]) - 1e-12).astype(np.int64)
    return idx


def max_block(grid_shape: Tuple[int, ...]) -> int:
    """Largest fully resolved block: its annulus must fit under Nyquist."""
    nyquist = min(grid_shape) // 2
    return int(math.floor(math.log2(nyquist)))


def lp_fields(f: PeriodicField) -> List[Tuple[int, PeriodicField]]:
    """Sharp annulus projections (j, block field); blocks sum to f.

    Blocks beyond max_block exist only to absorb corner modes of square
    grids; exponent fits must stay below max_block.
    """
    if max_block(f.grid_shape) < 1:
        raise ResolutionError(f"grid {f.grid_shape} resolves no dyadic blocks")
    idx = _block_index(f.mode_magnitudes())
    jtop = int(idx.max())
    out = []
    coeffs = f.spectral
    for j in range(-1, jtop + 1):
        if j == 0:
            continue  # the annulus (1/2, 1] holds no integer modes
        mask = idx == j
        block = np.where(mask, coeffs, 0.0)
        out.append((j, PeriodicField.from_spectral(block)))
    return out


def littlewood_paley_blocks(f: PeriodicField) -> List[Tuple[int, float]]:
    """(block index, sup norm of the block) for every resolved block."""
    return [(j, g.lq_norm(math.inf)) for j, g in lp_fields(f)]


def estimate_holder_exponent(f: PeriodicField, j_lo: int = 2, j_margin: int = 2) -> float:
    """Least-squares slope of compensated -log2 block sup norms over
    j in [j_lo, J - j_margin].

    The sup of a block of ~2^j random-phase modes runs a factor
    sqrt(j ln 2) above its mean-square size; fitting the raw norms
    would shave roughly 0.15 off the exponent over this window, so
    that factor is divided out before the fit.
    """
    resolved = max_block(f.grid_shape)
    blocks = [(j, s) for j, s in littlewood_paley_blocks(f) if 1 <= j <= resolved]
    if len(blocks) < 4:
        raise ResolutionError("need at least 4 dyadic blocks to fit an exponent")
    jmax = blocks[-1][0]
    window = [(j, s) for j, s in blocks if j_lo <= j <= jmax - j_margin and s > 0]
    if len(window) < 2:
        raise ResolutionError("exponent-fit window is empty at this resolution")
    js = np.array([j for j, _ in window], dtype=np.float64)
    ys = np.array([-math.log2(s) + 0.5 * math.log2(j * math.log(2)) for j, s in window])
    slope = np.polyfit(js, ys, 1)[0]
    return float(slope)


def holder_quotient_exponent(f: PeriodicField, max_octaves: int = 6) -> float:
    """Direct oracle: slope of log sup |f(x+h) - f(x)| against log h.

    Works on 1D fields only; lags run over dyadic multiples of the grid
    spacing.  Independent of any frequency-space machinery.
    """
    if f.dim != 1:
        raise ValueError("quotient sampling is implemented for dim 1")
    n = f.grid_shape[0]
    vals = f.values
    ks, ds = [], []
    for k in range(max_octaves):
        shift = 2**k
        if shift >= n // 4:
            break
        diff = np.max(np.abs(np.roll(vals, -shift) - vals))
        if diff > 0:
            ks.append(math.log2(shift * 2.0 * math.pi / n))
            ds.append(math.log2(diff))
    if len(ks) < 2:
        raise ResolutionError("not enough usable lags for a quotient fit")
    slope = np.polyfit(np.array(ks), np.array(ds), 1)[0]
    return float(slope)


def synthetic_field(dim: int, grid_shape: Tuple[int, ...], exponent: float, seed: int) -> PeriodicField:
    """Random-phase field whose dyadic block norms scale like 2^(-j*exponent).

    Coefficient magnitudes |m|^-(exponent + dim/2) give that scaling for
    random phases; the zero mode is dropped.
    """
    _check_shape(dim, tuple(grid_shape))
    rng = np.random.default_rng(seed)
    shape = tuple(grid_shape)
    probe = PeriodicField(np.zeros(shape))
    mags = probe.mode_magnitudes()
    sigma = exponent + dim / 2.0
    with np.errstate(divide="ignore"):
        amp = np.where(mags > 0, mags, 1.0) ** (-sigma)
    amp[mags == 0] = 0.0
    phases = rng.uniform(0.0, 2.0 * math.pi, size=shape)
    raw = amp * np.exp(1j * phases)
    coeffs = _hermitize(raw)
    return PeriodicField.from_spectral(coeffs)


def _conjugate_reverse(a: np.ndarray) -> np.ndarray:
    """a[-m] (indices mod N per axis), conjugated."""
    rev = a
    for axis, n in enumerate(a.shape):
        idx = (-np.arange(n)) % n
        rev = np.take(rev, idx, axis=axis)
    return np.conj(rev)


def _hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + _conjugate_reverse(a))


def bony_decompose(f: PeriodicField, g: PeriodicField):
    """Split fg into low-high, high-low and resonant frequency parts.

    Low-high pairs blocks i <= j - 2 of f with block j of g, high-low is
    the mirror, and the resonant part keeps |i - j| <= 1.  The three
    parts add up to the pointwise product exactly (every index pair
    lands in exactly one bucket).
    """
    if f.grid_shape != g.grid_shape:
        raise ValueError("fields must share a grid")
    fb = lp_fields(f)
    gb = lp_fields(g)
    low_high = np.zeros_like(f.values)
    high_low = np.zeros_like(f.values)
    resonant = np.zeros_like(f.values)
    for i, fi in fb:
        for j, gj in gb:
            prod = fi.values * gj.values
            if i <= j - 2:
                low_high += prod
            elif j <= i - 2:
                high_low += prod
            else:
                resonant += prod
    return PeriodicField(low_high), PeriodicField(high_low), PeriodicField(resonant)
