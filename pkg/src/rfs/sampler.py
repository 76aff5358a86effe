"""Random, sign-forced and point-targeted cosine sums.

A sum stores one coefficient c_k per wave number of its band and represents

    f(x) = sum_k c_k sqrt(2) cos(k pi x).

Randomness is consumed in a fixed order: |band| normals (ascending k), then
the urn draws for sign placement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rfs.rng import RngStream, trial_stream_index
from rfs.spectrum import SpectralBand

# tolerance of the rational cos(k pi x) == 0 test
RESONANCE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class CosineSum:
    band: SpectralBand
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1 or c.shape[0] != self.band.size:
            raise ValueError(
                f"expected {self.band.size} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def wavenumbers(self) -> np.ndarray:
        return np.arange(self.band.k_min, self.band.k_max + 1)

    def __neg__(self) -> "CosineSum":
        return CosineSum(self.band, -self.coefficients)


@dataclass(frozen=True, eq=False)
class SignPattern:
    signs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.signs, dtype=np.int8)
        if not np.all(np.abs(s) == 1):
            raise ValueError("signs must be +1 or -1")
        s.setflags(write=False)
        object.__setattr__(self, "signs", s)

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.signs > 0))


def constant_sum(b: SpectralBand, value: float = 1.0) -> CosineSum:
    """Sum with every coefficient equal to ``value`` (the worst case for value > 0)."""
    return CosineSum(b, np.full(b.size, float(value)))


def sample_sum(b: SpectralBand, rng: RngStream) -> CosineSum:
    return CosineSum(b, rng.normals(b.size))


def urn_signs(n: int, m: int, rng: RngStream) -> np.ndarray:
    """Signs with exactly ``m`` entries +1 at a uniformly random m-subset.

    Partial Fisher-Yates over the index list: step i swaps position i with a
    uniform position in [i, n), consuming exactly m uniforms.
    """
    if not 0 <= m <= n:
        raise ValueError(f"m must lie in [0, {n}], got {m}")
    idx = np.arange(n)
    u = rng.uniforms(m)
    for i in range(m):
        j = i + min(int(u[i] * (n - i)), n - i - 1)
        idx[i], idx[j] = idx[j], idx[i]
    signs = np.full(n, -1, dtype=np.int8)
    signs[idx[:m]] = 1
    return signs


def forced_sign_sum(b: SpectralBand, m: int, rng: RngStream) -> tuple[CosineSum, SignPattern]:
    if not 0 <= m <= b.size:
        raise ValueError(f"m must lie in [0, {b.size}], got {m}")
    mags = np.abs(rng.normals(b.size))
    signs = urn_signs(b.size, m, rng)
    return CosineSum(b, signs * mags), SignPattern(signs)


def cos_vanishes(k, x, tol: float = RESONANCE_TOL):
    """True where cos(k pi x) == 0, i.e. (2 k x - 1) is an even integer."""
    t = 2.0 * np.asarray(k) * np.asarray(x) - 1.0
    r = np.mod(t, 2.0)
    return (r <= tol) | (r >= 2.0 - tol)


def sign_predictor(k: int, x_hat: float) -> tuple[int, int]:
    """Return (ell_k, gamma_k) for the point ``x_hat``.

    ell_k is the largest integer l with (2l + 1) / (2k) <= x_hat, and
    gamma_k = (-1) ** (1 + ell_k), which is +1 exactly when cos(k pi x_hat)
    is positive.  At a zero of the cosine gamma_k is +1 by convention.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0.0 <= x_hat <= 1.0:
        raise ValueError(f"x_hat must lie in [0, 1], got {x_hat}")
    ell = math.floor((2.0 * k * x_hat - 1.0) / 2.0)
    if cos_vanishes(k, x_hat):
        return ell, 1
    return ell, (1 if ell % 2 else -1)


def sign_predictors(b: SpectralBand, x_hat: float) -> np.ndarray:
    return np.array([sign_predictor(k, x_hat)[1] for k in b.wavenumbers], dtype=np.int8)


def targeted_sum(b: SpectralBand, x_hat: float, m: int,
                 rng: RngStream) -> tuple[CosineSum, SignPattern]:
    """Sign-forced sum whose coefficients are synced to the cosine signs at ``x_hat``.

    With m = |band| every term c_k sqrt(2) cos(k pi x_hat) is nonnegative.
    """
    gammas = sign_predictors(b, x_hat)
    forced, pattern = forced_sign_sum(b, m, rng)
    return CosineSum(b, forced.coefficients * gammas), pattern


def normal_batch(b: SpectralBand, master_seed: int, cell: int, start: int, stop: int) -> np.ndarray:
    """Coefficient rows of trials start..stop-1 of ``cell``, one stream per trial."""
    return np.stack([RngStream(master_seed, trial_stream_index(cell, i)).normals(b.size)
                     for i in range(start, stop)])


def forced_batch(b: SpectralBand, m: int, master_seed: int, cell: int,
                 start: int, stop: int) -> np.ndarray:
    return np.stack([
        forced_sign_sum(b, m, RngStream(master_seed, trial_stream_index(cell, i)))[0].coefficients
        for i in range(start, stop)
    ])
