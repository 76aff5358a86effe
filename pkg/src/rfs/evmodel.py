"""Simplified extreme-value model for random cosine sums.

A sum on a band of |L| modes has about kbar = (k_min + k_max) / 2 local
extrema.  The model replaces their values by independent N(0, |L|/2) draws,
their match numbers by independent N(|L|/2, 8|L|/pi^3) draws, and fixes the
L2 norm at sqrt(|L|).

The collapsed law of y comes from a two-stage construction: a binomial match
number M, approximated by N(|L|/2, |L|/4), followed by
y | M ~ N(C1 (M - |L|/2), C2 |L|) with C1^2/4 + C2 = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rfs.rng import RngStream, trial_stream_index
from rfs.spectrum import SpectralBand, band as make_band

# single-term statistics of |c| sin(pi d), c ~ N(0,1), d ~ U(0,1)
TERM_MEAN = (2.0 / math.pi) ** 1.5
TERM_VAR = 0.5 - 8.0 / math.pi ** 3
# 2-D analogues for |c| sin(pi d) sin(pi d')
TERM_MEAN_2D = (2.0 / math.pi) ** 2.5
TERM_VAR_2D = 3.0 / 8.0 - 2.0 / math.pi ** 2 - 2.0 / math.pi ** 3


def model_constants() -> tuple[float, float]:
    return 2.0 * TERM_MEAN, TERM_VAR


def single_term_moments() -> tuple[float, float]:
    return TERM_MEAN, TERM_VAR


def single_term_mc(n: int, rng: RngStream, dims: int = 1) -> np.ndarray:
    """Draws of |c| sin(pi d) (dims=1) or |c| sin(pi d) sin(pi d') (dims=2)."""
    out = np.abs(rng.normals(n))
    for _ in range(dims):
        out = out * np.sin(np.pi * rng.uniforms(n))
    return out


def extrema_count(b: SpectralBand) -> int:
    """kbar rounded half-up; k_min + k_max odd gives a .5 midpoint."""
    return int(math.floor((b.k_min + b.k_max) / 2.0 + 0.5))


@dataclass(frozen=True, eq=False)
class ModelDraw:
    size: int
    y: np.ndarray
    match_surrogate: np.ndarray
    l2: float
    # sqrt(2) for the normalized 1-D basis, 1 for the bare 2-D cosine products
    peak_scale: float = math.sqrt(2.0)

    def norm_ratio(self) -> float:
        return model_norm_ratio(self)


def model_draw(b: SpectralBand, rng: RngStream) -> ModelDraw:
    n = extrema_count(b)
    z = rng.normals(2 * n)
    y = math.sqrt(b.size / 2.0) * z[:n]
    m = b.size / 2.0 + math.sqrt(8.0 * b.size / math.pi ** 3) * z[n:]
    return ModelDraw(b.size, y, m, math.sqrt(b.size))


def model_draw_two_stage(b: SpectralBand, rng: RngStream) -> np.ndarray:
    """Extremum values drawn via M, then y | M; same law as ``model_draw(...).y``."""
    n = extrema_count(b)
    c1, c2 = model_constants()
    z = rng.normals(2 * n)
    m = b.size / 2.0 + math.sqrt(b.size / 4.0) * z[:n]
    return c1 * (m - b.size / 2.0) + math.sqrt(c2 * b.size) * z[n:]


def model_norm_ratio(draw: ModelDraw) -> float:
    if draw.y.size == 0:
        raise ValueError("empty model draw")
    return draw.peak_scale * float(np.max(np.abs(draw.y))) / draw.l2


def model_ratios(b: SpectralBand, trials: int, seed: int, cell: int = 0) -> np.ndarray:
    return np.array([
        model_norm_ratio(model_draw(b, RngStream(seed, trial_stream_index(cell, i))))
        for i in range(trials)
    ])


def log_bound_exceedance(eps_list, C: float, trials: int, seed: int,
                         gamma: float = 0.8) -> list[float]:
    """Fraction of model draws with ratio >= C ln(1/eps), for each eps."""
    if trials < 100:
        raise ValueError("trials must be >= 100")
    if C < 0:
        raise ValueError("C must be nonnegative")
    out = []
    for cell, eps in enumerate(eps_list):
        r = model_ratios(make_band(eps, gamma), trials, seed, cell)
        out.append(float(np.mean(r >= C * math.log(1.0 / eps))))
    return out
