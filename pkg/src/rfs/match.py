"""Match numbers: agreement between coefficient signs and cosine signs at a point."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rfs.evaluator import ExtremaReport, sup_norm_batch, DEFAULT_OVERSAMPLE
from rfs.sampler import CosineSum, cos_vanishes, normal_batch
from rfs.spectrum import SpectralBand


@dataclass(frozen=True)
class MatchProfile:
    point: float
    match_count: int
    size: int

    @property
    def match_ratio(self) -> float:
        return self.match_count / self.size


def match_counts(coeffs: np.ndarray, ks: np.ndarray, x) -> np.ndarray:
    """Number of modes with c_k cos(k pi x) > 0, for each point in ``x``.

    Modes whose cosine vanishes at x (rational resonance test) or whose
    coefficient is zero never count as matches.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ks = np.asarray(ks)
    cosv = np.cos(np.pi * np.outer(x, ks))
    prod = np.sign(cosv) * np.sign(coeffs)[None, :]
    prod[cos_vanishes(ks[None, :], x[:, None])] = 0
    return np.count_nonzero(prod > 0, axis=1)


def zero_cos_modes(ks, x: float) -> int:
    return int(np.count_nonzero(cos_vanishes(np.asarray(ks), x)))


def match_number(s: CosineSum, x: float) -> MatchProfile:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    n = int(match_counts(s.coefficients, s.wavenumbers, x)[0])
    return MatchProfile(float(x), n, s.band.size)


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(np.dot(da, da)) * float(np.dot(db, db)))
    if denom == 0.0:
        return float("nan")
    return float(np.dot(da, db) / denom)


def extrema_match_correlation(s: CosineSum, report: ExtremaReport,
                              folded: bool = True) -> float:
    """Pearson correlation of |extremum value| with |match ratio - 1/2|.

    ``folded=False`` correlates the signed value with the raw match ratio.
    """
    if report.count < 3:
        raise ValueError("need at least 3 extrema")
    ratios = match_counts(s.coefficients, s.wavenumbers, report.locations) / s.band.size
    if folded:
        return pearson(np.abs(report.values), np.abs(ratios - 0.5))
    return pearson(report.values, ratios)


def histogram(values, bins: int, lo: float = 0.0, hi: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Counts on ``bins`` equal bins of [lo, hi]; the right edge is closed."""
    if bins < 2:
        raise ValueError("bins must be >= 2")
    edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
    return edges, counts


def global_extremum_match_ratios(band: SpectralBand, trials: int, seed: int, cell: int = 0,
                                 oversample: int = DEFAULT_OVERSAMPLE, chunk: int = 256) -> np.ndarray:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ks = np.arange(band.k_min, band.k_max + 1)
    out = np.empty(trials)
    for s in range(0, trials, chunk):
        stop = min(trials, s + chunk)
        coeffs = normal_batch(band, seed, cell, s, stop)
        _, argmax = sup_norm_batch(coeffs, band, oversample)
        for row, (c, x) in enumerate(zip(coeffs, argmax)):
            out[s + row] = match_counts(c, ks, x)[0] / band.size
    return out


def global_extremum_match_histogram(trials: int, band: SpectralBand, bins: int, seed: int,
                                    oversample: int = DEFAULT_OVERSAMPLE):
    if bins < 2:
        raise ValueError("bins must be >= 2")
    ratios = global_extremum_match_ratios(band, trials, seed, oversample=oversample)
    return histogram(ratios, bins)


def histogram_modes(edges: np.ndarray, counts: np.ndarray) -> tuple[float, float]:
    """Centres of the tallest bin left of 1/2 and right of 1/2."""
    centres = 0.5 * (edges[:-1] + edges[1:])
    left = centres < 0.5
    right = centres > 0.5
    lc = centres[left][np.argmax(counts[left])]
    rc = centres[right][np.argmax(counts[right])]
    return float(lc), float(rc)
