"""Closed-form heuristics and distributional formulas for norm ratios."""

from __future__ import annotations

import math

import numpy as np

from rfs.evaluator import DEFAULT_OVERSAMPLE, sup_norm_batch
from rfs.sampler import normal_batch
from rfs.spectrum import SpectralBand

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def lanczos_lgamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError("lanczos_lgamma needs x > 0")
    if x < 0.5:
        # reflection keeps the series in its accurate range
        return math.log(math.pi / math.sin(math.pi * x)) - lanczos_lgamma(1.0 - x)
    x -= 1.0
    a = LANCZOS_COEFFS[0]
    t = x + LANCZOS_G + 0.5
    for i in range(1, len(LANCZOS_COEFFS)):
        a += LANCZOS_COEFFS[i] / (x + i)
    return _HALF_LOG_2PI + (x + 0.5) * math.log(t) - t + math.log(a)


def worst_case_ratio(b: SpectralBand) -> float:
    return math.sqrt(2.0 * b.size)


def expected_boundary_ratio(b: SpectralBand) -> float:
    return 2.0 * math.sqrt(b.size / math.pi)


def expected_boundary_ratio_forced(b: SpectralBand, m: int) -> float:
    """Heuristic ratio when the sup sits at x = 0 with m positive signs; zero at m = |L|/2."""
    if not 0 <= m <= b.size:
        raise ValueError(f"m must lie in [0, {b.size}], got {m}")
    return 2.0 * math.sqrt(b.size / math.pi) - 4.0 * m / math.sqrt(math.pi * b.size)


def half_normal_sum_mean(b: SpectralBand) -> float:
    """E of sqrt(2) sum |c_k|, the sup norm when all signs agree."""
    return 2.0 * b.size / math.sqrt(math.pi)


def chi_mean(n: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(2.0) * math.exp(lanczos_lgamma((n + 1) / 2.0) - lanczos_lgamma(n / 2.0))


def chi_variance(n: int) -> float:
    return n - chi_mean(n) ** 2


def log_binomial(n: int, k: int) -> float:
    return lanczos_lgamma(n + 1.0) - lanczos_lgamma(k + 1.0) - lanczos_lgamma(n - k + 1.0)


def binomial_plateau_probability(n: int, ell: int, r: int) -> float:
    """P(ell <= M <= r) for M ~ Bin(n, 1/2), summed from log-space pmf terms."""
    if not 0 <= ell <= r <= n:
        raise ValueError(f"need 0 <= ell <= r <= n, got ({n}, {ell}, {r})")
    if ell == 0 and r == n:
        return 1.0
    log_half_n = n * math.log(0.5)
    terms = [math.exp(log_binomial(n, k) + log_half_n) for k in range(ell, r + 1)]
    return min(1.0, math.fsum(terms))


def plateau_endpoint_search(n: int, target: float, digits: int = 4) -> list[tuple[int, int]]:
    """All (ell, r) whose plateau probability rounds to ``target`` at ``digits`` decimals.

    Uses exact integer arithmetic; intended for small n (it is O(n^2)).
    """
    counts = [math.comb(n, k) for k in range(n + 1)]
    prefix = [0]
    for c in counts:
        prefix.append(prefix[-1] + c)
    total = 1 << n
    half_ulp = 0.5 * 10 ** (-digits)
    hits = []
    for ell in range(n + 1):
        for r in range(ell, n + 1):
            p = (prefix[r + 1] - prefix[ell]) / total
            if abs(p - target) <= half_ulp:
                hits.append((ell, r))
    return hits


def closed_form_table(b: SpectralBand) -> dict[str, float]:
    return {
        "epsilon": b.epsilon,
        "gamma": b.gamma,
        "k_min": b.k_min,
        "k_max": b.k_max,
        "size": b.size,
        "worst_case_ratio": worst_case_ratio(b),
        "expected_boundary_ratio": expected_boundary_ratio(b),
        "half_normal_sum_mean": half_normal_sum_mean(b),
        "chi_mean": chi_mean(b.size),
        "chi_variance": chi_variance(b.size),
    }


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def _sup_and_l2(b: SpectralBand, trials: int, seed: int, cell: int, oversample: int, chunk: int = 256):
    sup = np.empty(trials)
    l2 = np.empty(trials)
    for s in range(0, trials, chunk):
        e = min(trials, s + chunk)
        c = normal_batch(b, seed, cell, s, e)
        sup[s:e] = sup_norm_batch(c, b, oversample)[0]
        l2[s:e] = np.sqrt(np.einsum("ij,ij->i", c, c))
    return sup, l2


def theorem_main_event_frequency(b: SpectralBand, delta: float, trials: int, seed: int,
                                 cell: int = 0, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """Fraction of normal draws with sup|f| <= eps^-delta * ||f||_L2."""
    if trials < 100:
        raise ValueError("event frequency needs trials >= 100")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    sup, l2 = _sup_and_l2(b, trials, seed, cell, oversample)
    return float(np.mean(sup <= b.epsilon ** -delta * l2))


def power_mean(values, p: float) -> float:
    v = np.asarray(values, dtype=float)
    return float(np.mean(v ** p) ** (1.0 / p))


def moment_ratio_estimate(b: SpectralBand, p: float, trials: int, seed: int,
                          cell: int = 0, oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """(E sup|f|^p)^(1/p) estimated from ``trials`` normal draws."""
    if not 1.0 < p <= 8.0:
        raise ValueError("moment order p must lie in (1, 8]")
    if trials < 1000:
        raise ValueError("moment estimate needs trials >= 1000")
    sup, _ = _sup_and_l2(b, trials, seed, cell, oversample)
    return power_mean(sup, p)
