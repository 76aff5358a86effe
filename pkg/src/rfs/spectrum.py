"""Dominating wave-number band of the linearized Cahn-Hilliard operator on [0, 1].

With h'(m) = 1 the Neumann eigenmodes sqrt(2) cos(k pi x) grow at rate

    lambda_k = k^2 pi^2 - eps^2 k^4 pi^4,

maximal value 1 / (4 eps^2).  The band keeps every k with lambda_k > gamma * lambda_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def band_endpoints(gamma: float) -> tuple[float, float]:
    """Return (alpha_minus, alpha_plus); the band is [alpha_minus/eps, alpha_plus/eps]."""
    root = math.sqrt(1.0 - gamma)
    two_pi2 = 2.0 * math.pi ** 2
    return math.sqrt((1.0 - root) / two_pi2), math.sqrt((1.0 + root) / two_pi2)


@dataclass(frozen=True)
class SpectralBand:
    epsilon: float
    gamma: float
    alpha_minus: float
    alpha_plus: float
    k_min: int
    k_max: int

    @property
    def size(self) -> int:
        return self.k_max - self.k_min + 1

    @property
    def wavenumbers(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def __contains__(self, k: int) -> bool:
        return self.k_min <= k <= self.k_max


def _check_params(epsilon: float, gamma: float) -> None:
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")


def band(epsilon: float, gamma: float = 0.8) -> SpectralBand:
    _check_params(epsilon, gamma)
    a_minus, a_plus = band_endpoints(gamma)
    # plain IEEE quotient, no nudging at integer boundaries
    k_min = math.ceil(a_minus / epsilon)
    k_max = math.floor(a_plus / epsilon)
    if k_min > k_max:
        raise ValueError(f"empty band for epsilon={epsilon!r}, gamma={gamma!r}")
    return SpectralBand(epsilon, gamma, a_minus, a_plus, k_min, k_max)


def dispersion(k: int, epsilon: float) -> float:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k!r}")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    s = (k * math.pi) ** 2
    return s - epsilon ** 2 * s * s


def max_growth_rate(epsilon: float) -> float:
    return 1.0 / (4.0 * epsilon ** 2)


def mean_wavenumber(b: SpectralBand) -> float:
    return (b.k_min + b.k_max) / 2.0
