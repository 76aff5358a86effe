"""Random Fourier cosine sums on the Cahn-Hilliard spinodal band.

Sampling, sup-norm evaluation, sign forcing, match numbers and the
simplified extreme-value model, plus a seeded Monte Carlo harness.
"""

from rfs.spectrum import SpectralBand, band, dispersion, mean_wavenumber
from rfs.rng import RngStream
from rfs.sampler import CosineSum, SignPattern, sample_sum, forced_sign_sum, targeted_sum, sign_predictor
from rfs.evaluator import evaluate, l2_norm, sup_norm, derivative_values, find_extrema, count_zeros

__version__ = "0.1.0"

__all__ = [
    "SpectralBand", "band", "dispersion", "mean_wavenumber", "RngStream",
    "CosineSum", "SignPattern", "sample_sum", "forced_sign_sum", "targeted_sum",
    "sign_predictor", "evaluate", "l2_norm", "sup_norm", "derivative_values",
    "find_extrema", "count_zeros",
]
