"""Random cosine sums on the unit square.

Modes are lattice pairs (k, l), k, l >= 1, in the quarter annulus
k_min <= sqrt(k^2 + l^2) <= k_max, and the sum is the bare product

    f(x, y) = sum c_kl cos(k pi x) cos(l pi y)

without per-axis sqrt(2) factors, so every mode has L2 norm 1/2.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from rfs import evmodel
from rfs.evaluator import golden_max
from rfs.montecarlo import ExperimentResult, Histogram, shared_edges
from rfs.rng import RngStream, trial_stream_index
from rfs.spectrum import SpectralBand, band as make_band

MIN_EPSILON = 1e-2


@dataclass(frozen=True, eq=False)
class Band2D:
    epsilon: float
    gamma: float
    radial: SpectralBand
    modes: np.ndarray  # (size, 2) int pairs, sorted by k then l

    @property
    def size(self) -> int:
        return int(self.modes.shape[0])

    @property
    def r_max(self) -> int:
        return int(self.modes.max())

    def asymptotic_size(self) -> float:
        b = self.radial
        return math.pi * (b.alpha_plus ** 2 - b.alpha_minus ** 2) / (4.0 * self.epsilon ** 2)


def band_2d(epsilon: float, gamma: float = 0.8) -> Band2D:
    radial = make_band(epsilon, gamma)
    lo2, hi2 = radial.k_min ** 2, radial.k_max ** 2
    modes = [(k, l) for k in range(1, radial.k_max + 1) for l in range(1, radial.k_max + 1)
             if lo2 <= k * k + l * l <= hi2]
    if not modes:
        raise ValueError(f"empty 2-D band for epsilon={epsilon!r}, gamma={gamma!r}")
    return Band2D(epsilon, gamma, radial, np.array(modes, dtype=int))


@dataclass(frozen=True, eq=False)
class CosineSum2D:
    band2d: Band2D
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (self.band2d.size,):
            raise ValueError(f"expected {self.band2d.size} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coefficients", c)

    def coefficient_matrix(self) -> np.ndarray:
        """Dense (r_max, r_max) array with entry [k-1, l-1] = c_kl."""
        r = self.band2d.r_max
        mat = np.zeros((r, r))
        k, l = self.band2d.modes.T
        mat[k - 1, l - 1] = self.coefficients
        return mat


def sample_sum_2d(b: Band2D, rng: RngStream) -> CosineSum2D:
    return CosineSum2D(b, rng.normals(b.size))


def l2_norm_2d(s: CosineSum2D) -> float:
    c = s.coefficients
    return 0.5 * math.sqrt(math.fsum(c * c))


def evaluate_2d(s: CosineSum2D, x, y) -> np.ndarray:
    """Pointwise values at paired coordinates (x and y broadcast together)."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    k, l = s.band2d.modes.T
    terms = np.cos(math.pi * x[..., None] * k) * np.cos(math.pi * y[..., None] * l)
    return terms @ s.coefficients


def grid_2d(s: CosineSum2D, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Tensor-grid values F[i, j] = f(xs[i], ys[j]) from per-axis cosine tables."""
    ks = np.arange(1, s.band2d.r_max + 1)
    cx = np.cos(math.pi * np.outer(xs, ks))
    cy = np.cos(math.pi * np.outer(ys, ks))
    return cx @ s.coefficient_matrix() @ cy.T


def grid_2d_naive(s: CosineSum2D, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    out = np.zeros((xs.size, ys.size))
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            out[i, j] = sum(c * math.cos(k * math.pi * x) * math.cos(l * math.pi * y)
                            for c, (k, l) in zip(s.coefficients, s.band2d.modes))
    return out


def axis_grid(b: Band2D, oversample: int) -> np.ndarray:
    n = oversample * b.r_max
    return np.arange(n + 1) / n


def sup_norm_2d(s: CosineSum2D, oversample: int = 16, rounds: int = 3) -> tuple[float, tuple[float, float]]:
    """Max |f| on the tensor grid, then alternating golden-section line searches."""
    if oversample < 8:
        raise ValueError(f"oversample must be >= 8, got {oversample}")
    g = axis_grid(s.band2d, oversample)
    h = g[1]
    vals = np.abs(grid_2d(s, g, g))
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    bx, by = float(g[i]), float(g[j])
    best = abs(float(evaluate_2d(s, bx, by)))
    for _ in range(rounds):
        for axis in (0, 1):
            centre = bx if axis == 0 else by
            lo, hi = max(0.0, centre - h), min(1.0, centre + h)
            if axis == 0:
                obj = lambda p: np.abs(evaluate_2d(s, p, by))
            else:
                obj = lambda p: np.abs(evaluate_2d(s, bx, p))
            p = float(golden_max(obj, np.array([lo]), np.array([hi]))[0])
            v = float(obj(np.array([p]))[0])
            if v > best:
                best = v
                bx, by = (p, by) if axis == 0 else (bx, p)
    return best, (bx, by)


def grid_extrema_count(s: CosineSum2D, oversample: int = 16) -> int:
    """Grid points that are maxima or minima of f over their 8-neighbourhood (ties count)."""
    g = axis_grid(s.band2d, oversample)
    f = grid_2d(s, g, g)
    p = np.pad(f, 1, mode="edge")
    core = p[1:-1, 1:-1]
    is_max = np.ones_like(core, dtype=bool)
    is_min = np.ones_like(core, dtype=bool)
    n0, n1 = core.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == dj == 0:
                continue
            nb = p[1 + di:1 + di + n0, 1 + dj:1 + dj + n1]
            is_max &= core >= nb
            is_min &= core <= nb
    return int(np.count_nonzero(is_max) + np.count_nonzero(is_min))


def model_extrema_count_2d(b: Band2D) -> int:
    kbar = (b.radial.k_min + b.radial.k_max) / 2.0
    return int(math.floor(kbar * kbar + 0.5))


def model_draw_2d(b: Band2D, rng: RngStream) -> evmodel.ModelDraw:
    n = model_extrema_count_2d(b)
    z = rng.normals(2 * n)
    m = b.size / 2.0 + math.sqrt(b.size / 4.0) * z[:n]
    mean = (2.0 * m - b.size) * evmodel.TERM_MEAN_2D
    y = mean + math.sqrt(b.size * evmodel.TERM_VAR_2D) * z[n:]
    # expected L2 norm of the bare cosine-product sum
    return evmodel.ModelDraw(b.size, y, m, 0.5 * math.sqrt(b.size), peak_scale=1.0)


@dataclass(frozen=True)
class TwoDConfig:
    epsilons: tuple[float, ...] = (10 ** -1.5,)
    gamma: float = 0.8
    trials: int = 100
    oversample: int = 16
    master_seed: int = 0
    C: float = math.sqrt(2.0)
    bins: int = 30
    force: bool = False
    kind: str = field(default="ratio_2d", init=False)

    def echo(self) -> dict:
        return {"kind": self.kind, "epsilons": list(self.epsilons), "gamma": self.gamma,
                "trials": self.trials, "oversample": self.oversample,
                "master_seed": self.master_seed, "C": self.C, "bins": self.bins}


def ratio_experiment_2d(cfg: TwoDConfig) -> ExperimentResult:
    t0 = time.perf_counter()
    small = [e for e in cfg.epsilons if e < MIN_EPSILON]
    if small and not cfg.force:
        raise ValueError(f"epsilon below {MIN_EPSILON} needs force=True (2-D cost grows like eps^-2)")
    res = ExperimentResult(cfg)
    for i, eps in enumerate(cfg.epsilons):
        b = band_2d(eps, cfg.gamma)
        real = np.empty(cfg.trials)
        model = np.empty(cfg.trials)
        for t in range(cfg.trials):
            s = sample_sum_2d(b, RngStream(cfg.master_seed, trial_stream_index(i << 20, t)))
            real[t] = sup_norm_2d(s, cfg.oversample)[0] / l2_norm_2d(s)
            d = model_draw_2d(b, RngStream(cfg.master_seed, trial_stream_index((i << 20) | 1, t)))
            model[t] = evmodel.model_norm_ratio(d)
        thr = cfg.C * math.log(1.0 / eps)
        res.cells += [
            (eps, "real_ratio", real),
            (eps, "model_ratio", model),
            (eps, "model_exceed", (model >= thr).astype(float)),
        ]
        edges = shared_edges(real, model, cfg.bins)
        res.histograms.append(Histogram("ratio", eps, edges, {
            "real": np.histogram(real, edges)[0],
            "model": np.histogram(model, edges)[0],
        }))
    res.seconds = time.perf_counter() - t0
    return res
