"""Point evaluation, norms, zeros and extrema of cosine sums.

Two evaluation paths exist.  ``eval_cos``/``eval_dsin`` accumulate the terms
in ascending k and are used for every reported value.  ``grid_values``
multiplies a cached cosine table through BLAS and is only used to locate
the best grid point or the sign changes on a grid; whatever it finds is
re-evaluated on the exact path afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from rfs.sampler import CosineSum
from rfs.spectrum import SpectralBand

SQRT2 = math.sqrt(2.0)
DEFAULT_OVERSAMPLE = 16
GOLDEN_TOL = 1e-10
BISECT_TOL = 1e-12
NEAR_ZERO = 1e-12

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_TABLE_CACHE_BYTES = 64 * 2 ** 20
_BLOCK_POINTS = 2048


# ---------------------------------------------------------------- exact path

def eval_cos(coeffs: np.ndarray, ks: np.ndarray, x) -> np.ndarray:
    """sqrt(2) * sum_k c_k cos(k pi x), accumulated left to right over ascending k.

    ``coeffs`` is (K,) or (B, K).  In the batched case ``x`` is (P,) shared
    points or (B, P) per-row points and the result is (B, P).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    if coeffs.ndim == 1:
        acc = np.zeros(x.shape)
        for c, k in zip(coeffs, ks):
            acc += c * np.cos((k * math.pi) * x)
        return SQRT2 * acc
    x2 = np.atleast_2d(x)
    acc = np.zeros(np.broadcast_shapes((coeffs.shape[0], 1), x2.shape))
    for j, k in enumerate(ks):
        acc += coeffs[:, j:j + 1] * np.cos((k * math.pi) * x2)
    return SQRT2 * acc


def eval_dsin(coeffs: np.ndarray, ks: np.ndarray, x) -> np.ndarray:
    """Derivative -sqrt(2) * sum_k c_k k pi sin(k pi x), ascending k."""
    coeffs = np.asarray(coeffs, dtype=float)
    x = np.asarray(x, dtype=float)
    acc = np.zeros(x.shape)
    for c, k in zip(coeffs, ks):
        acc += (c * k * math.pi) * np.sin((k * math.pi) * x)
    return -SQRT2 * acc


# ----------------------------------------------------------------- grid path

def grid_points(k_max: int, oversample: int, right: float = 1.0) -> np.ndarray:
    """Uniform grid of spacing 1/(q k_max) on [0, right], ``right`` always included."""
    n = oversample * k_max
    x = np.arange(n + 1) / n
    if right >= 1.0:
        return x
    x = x[x < right]
    return np.append(x, right)


def _table_nbytes(n_points: int, n_modes: int) -> int:
    return 8 * n_points * n_modes


@lru_cache(maxsize=16)
def _cached_table(kind: str, k_min: int, k_max: int, oversample: int, right: float) -> np.ndarray:
    x = grid_points(k_max, oversample, right)
    return _table(kind, np.arange(k_min, k_max + 1), x)


def _table(kind: str, ks: np.ndarray, x: np.ndarray) -> np.ndarray:
    arg = np.outer(x, ks * math.pi)
    if kind == "cos":
        t = SQRT2 * np.cos(arg)
    else:
        t = -SQRT2 * (ks * math.pi) * np.sin(arg)
    t.setflags(write=False)
    return t


def grid_values(coeffs: np.ndarray, b: SpectralBand, oversample: int,
                right: float = 1.0, kind: str = "cos") -> tuple[np.ndarray, np.ndarray]:
    """Values (kind='cos') or derivatives (kind='dsin') on the grid, shape (B, P)."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    x = grid_points(b.k_max, oversample, right)
    if _table_nbytes(x.size, b.size) <= _TABLE_CACHE_BYTES:
        t = _cached_table(kind, b.k_min, b.k_max, oversample, float(right))
        return x, coeffs @ t.T
    ks = np.arange(b.k_min, b.k_max + 1)
    out = np.empty((coeffs.shape[0], x.size))
    for s in range(0, x.size, _BLOCK_POINTS):
        blk = x[s:s + _BLOCK_POINTS]
        out[:, s:s + blk.size] = coeffs @ _table(kind, ks, blk).T
    return x, out


def grid_abs_argmax(coeffs: np.ndarray, b: SpectralBand, oversample: int,
                    right: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Grid and index of max |f| per row, without holding the full (B, P) array for big bands."""
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    x = grid_points(b.k_max, oversample, right)
    if _table_nbytes(x.size, b.size) <= _TABLE_CACHE_BYTES:
        _, vals = grid_values(coeffs, b, oversample, right)
        return x, np.argmax(np.abs(vals), axis=1)
    ks = np.arange(b.k_min, b.k_max + 1)
    best = np.full(coeffs.shape[0], -1.0)
    arg = np.zeros(coeffs.shape[0], dtype=int)
    for s in range(0, x.size, _BLOCK_POINTS):
        blk = x[s:s + _BLOCK_POINTS]
        v = np.abs(coeffs @ _table("cos", ks, blk).T)
        j = np.argmax(v, axis=1)
        vj = v[np.arange(v.shape[0]), j]
        better = vj > best
        best[better] = vj[better]
        arg[better] = s + j[better]
    return x, arg


# ----------------------------------------------------------------- 1-D search

def golden_max(func, lo: np.ndarray, hi: np.ndarray, tol: float = GOLDEN_TOL) -> np.ndarray:
    """Vectorized golden-section search for the maximizer of ``func`` on each [lo, hi].

    ``func`` maps an array of points (one per row) to values.  The bracket is
    shrunk until its width is below ``tol`` times the initial width.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    n_iter = int(math.ceil(math.log(tol) / math.log(_INV_PHI)))
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(n_iter):
        left = fc > fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - _INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + _INV_PHI * (b - a))
        fp = func(np.where(left, c_new, d_new))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
    return 0.5 * (a + b)


def bisect_roots(func, lo: np.ndarray, hi: np.ndarray, tol: float = BISECT_TOL) -> np.ndarray:
    """Vectorized bisection; each [lo, hi] must bracket a sign change of ``func``."""
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    if a.size == 0:
        return a
    fa = func(a)
    width = float(np.max(b - a))
    n_iter = max(1, int(math.ceil(math.log2(width / tol)))) if width > tol else 0
    for _ in range(n_iter):
        m = 0.5 * (a + b)
        fm = func(m)
        same = np.sign(fm) == np.sign(fa)
        a = np.where(same, m, a)
        fa = np.where(same, fm, fa)
        b = np.where(same, b, m)
    return 0.5 * (a + b)


def sign_change_brackets(values: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (i, j) of consecutive kept samples whose signs differ.

    Samples with |value| <= tol are dropped first, so a grid point sitting on
    a root is resolved by the bracket formed by its neighbours.
    """
    keep = np.flatnonzero(np.abs(values) > tol)
    if keep.size < 2:
        return keep[:0], keep[:0]
    s = np.sign(values[keep])
    flips = np.flatnonzero(s[:-1] != s[1:])
    return keep[flips], keep[flips + 1]


# ------------------------------------------------------------------ public API

def _check_points(points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("evaluation points must lie in [0, 1]")
    return x


def evaluate(s: CosineSum, points) -> np.ndarray:
    x = _check_points(points)
    return eval_cos(s.coefficients, s.wavenumbers, x)


def derivative_values(s: CosineSum, points) -> np.ndarray:
    x = _check_points(points)
    return eval_dsin(s.coefficients, s.wavenumbers, x)


def l2_norm(s: CosineSum) -> float:
    c = s.coefficients
    return math.sqrt(math.fsum(c * c))


def sup_norm_batch(coeffs: np.ndarray, b: SpectralBand, oversample: int = DEFAULT_OVERSAMPLE,
                   right: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Sup of |f| over [0, right] for each row of ``coeffs``; returns (values, argmax)."""
    if oversample < 4:
        raise ValueError(f"oversample must be >= 4, got {oversample}")
    if not 0.0 < right <= 1.0:
        raise ValueError(f"restriction endpoint must lie in (0, 1], got {right}")
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    if coeffs.shape[1] == 0:
        raise ValueError("empty sum")
    ks = np.arange(b.k_min, b.k_max + 1)
    x, idx = grid_abs_argmax(coeffs, b, oversample, right)
    x0 = x[idx]
    v0 = np.abs(eval_cos(coeffs, ks, x0[:, None]))[:, 0]
    lo = x[np.maximum(idx - 1, 0)]
    hi = x[np.minimum(idx + 1, x.size - 1)]

    def objective(pts):
        return np.abs(eval_cos(coeffs, ks, pts[:, None]))[:, 0]

    xr = golden_max(objective, lo, hi)
    vr = objective(xr)
    better = vr > v0
    return np.where(better, vr, v0), np.where(better, xr, x0)


def sup_norm(s: CosineSum, oversample: int = DEFAULT_OVERSAMPLE,
             right: float = 1.0) -> tuple[float, float]:
    v, a = sup_norm_batch(s.coefficients[None, :], s.band, oversample, right)
    return float(v[0]), float(a[0])


@dataclass(frozen=True, eq=False)
class ExtremaReport:
    locations: np.ndarray
    values: np.ndarray
    is_boundary: np.ndarray

    @property
    def count(self) -> int:
        return int(self.locations.size)

    @property
    def interior_count(self) -> int:
        return self.count - 2


def _require_oversample(q: int) -> None:
    if q < 8:
        raise ValueError(f"oversample must be >= 8, got {q}")


def critical_points(s: CosineSum, oversample: int = DEFAULT_OVERSAMPLE) -> np.ndarray:
    """Interior zeros of f', refined by bisection."""
    _require_oversample(oversample)
    ks = s.wavenumbers
    x, d = grid_values(s.coefficients, s.band, oversample, kind="dsin")
    d = d[0]
    interior = slice(1, x.size - 1)
    tol = NEAR_ZERO * float(np.max(np.abs(d[interior]), initial=0.0))
    i, j = sign_change_brackets(d[interior], tol)
    return bisect_roots(lambda p: eval_dsin(s.coefficients, ks, p), x[1:-1][i], x[1:-1][j])


def find_extrema(s: CosineSum, oversample: int = DEFAULT_OVERSAMPLE) -> ExtremaReport:
    inner = critical_points(s, oversample)
    locs = np.concatenate(([0.0], inner, [1.0]))
    vals = eval_cos(s.coefficients, s.wavenumbers, locs)
    boundary = np.zeros(locs.size, dtype=bool)
    boundary[[0, -1]] = True
    return ExtremaReport(locs, vals, boundary)


def find_zeros(s: CosineSum, oversample: int = DEFAULT_OVERSAMPLE) -> np.ndarray:
    _require_oversample(oversample)
    ks = s.wavenumbers
    x, f = grid_values(s.coefficients, s.band, oversample)
    f = f[0]
    tol = NEAR_ZERO * float(np.max(np.abs(f)))
    i, j = sign_change_brackets(f, tol)
    return bisect_roots(lambda p: eval_cos(s.coefficients, ks, p), x[i], x[j])


def count_zeros(s: CosineSum, oversample: int = DEFAULT_OVERSAMPLE) -> int:
    return int(find_zeros(s, oversample).size)
