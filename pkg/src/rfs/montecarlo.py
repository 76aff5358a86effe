"""Seeded Monte Carlo experiments over cosine-sum norm ratios.

Every trial owns a stream RngStream(master_seed, cell * 2**32 + trial).  Trials
are processed in fixed-size chunks (independent of the worker count) and the
chunks are merged by index, so results do not depend on scheduling.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from rfs import evmodel
from rfs.evaluator import DEFAULT_OVERSAMPLE, eval_cos, find_extrema, sup_norm_batch
from rfs.rng import RngStream, trial_stream_index
from rfs.match import extrema_match_correlation, global_extremum_match_ratios, match_counts
from rfs.sampler import CosineSum, forced_batch, normal_batch
from rfs.spectrum import SpectralBand, band as make_band

log = logging.getLogger(__name__)

KINDS = ("ratio_sweep", "tub", "restricted", "match_hist", "match_corr",
         "model_compare", "bound_check")
CHUNK = 64
MAX_RAW_ROWS = 10 ** 6
CELL_SHIFT = 20


def default_sweep(lo_exp: float = -4.0, hi_exp: float = -2.0, n: int = 9) -> tuple[float, ...]:
    return tuple(float(e) for e in np.logspace(hi_exp, lo_exp, n))


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    epsilons: tuple[float, ...] = (1e-2,)
    gamma: float = 0.8
    trials: int = 250
    c: float = 1.0
    oversample: int = DEFAULT_OVERSAMPLE
    master_seed: int = 0
    m_values: tuple[int, ...] | None = None
    statistic: str = "sup"
    delta: float = 0.25
    C: float = math.sqrt(2.0)
    bins: int = 40
    threads: int = 1
    fmt: str = "csv"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.epsilons or any(not e > 0 for e in self.epsilons):
            raise ValueError("epsilon values must be positive")
        if not 0.0 < self.c <= 1.0:
            raise ValueError("c must lie in (0, 1]")
        if self.statistic not in ("sup", "boundary"):
            raise ValueError("statistic must be 'sup' or 'boundary'")
        if self.oversample < 4:
            raise ValueError("oversample must be >= 4")

    def echo(self) -> dict:
        """Reproducibility-relevant settings; the worker count is deliberately absent."""
        d = asdict(self)
        d.pop("threads")
        d.pop("fmt")
        d["epsilons"] = list(self.epsilons)
        d["m_values"] = None if self.m_values is None else list(self.m_values)
        return d


@dataclass
class Histogram:
    name: str
    epsilon: float
    edges: np.ndarray
    series: dict[str, np.ndarray]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    # (epsilon, cell, values) in canonical order
    cells: list[tuple[float, str, np.ndarray]] = field(default_factory=list)
    histograms: list[Histogram] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def experiment(self) -> str:
        return self.config.kind

    def values(self, cell: str, epsilon: float | None = None) -> np.ndarray:
        for eps, name, vals in self.cells:
            if name == cell and (epsilon is None or math.isclose(eps, epsilon, rel_tol=1e-12)):
                return vals
        raise KeyError((cell, epsilon))

    @property
    def keep_raw(self) -> bool:
        return sum(v.size for _, _, v in self.cells) <= MAX_RAW_ROWS

    def summaries(self) -> list[tuple[float, str, dict]]:
        return [(eps, name, summarize(vals)) for eps, name, vals in self.cells]


def summarize(values) -> dict:
    """Mean, sample std, min, quartiles (linear interpolation, R-7), max and count."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("cannot summarize an empty list")
    q1, med, q3 = np.quantile(v, [0.25, 0.5, 0.75])
    return {
        "mean": float(np.mean(v)),
        "std": float(np.std(v, ddof=1)) if v.size > 1 else 0.0,
        "min": float(np.min(v)),
        "q1": float(q1),
        "median": float(med),
        "q3": float(q3),
        "max": float(np.max(v)),
        "n": int(v.size),
    }


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("KS distance needs two nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def resolve_threads(threads: int | None) -> int:
    if threads is None or threads <= 0:
        env = os.environ.get("RFS_THREADS")
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1
    return threads


def map_chunks(fn, trials: int, threads: int = 1, chunk: int = CHUNK) -> np.ndarray:
    """Concatenate fn(start, stop) over fixed chunks of [0, trials), in order."""
    bounds_ = [(s, min(trials, s + chunk)) for s in range(0, trials, chunk)]
    if threads <= 1 or len(bounds_) == 1:
        parts = [fn(s, e) for s, e in bounds_]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda se: fn(*se), bounds_))
    return np.concatenate(parts)


def cell_index(eps_index: int, sub: int) -> int:
    return (eps_index << CELL_SHIFT) | sub


def _bands(cfg: ExperimentConfig) -> list[SpectralBand]:
    return [make_band(e, cfg.gamma) for e in cfg.epsilons]


def real_ratios(b: SpectralBand, trials: int, seed: int, cell: int,
                oversample: int = DEFAULT_OVERSAMPLE, right: float = 1.0, threads: int = 1) -> np.ndarray:
    def chunk(s, e):
        coeffs = normal_batch(b, seed, cell, s, e)
        sup, _ = sup_norm_batch(coeffs, b, oversample, right)
        return sup / np.sqrt(np.sum(coeffs * coeffs, axis=1))
    return map_chunks(chunk, trials, threads)


def forced_ratios(b: SpectralBand, m: int, trials: int, seed: int, cell: int,
                  oversample: int = DEFAULT_OVERSAMPLE, right: float = 1.0,
                  statistic: str = "sup", threads: int = 1) -> np.ndarray:
    ks = np.arange(b.k_min, b.k_max + 1)

    def chunk(s, e):
        coeffs = forced_batch(b, m, seed, cell, s, e)
        l2 = np.sqrt(np.sum(coeffs * coeffs, axis=1))
        if statistic == "boundary":
            return np.abs(eval_cos(coeffs, ks, np.zeros(1)))[:, 0] / l2
        sup, _ = sup_norm_batch(coeffs, b, oversample, right)
        return sup / l2
    return map_chunks(chunk, trials, threads)


def _cells_m(cfg: ExperimentConfig, b: SpectralBand) -> tuple[int, ...]:
    if cfg.m_values is None:
        return tuple(range(b.size + 1))
    bad = [m for m in cfg.m_values if not 0 <= m <= b.size]
    if bad:
        raise ValueError(f"m values out of range for |band|={b.size}: {bad}")
    return tuple(cfg.m_values)


def _timed(run):
    def wrapper(cfg: ExperimentConfig) -> ExperimentResult:
        t0 = time.perf_counter()
        res = run(cfg)
        res.seconds = time.perf_counter() - t0
        log.info("%s finished in %.2fs", cfg.kind, res.seconds)
        return res
    wrapper.__name__ = run.__name__
    wrapper.__doc__ = run.__doc__
    return wrapper


@_timed
def run_ratio_sweep(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.kind != "ratio_sweep":
        raise ValueError("config kind must be ratio_sweep")
    res = ExperimentResult(cfg)
    threads = resolve_threads(cfg.threads)
    for i, b in enumerate(_bands(cfg)):
        if b.epsilon < 1e-4:
            log.warning("epsilon=%g is beyond desk scale (|band|=%d); this will be slow", b.epsilon, b.size)
        r = real_ratios(b, cfg.trials, cfg.master_seed, cell_index(i, 0), cfg.oversample, threads=threads)
        res.cells.append((b.epsilon, "ratio", r))
    return res


def _run_forced(cfg: ExperimentConfig, right: float) -> ExperimentResult:
    res = ExperimentResult(cfg)
    threads = resolve_threads(cfg.threads)
    for i, b in enumerate(_bands(cfg)):
        for m in _cells_m(cfg, b):
            r = forced_ratios(b, m, cfg.trials, cfg.master_seed, cell_index(i, m), cfg.oversample,
                              right, cfg.statistic, threads)
            res.cells.append((b.epsilon, f"m={m}", r))
    return res


@_timed
def run_tub(cfg: ExperimentConfig) -> ExperimentResult:
    """Per-m ratio ensembles of sign-forced sums over the whole interval."""
    if cfg.kind != "tub":
        raise ValueError("config kind must be tub")
    return _run_forced(cfg, 1.0)


@_timed
def run_restricted(cfg: ExperimentConfig) -> ExperimentResult:
    """Like ``run_tub`` with the sup taken over [0, c] only (L2 norm still over [0, 1])."""
    if cfg.kind != "restricted":
        raise ValueError("config kind must be restricted")
    return _run_forced(cfg, cfg.c)


def tub_means(res: ExperimentResult, epsilon: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-m means and standard errors of a tub result (m = 0..size)."""
    means, ses = [], []
    for m in range(size + 1):
        v = res.values(f"m={m}", epsilon)
        means.append(v.mean())
        ses.append(v.std(ddof=1) / math.sqrt(v.size) if v.size > 1 else 0.0)
    return np.array(means), np.array(ses)


def _extrema_stats(b: SpectralBand, coeffs: np.ndarray, oversample: int):
    """Extrema of one real sum and the match counts at each extremum."""
    s = CosineSum(b, coeffs)
    rep = find_extrema(s, oversample)
    matches = match_counts(coeffs, s.wavenumbers, rep.locations)
    return rep, matches


@_timed
def run_model_compare(cfg: ExperimentConfig) -> ExperimentResult:
    """Real-sum extrema against the simplified model, on shared histogram edges."""
    if cfg.kind != "model_compare":
        raise ValueError("config kind must be model_compare")
    res = ExperimentResult(cfg)
    threads = resolve_threads(cfg.threads)
    for i, b in enumerate(_bands(cfg)):
        real_global = real_ratios(b, cfg.trials, cfg.master_seed, cell_index(i, 0),
                                  cfg.oversample, threads=threads)

        def local_chunk(s, e, b=b, i=i):
            coeffs = normal_batch(b, cfg.master_seed, cell_index(i, 0), s, e)
            vals, mats = [], []
            for c in coeffs:
                rep, matches = _extrema_stats(b, c, cfg.oversample)
                vals.append(rep.values / math.sqrt(2.0))
                mats.append(matches.astype(float))
            return np.concatenate(vals), np.concatenate(mats)

        chunks = [local_chunk(s, min(cfg.trials, s + CHUNK)) for s in range(0, cfg.trials, CHUNK)]
        real_local = np.concatenate([c[0] for c in chunks])
        real_match = np.concatenate([c[1] for c in chunks])

        draws = [evmodel.model_draw(b, _model_stream(cfg.master_seed, i, t)) for t in range(cfg.trials)]
        model_global = np.array([evmodel.model_norm_ratio(d) for d in draws])
        model_local = np.concatenate([d.y for d in draws])
        model_match = np.concatenate([d.match_surrogate for d in draws])

        res.cells += [
            (b.epsilon, "real_global", real_global),
            (b.epsilon, "model_global", model_global),
            (b.epsilon, "real_local", real_local),
            (b.epsilon, "model_local", model_local),
            (b.epsilon, "real_match", real_match),
            (b.epsilon, "model_match", model_match),
        ]
        for name, real, model in (("global", real_global, model_global),
                                  ("local", real_local, model_local),
                                  ("match", real_match, model_match)):
            if name == "match":
                # unit bins centred on the integer counts 0..|band|
                edges = np.arange(b.size + 2) - 0.5
            else:
                edges = shared_edges(real, model, cfg.bins)
            res.histograms.append(Histogram(name, b.epsilon, edges, {
                "real": np.histogram(real, edges)[0],
                "model": np.histogram(model, edges)[0],
            }))
    return res


def _model_stream(seed: int, eps_index: int, trial: int) -> RngStream:
    return RngStream(seed, trial_stream_index(cell_index(eps_index, 1), trial))


def shared_edges(a, b, bins: int) -> np.ndarray:
    lo = min(float(np.min(a)), float(np.min(b)))
    hi = max(float(np.max(a)), float(np.max(b)))
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, bins + 1)


def tail_ks(real_local, model_local, size: int, frac: float = 0.5) -> float:
    """KS distance between |values| of both ensembles beyond frac * sqrt(size/2)."""
    cut = frac * math.sqrt(size / 2.0)
    a = np.abs(np.asarray(real_local))
    b = np.abs(np.asarray(model_local))
    return ks_distance(a[a > cut], b[b > cut])


@_timed
def run_match_hist(cfg: ExperimentConfig) -> ExperimentResult:
    if cfg.kind != "match_hist":
        raise ValueError("config kind must be match_hist")
    res = ExperimentResult(cfg)
    for i, b in enumerate(_bands(cfg)):
        ratios = global_extremum_match_ratios(b, cfg.trials, cfg.master_seed, cell_index(i, 0),
                                              cfg.oversample)
        res.cells.append((b.epsilon, "global_match_ratio", ratios))
        edges = np.linspace(0.0, 1.0, cfg.bins + 1)
        res.histograms.append(Histogram("match_ratio", b.epsilon, edges,
                                        {"count": np.histogram(ratios, edges)[0]}))
    return res


@_timed
def run_match_corr(cfg: ExperimentConfig) -> ExperimentResult:
    """Per-trial extremum/match-ratio correlations: cell 'folded' and cell 'raw'."""
    if cfg.kind != "match_corr":
        raise ValueError("config kind must be match_corr")
    res = ExperimentResult(cfg)
    threads = resolve_threads(cfg.threads)
    for i, b in enumerate(_bands(cfg)):
        def chunk(s, e, b=b, i=i):
            coeffs = normal_batch(b, cfg.master_seed, cell_index(i, 0), s, e)
            out = np.empty((e - s, 2))
            for row, c in enumerate(coeffs):
                sm = CosineSum(b, c)
                rep = find_extrema(sm, cfg.oversample)
                out[row] = (extrema_match_correlation(sm, rep, True),
                            extrema_match_correlation(sm, rep, False))
            return out
        both = map_chunks(chunk, cfg.trials, threads)
        res.cells.append((b.epsilon, "folded", both[:, 0]))
        res.cells.append((b.epsilon, "raw", both[:, 1]))
    return res


@_timed
def run_bound_check(cfg: ExperimentConfig) -> ExperimentResult:
    """Event frequencies of the eps^-delta bound (real sums) and C ln(1/eps) (model)."""
    if cfg.kind != "bound_check":
        raise ValueError("config kind must be bound_check")
    res = ExperimentResult(cfg)
    threads = resolve_threads(cfg.threads)
    for i, b in enumerate(_bands(cfg)):
        r = real_ratios(b, cfg.trials, cfg.master_seed, cell_index(i, 0), cfg.oversample, threads=threads)
        model = evmodel.model_ratios(b, cfg.trials, cfg.master_seed, cell_index(i, 1))
        eps = b.epsilon
        res.cells += [
            (eps, "ratio", r),
            (eps, "event", (r <= eps ** (-cfg.delta)).astype(float)),
            (eps, "model_ratio", model),
            (eps, "model_exceed", (model >= cfg.C * math.log(1.0 / eps)).astype(float)),
        ]
    return res


RUNNERS = {
    "ratio_sweep": run_ratio_sweep,
    "tub": run_tub,
    "restricted": run_restricted,
    "match_hist": run_match_hist,
    "match_corr": run_match_corr,
    "model_compare": run_model_compare,
    "bound_check": run_bound_check,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    return RUNNERS[cfg.kind](cfg)
