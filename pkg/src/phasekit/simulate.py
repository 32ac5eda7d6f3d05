"""Monte-Carlo draws from the optimal covariant measurement.

Random numbers come from numpy's Philox counter-based generator.  Chunk i
of a run uses the counter block whose top word is i, so the samples depend
only on (seed, n_samples), never on how many threads produced them.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cost import CostModel, evaluate_cost
from .pom import overlap_profile
from .spectrum import ReducedState

TWO_PI = 2 * math.pi
GRID_POINTS = 4096
CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class SimulationRun:
    state: ReducedState
    phi_true: float
    n_samples: int
    seed: int
    samples: np.ndarray

    def histogram(self, bins: int = 64) -> np.ndarray:
        counts, _ = np.histogram(self.samples, bins=bins, range=(0.0, TWO_PI))
        return counts

    def errors(self) -> np.ndarray:
        """phi_est - phi_true wrapped to [0, 2pi)."""
        return wrap(self.samples - self.phi_true)


def wrap(phi):
    out = np.mod(phi, TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def error_cdf(state: ReducedState, delta) -> np.ndarray:
    """Exact CDF of the estimation error on [0, 2pi)."""
    a = overlap_profile(state)
    delta = np.asarray(delta, dtype=float)
    l = np.arange(1, a.size)
    harm = np.sin(np.multiply.outer(delta, l)) @ (a[1:] / l) if l.size else 0.0
    return (a[0] * delta + 2.0 * harm) / TWO_PI


def _cdf_grid(state: ReducedState, points: int) -> tuple[np.ndarray, np.ndarray]:
    nodes = TWO_PI * np.arange(points + 1) / points
    cdf = error_cdf(state, nodes)
    cdf[0], cdf[-1] = 0.0, 1.0
    return nodes, np.maximum.accumulate(cdf)


def _invert(nodes: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    j = np.clip(np.searchsorted(cdf, u, side="right") - 1, 0, nodes.size - 2)
    width = cdf[j + 1] - cdf[j]
    frac = np.divide(u - cdf[j], width, out=np.zeros_like(u), where=width > 0)
    return nodes[j] + frac * (nodes[j + 1] - nodes[j])


def _chunk_uniforms(seed: int, chunk: int, count: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, 0, chunk])
    return np.random.Generator(bitgen).random(count)


def default_threads() -> int:
    env = os.environ.get("PHASEKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sample_estimates(state: ReducedState, phi_true: float, n_samples: int, seed: int,
                     grid_points: int = GRID_POINTS, threads: int = 1) -> SimulationRun:
    """Inverse-CDF sampling of phi_est on a uniform grid, linear inside cells."""
    if n_samples < 1:
        raise ValueError("n_samples >= 1 required")
    if grid_points < GRID_POINTS:
        raise ValueError(f"grid_points >= {GRID_POINTS} required")
    seed = int(seed) & ((1 << 64) - 1)
    nodes, cdf = _cdf_grid(state, grid_points)
    sizes = [min(CHUNK, n_samples - start) for start in range(0, n_samples, CHUNK)]

    def work(i: int) -> np.ndarray:
        return _invert(nodes, cdf, _chunk_uniforms(seed, i, sizes[i]))

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(i) for i in range(len(sizes))]
    samples = wrap(np.concatenate(parts) + phi_true)
    samples.setflags(write=False)
    return SimulationRun(state, float(phi_true), int(n_samples), seed, samples)


def empirical_cost(run: SimulationRun, model: CostModel) -> tuple[float, float]:
    """Sample mean of C(phi_est - phi_true) and its standard error."""
    vals = evaluate_cost(model, run.samples - run.phi_true)
    vals = np.atleast_1d(vals)
    shift = vals[0]
    dev = vals - shift
    mean = float(shift + dev.mean())
    if vals.size < 2:
        return mean, math.inf
    return mean, float(dev.std(ddof=1) / math.sqrt(vals.size))


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(n: int, m: int, alpha: float = 1e-3) -> float:
    return math.sqrt(-0.5 * math.log(alpha / 2)) * math.sqrt((n + m) / (n * m))


@dataclass(frozen=True)
class KSResult:
    statistic: float
    critical: float
    alpha: float

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def covariance_test(state: ReducedState, phi_a: float, phi_b: float, n_samples: int,
                    seed_a: int, seed_b: int, alpha: float = 1e-3,
                    state_b: ReducedState | None = None) -> KSResult:
    """Compare wrapped error laws of two runs with different true phases.

    Meaningful from about 1e3 samples; smaller runs get a threshold so wide
    the test passes vacuously.  ``state_b`` swaps in a different state for
    the second run (used to check the test can fail).
    """
    run_a = sample_estimates(state, phi_a, n_samples, seed_a)
    run_b = sample_estimates(state_b or state, phi_b, n_samples, seed_b)
    stat = ks_statistic(run_a.errors(), run_b.errors())
    return KSResult(stat, ks_critical_value(n_samples, n_samples, alpha), alpha)


def dkw_bound(n: int, delta: float = 1e-3) -> float:
    return math.sqrt(math.log(2 / delta) / (2 * n))


def run_report(run: SimulationRun, model: CostModel | None = None, bins: int = 64) -> dict:
    out = {"phi_true": run.phi_true, "n": run.n_samples, "seed": run.seed}
    if model is not None:
        mean, err = empirical_cost(run, model)
        out["mean_cost"] = mean
        out["std_error"] = err
    out["histogram"] = {"bins": bins, "counts": [int(c) for c in run.histogram(bins)]}
    return out


def samples_to_bytes(run: SimulationRun) -> bytes:
    return np.asarray(run.samples, dtype="<f8").tobytes()
