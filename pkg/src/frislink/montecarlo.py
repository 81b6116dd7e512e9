"""Chunked, reproducible Monte Carlo engine for equivalent-gain sampling.

Reproducibility contract: trial t draws from its own counter-based
substream regardless of batching, so results are byte-identical for
any chunk schedule or worker count. Chunks are fixed at 8192 trials;
parallel runs distribute whole chunks across processes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import LinkBudget
from .correlation import SurfaceGeometry, build_correlation_matrix, psd_sqrt
from .analysis import GammaFit, gamma_cdf

__all__ = [
    "CHUNK_TRIALS",
    "StaticMode",
    "AdaptiveFrisMode",
    "RisBaselineMode",
    "OutageEstimate",
    "CapacityEstimate",
    "EmpiricalCdf",
    "trial_rng",
    "run_trials",
    "estimate_outage",
    "estimate_ergodic_capacity",
    "ks_statistic",
    "empirical_cdf",
    "dump_samples",
]

CHUNK_TRIALS = 8192

# estimates with fewer outage events than this are flagged unreliable
_MIN_RELIABLE_HITS = 50

_RT_HALF = 1.0 / math.sqrt(2.0)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent substream for one trial of one experiment.

    The trial index is planted in the upper words of the Philox counter,
    far above the in-stream increments, so substreams never overlap.
    """
    if trial < 0:
        raise ValueError(f"trial index must be nonnegative, got {trial}")
    return np.random.Generator(np.random.Philox(key=seed, counter=trial << 128))


@dataclass(frozen=True, eq=False)
class StaticMode:
    """Fixed element selection with fixed phase shifts."""

    selection: np.ndarray
    phases: np.ndarray


@dataclass(frozen=True)
class AdaptiveFrisMode:
    """Per-realization top-m_o element activation with coherent phases."""

    m_o: int


@dataclass(frozen=True)
class RisBaselineMode:
    """Conventional surface: its own m_rx x m_rz grid over the same
    aperture, all elements active with coherent phases."""

    m_rx: int
    m_rz: int


@dataclass(frozen=True)
class _EnginePlan:
    """Resolved per-mode inputs shipped to chunk workers."""

    kind: str  # 'static' | 'adaptive' | 'coherent_all'
    mat: np.ndarray  # combining rows applied to both hops
    m: int  # normals drawn per hop per trial
    phases: np.ndarray | None
    m_o: int


def _resolve_mode(geom: SurfaceGeometry, kernel: str, mode) -> _EnginePlan:
    if isinstance(mode, StaticMode):
        sel = np.asarray(mode.selection, dtype=int)
        phases = np.asarray(mode.phases, dtype=float)
        if sel.ndim != 1 or sel.size == 0:
            raise ValueError("static selection must be a nonempty index vector")
        if len(np.unique(sel)) != sel.size or sel.min() < 0 or sel.max() >= geom.m:
            raise ValueError(
                f"static selection must be unique indices in [0, {geom.m})"
            )
        if phases.shape != sel.shape or not np.all(np.isfinite(phases)):
            raise ValueError("phases must be finite and match the selection length")
        sqrt_j = psd_sqrt(build_correlation_matrix(geom, kernel)).matrix
        return _EnginePlan(
            kind="static", mat=sqrt_j[sel, :], m=geom.m, phases=phases, m_o=sel.size
        )
    if isinstance(mode, AdaptiveFrisMode):
        if not 1 <= mode.m_o <= geom.m:
            raise ValueError(f"m_o must be in [1, {geom.m}], got {mode.m_o}")
        sqrt_j = psd_sqrt(build_correlation_matrix(geom, kernel)).matrix
        return _EnginePlan(
            kind="adaptive", mat=sqrt_j, m=geom.m, phases=None, m_o=mode.m_o
        )
    if isinstance(mode, RisBaselineMode):
        sub = SurfaceGeometry(
            m_x=mode.m_rx,
            m_z=mode.m_rz,
            w_x=geom.w_x,
            w_z=geom.w_z,
            wavelength=geom.wavelength,
        )
        sqrt_r = psd_sqrt(build_correlation_matrix(sub, kernel)).matrix
        return _EnginePlan(
            kind="coherent_all", mat=sqrt_r, m=sub.m, phases=None, m_o=sub.m
        )
    raise TypeError(f"unsupported mode {type(mode).__name__}")


def _compute_chunk(task) -> np.ndarray:
    """Gains for trials [t0, t1); module-level so process pools can use it."""
    plan, seed, t0, t1 = task
    m = plan.m
    n = t1 - t0
    h_f = np.empty((n, m), dtype=complex)
    h_u = np.empty((n, m), dtype=complex)
    for i in range(n):
        z = trial_rng(seed, t0 + i).standard_normal(4 * m)
        h_f[i] = z[:m] + 1j * z[m : 2 * m]
        h_u[i] = z[2 * m : 3 * m] + 1j * z[3 * m :]
    h_f *= _RT_HALF
    h_u *= _RT_HALF
    a_f = h_f @ plan.mat.T
    a_u = h_u @ plan.mat.T
    if plan.kind == "static":
        s = (np.conj(a_u) * np.exp(1j * plan.phases) * a_f).sum(axis=1)
        return np.abs(s) ** 2
    prod = np.abs(a_u) * np.abs(a_f)
    if plan.kind == "adaptive":
        cut = prod.shape[1] - plan.m_o
        idx = np.argpartition(prod, cut, axis=1)[:, cut:]
        idx.sort(axis=1)  # fixed index-order summation
        prod = np.take_along_axis(prod, idx, axis=1)
    amp = prod.sum(axis=1)
    return amp**2


def run_trials(
    geom: SurfaceGeometry,
    kernel: str,
    mode,
    n: int,
    seed: int,
    workers: int = 1,
) -> np.ndarray:
    """Equivalent gains of n independent trials.

    Trials are processed in fixed chunks of CHUNK_TRIALS; workers > 1
    spreads whole chunks over a process pool without changing any
    result bit.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    plan = _resolve_mode(geom, kernel, mode)
    tasks = [
        (plan, seed, t0, min(t0 + CHUNK_TRIALS, n)) for t0 in range(0, n, CHUNK_TRIALS)
    ]
    if workers == 1 or len(tasks) == 1:
        parts = [_compute_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_compute_chunk, tasks))
    return np.concatenate(parts)


@dataclass(frozen=True)
class OutageEstimate:
    probability: float
    stderr: float
    hits: int
    reliable: bool


def estimate_outage(samples: np.ndarray, budget: LinkBudget) -> OutageEstimate:
    """Empirical probability that the sampled gains miss the rate target."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 1:
        raise ValueError("estimate requires at least one sample")
    threshold = budget.rate_threshold / budget.snr_scale
    hits = int(np.count_nonzero(samples <= threshold))
    p = hits / n
    stderr = math.sqrt(p * (1.0 - p) / n)
    return OutageEstimate(
        probability=p,
        stderr=stderr,
        hits=hits,
        reliable=hits >= _MIN_RELIABLE_HITS,
    )


@dataclass(frozen=True)
class CapacityEstimate:
    capacity: float
    stderr: float


def estimate_ergodic_capacity(
    samples: np.ndarray, budget: LinkBudget
) -> CapacityEstimate:
    """Mean of log2(1 + received SNR) over the sampled gains."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 1:
        raise ValueError("estimate requires at least one sample")
    rates = np.log2(1.0 + budget.snr_scale * samples)
    mean = float(rates.mean())
    stderr = float(rates.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return CapacityEstimate(capacity=mean, stderr=stderr)


def ks_statistic(samples: np.ndarray, fit: GammaFit) -> float:
    """Two-sided Kolmogorov-Smirnov distance to the Gamma surrogate."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n < 1:
        raise ValueError("ks_statistic requires at least one sample")
    f = np.array([gamma_cdf(fit, float(g)) for g in s])
    grid = np.arange(n, dtype=float)
    d_plus = np.max((grid + 1.0) / n - f)
    d_minus = np.max(f - grid / n)
    return float(max(d_plus, d_minus))


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous empirical distribution of a sample set."""

    sorted_values: np.ndarray

    def evaluate(self, g) -> np.ndarray:
        """Fraction of samples at or below g (vectorized)."""
        pos = np.searchsorted(self.sorted_values, g, side="right")
        return pos / self.sorted_values.size


def empirical_cdf(samples: np.ndarray) -> EmpiricalCdf:
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise ValueError("empirical_cdf requires at least one sample")
    return EmpiricalCdf(sorted_values=np.sort(samples))


def dump_samples(path, samples: np.ndarray, metadata: dict) -> None:
    """Write gains one per row with # key=value provenance headers."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for key, value in metadata.items():
            f.write(f"# {key}={value}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["gain"])
        for g in np.asarray(samples, dtype=float):
            writer.writerow([format(g, ".17g")])
