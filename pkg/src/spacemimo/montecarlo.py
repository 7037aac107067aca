"""Ergodic spectral efficiency over random array placements.

Trial ``t`` (1-based) draws its geometry from the Philox substream keyed by
``(master_seed, t)``, so every trial is reproducible in isolation and the
result does not depend on how trials are spread over workers.  Aggregation
always runs over the trial values in index order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from spacemimo.channel import (
    build_channel_matrix,
    capacity_upper_bound,
    ergodic_lower_bound,
    spectral_efficiency,
    uniform_power_approximation,
)
from spacemimo.errors import NumericalError, ValidationError
from spacemimo.geometry import sample_uniform_disc
from spacemimo.linkmodel import ApertureRegion, dof_count

Z99 = NormalDist().inv_cdf(0.995)
DEFAULT_TRIALS = 1000


@dataclass(frozen=True)
class McConfig:
    m: int
    region: ApertureRegion
    gamma: float
    g: float
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0

    def __post_init__(self):
        for name in ("m", "trials"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}", field=name)
        for name in ("gamma", "g"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValidationError(f"{name} must be finite and > 0, got {v!r}", field=name)


@dataclass(frozen=True)
class McSummary:
    """Sample statistics plus the reference bounds for the same configuration.

    ``trial_max`` is the largest single-trial value, for checking the
    pointwise upper bound.
    """

    mean_xi: float
    std_error: float
    ci99_lo: float
    ci99_hi: float
    trials: int
    lower_bound: float
    upper_bound: float
    approximation: float
    trial_max: float

    def to_dict(self) -> dict:
        return asdict(self)


def _trial_xi(cfg: McConfig, t: int) -> float:
    geom = sample_uniform_disc(cfg.region, cfg.m, cfg.master_seed, stream=t)
    try:
        return spectral_efficiency(build_channel_matrix(geom), cfg.gamma, cfg.g).xi
    except NumericalError as exc:
        raise NumericalError(f"trial {t}: {exc}") from exc


def trial_values(cfg: McConfig, workers: int = 1) -> np.ndarray:
    """Per-trial spectral efficiencies, indexed by trial ``1..T`` (position 0 is trial 1)."""
    if int(workers) != workers or workers < 1:
        raise ValidationError(f"workers must be a positive integer, got {workers!r}", field="workers")
    out = np.empty(cfg.trials)

    def run(chunk):
        for t in chunk:
            out[t - 1] = _trial_xi(cfg, t)

    idx = range(1, cfg.trials + 1)
    if workers == 1:
        run(idx)
    else:
        chunks = [idx[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(run, c) for c in chunks]:
                fut.result()
    return out


def summarize(values: np.ndarray, cfg: McConfig) -> McSummary:
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        se = math.sqrt(var / n)
    else:
        se = 0.0
    c = cfg.region.aperture_ratio
    return McSummary(
        mean_xi=mean,
        std_error=se,
        ci99_lo=mean - Z99 * se,
        ci99_hi=mean + Z99 * se,
        trials=n,
        lower_bound=ergodic_lower_bound(cfg.m, c, cfg.gamma, cfg.g),
        upper_bound=capacity_upper_bound(cfg.m, dof_count(cfg.region), cfg.gamma, cfg.g),
        approximation=uniform_power_approximation(cfg.m, cfg.gamma, cfg.g),
        trial_max=float(np.max(values)),
    )


def ergodic_estimate(cfg: McConfig, workers: int = 1) -> McSummary:
    """Monte Carlo estimate of the mean spectral efficiency with a 99% normal CI."""
    return summarize(trial_values(cfg, workers=workers), cfg)


@dataclass(frozen=True)
class SweepRow:
    c: float
    mean_xi: float
    se: float
    approximation: float
    ratio: float
    lb: float
    ub: float

    def as_row(self) -> tuple:
        """Values in :data:`SWEEP_HEADER` order."""
        return (self.c, self.mean_xi, self.se, self.approximation, self.ratio, self.lb, self.ub)


# stable external column names; "eq5" holds the full-rank approximation
SWEEP_HEADER = ("c", "mean_xi", "se", "eq5", "ratio", "lb", "ub")


def convergence_sweep(m: int, gamma: float, g: float, ratios, trials: int = DEFAULT_TRIALS,
                      seed: int = 0, workers: int = 1) -> list[SweepRow]:
    """Mean spectral efficiency against the full-rank approximation as the region grows.

    Each aperture ratio ``c`` uses ``wavelength = range = 1`` and the same
    master seed; only ``c`` matters to the channel statistics.
    """
    ratios = [float(c) for c in ratios]
    if any(c < 1.0 for c in ratios):
        raise ValidationError("every aperture ratio must be >= 1", field="ratios")
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        raise ValidationError("aperture ratios must be strictly ascending", field="ratios")
    rows = []
    for c in ratios:
        cfg = McConfig(m, ApertureRegion.from_ratio(c), gamma, g, trials, seed)
        s = ergodic_estimate(cfg, workers=workers)
        rows.append(SweepRow(c, s.mean_xi, s.std_error, s.approximation,
                             s.mean_xi / s.approximation, s.lower_bound, s.upper_bound))
    return rows
