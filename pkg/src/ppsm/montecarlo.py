"""Finite-sample simulation of a model and an empirical anomalous-shift test.

Sampling contract: counts are drawn with numpy's PCG64 generator,
``np.random.default_rng(seed).multinomial(n, p)`` over the 8 cells in flat
index order. The seed -> counts mapping is stable across platforms for a
fixed numpy release line and is part of the reproducibility surface.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, TextIO

import numpy as np

from .model import OUTCOMES, ProbabilityTable, SIGNS, index_of

# Minimum number of samples in a stratum before its mean is reported.
MIN_STRATUM = 2

# Detection threshold (in combined standard errors) for the max statistic.
DETECTION_SIGMA = 3.0


@dataclass(frozen=True)
class SampleBatch:
    """i.i.d. draws from a model, reduced to per-cell counts."""

    n: int
    counts: tuple[int, ...]
    seed: int

    def __post_init__(self):
        if len(self.counts) != 8:
            raise ValueError("expected 8 cell counts")
        if any(c < 0 for c in self.counts) or sum(self.counts) != self.n:
            raise ValueError("counts must be nonnegative and sum to n")


@dataclass(frozen=True)
class StratumEstimate:
    estimate: float
    stderr: float
    n_eff: int

    def to_list(self) -> list:
        return [self.estimate, self.stderr, self.n_eff]


@dataclass(frozen=True)
class EstimateReport:
    """Empirical shifts with binomial standard errors and the detection verdict.

    Strata with fewer than MIN_STRATUM samples are None and excluded from
    the test statistic. apss_z is the max over defined (psi, phi) pairs of
    (|post_hat| - |pre_hat|) / sqrt(se_post^2 + se_pre^2).
    """

    pre_hat: dict[int, Optional[StratumEstimate]]
    post_hat: dict[tuple[int, int], Optional[StratumEstimate]]
    apss_z: float
    apss_detected: bool

    def to_dict(self) -> dict:
        return {
            "pre_hat": {f"{k:+d}": (v.to_list() if v else None)
                        for k, v in self.pre_hat.items()},
            "post_hat": {f"{k[0]:+d},{k[1]:+d}": (v.to_list() if v else None)
                         for k, v in self.post_hat.items()},
            "apss_z": self.apss_z,
            "apss_detected": self.apss_detected,
        }


def sample(p: ProbabilityTable, n: int, seed: int) -> SampleBatch:
    """Draw n i.i.d. outcomes, reduced to multinomial cell counts."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(n, np.asarray(p.p))
    return SampleBatch(n=n, counts=tuple(int(c) for c in counts), seed=seed)


def _mean_estimate(n_plus: int, n_minus: int) -> Optional[StratumEstimate]:
    n_eff = n_plus + n_minus
    if n_eff < MIN_STRATUM:
        return None
    m = (n_plus - n_minus) / n_eff
    # +/-1 mean m maps to the proportion (1+m)/2; stderr transforms by 2x.
    phat = (1.0 + m) / 2.0
    stderr = 2.0 * math.sqrt(phat * (1.0 - phat) / n_eff)
    return StratumEstimate(estimate=m, stderr=stderr, n_eff=n_eff)


def estimate(batch: SampleBatch) -> EstimateReport:
    """Empirical pre/post shifts and the 3-sigma anomalous-shift test."""
    c = batch.counts

    pre_hat: dict[int, Optional[StratumEstimate]] = {}
    for psi in SIGNS:
        n_plus = c[index_of(psi, 1, 1)] + c[index_of(psi, 1, -1)]
        n_minus = c[index_of(psi, -1, 1)] + c[index_of(psi, -1, -1)]
        pre_hat[psi] = _mean_estimate(n_plus, n_minus)

    post_hat: dict[tuple[int, int], Optional[StratumEstimate]] = {}
    apss_z = -math.inf
    for psi in SIGNS:
        for phi in SIGNS:
            est = _mean_estimate(c[index_of(psi, 1, phi)], c[index_of(psi, -1, phi)])
            post_hat[(psi, phi)] = est
            pre = pre_hat[psi]
            if est is None or pre is None:
                continue
            diff = abs(est.estimate) - abs(pre.estimate)
            combined = math.hypot(est.stderr, pre.stderr)
            if combined > 0.0:
                z = diff / combined
            else:
                z = math.inf if diff > 0.0 else 0.0
            apss_z = max(apss_z, z)

    return EstimateReport(
        pre_hat=pre_hat,
        post_hat=post_hat,
        apss_z=apss_z,
        apss_detected=apss_z > DETECTION_SIGMA,
    )


def write_batch_csv(batch: SampleBatch, fh: TextIO) -> None:
    """Export counts as CSV with columns (psi, s, phi, count)."""
    writer = csv.writer(fh)
    writer.writerow(["psi", "s", "phi", "count"])
    for o, count in zip(OUTCOMES, batch.counts):
        writer.writerow([o.psi, o.s, o.phi, count])
