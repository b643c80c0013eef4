"""Aggregation of per-drop results into scheme-level statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from femtorelay.config import Scheme


@dataclass(frozen=True)
class MueRecord:
    mue_id: int
    relay_fbs: int | None
    theta: float
    power_dbm: float
    rate_coarse: float
    rate_fine: float
    rate_total: float
    delay_coarse: float
    delay_fine: float
    delay_total: float
    utility: float


@dataclass(frozen=True)
class DropResult:
    sweep_point: str
    scheme: Scheme
    drop: int
    mues: tuple[MueRecord, ...]
    converged: bool = True
    iterations: int = 0


class EmpiricalCDF:
    """Empirical distribution of a sample; ``quantile(q)`` is the ceil(qN)-th order statistic."""

    def __init__(self, samples):
        values = np.sort(np.asarray(samples, dtype=float))
        if values.size == 0:
            raise ValueError("empirical CDF needs at least one sample")
        self.values = values

    def __len__(self):
        return self.values.size

    def quantile(self, q: float) -> float:
        if not 0.0 <= q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        k = max(1, math.ceil(q * len(self)))
        return float(self.values[k - 1])

    def __call__(self, x) -> float:
        """Fraction of samples <= x."""
        return float(np.searchsorted(self.values, x, side="right")) / len(self)

    def points(self):
        """(value, cdf) steps; one per sample."""
        n = len(self)
        return [(float(v), (i + 1) / n) for i, v in enumerate(self.values)]

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))


def empirical_cdf(samples) -> EmpiricalCDF:
    return EmpiricalCDF(samples)


def improvement_ratio(proposed_mean: float, classical_mean: float, metric: str = "rate") -> float:
    """proposed/classical for rates and utilities; classical/proposed for delays (a reduction factor)."""
    if metric == "delay":
        if proposed_mean <= 0:
            raise ZeroDivisionError("proposed mean delay must be positive")
        return classical_mean / proposed_mean
    if classical_mean <= 0:
        raise ZeroDivisionError("classical mean must be positive")
    return proposed_mean / classical_mean


@dataclass(frozen=True)
class SchemeSummary:
    scheme: Scheme
    drop_count: int
    converged_drops: int
    samples: int
    unstable: int  # MUE samples with an unstable queue (infinite delay)
    mean_utility: float
    mean_rate: float
    mean_delay: float  # over stable samples only
    rate_cdf: EmpiricalCDF
    delay_cdf: EmpiricalCDF | None

    @property
    def unconverged_fraction(self) -> float:
        return 1.0 - self.converged_drops / self.drop_count


@dataclass(frozen=True)
class ExperimentSummary:
    schemes: dict
    ratios: dict = field(default_factory=dict)  # scheme -> {"rate", "delay", "utility"}
    drop_count: int = 0

    @property
    def unconverged_fraction(self) -> float:
        total = sum(s.drop_count for s in self.schemes.values())
        bad = sum(s.drop_count - s.converged_drops for s in self.schemes.values())
        return bad / total if total else 0.0

    def best_scheme(self) -> Scheme:
        return max(self.schemes.values(), key=lambda s: (s.mean_utility, -list(Scheme).index(s.scheme))).scheme


def _scheme_summary(scheme: Scheme, drops) -> SchemeSummary:
    kept = [d for d in drops if d.converged]
    if not kept:
        raise ValueError(f"{scheme.value}: all {len(drops)} drops unconverged; nothing to summarise")
    recs = [r for d in kept for r in d.mues]
    rates = [r.rate_total for r in recs]
    delays = [r.delay_total for r in recs if math.isfinite(r.delay_total)]
    return SchemeSummary(
        scheme=scheme,
        drop_count=len(drops),
        converged_drops=len(kept),
        samples=len(recs),
        unstable=len(recs) - len(delays),
        mean_utility=float(np.mean([r.utility for r in recs])),
        mean_rate=float(np.mean(rates)),
        mean_delay=float(np.mean(delays)) if delays else math.inf,
        rate_cdf=EmpiricalCDF(rates),
        delay_cdf=EmpiricalCDF(delays) if delays else None,
    )


def summarize(drops) -> ExperimentSummary:
    """Pool per-MUE samples of converged drops, per scheme.

    Means are sample means over the pooled MUEs; delay statistics skip
    unstable samples, which are counted instead. Ratios compare each relaying
    scheme with CLA when both are present.
    """
    drops = list(drops)
    if not drops:
        raise ValueError("no drops to summarise")
    by_scheme: dict[Scheme, list[DropResult]] = {}
    for d in drops:
        by_scheme.setdefault(Scheme(d.scheme), []).append(d)
    schemes = {s: _scheme_summary(s, by_scheme[s]) for s in Scheme if s in by_scheme}
    ratios = {}
    cla = schemes.get(Scheme.CLA)
    if cla is not None:
        for s, summ in schemes.items():
            if s is Scheme.CLA:
                continue
            ratios[s] = {
                "rate": _safe_ratio(summ.mean_rate, cla.mean_rate, "rate"),
                "delay": _safe_ratio(summ.mean_delay, cla.mean_delay, "delay"),
                "utility": _safe_ratio(summ.mean_utility, cla.mean_utility, "utility"),
            }
    n_drops = len({(d.sweep_point, d.drop) for d in drops})
    return ExperimentSummary(schemes, ratios, n_drops)


def _safe_ratio(p, c, metric):
    if not (math.isfinite(p) and math.isfinite(c)):
        return math.nan
    try:
        return improvement_ratio(p, c, metric)
    except ZeroDivisionError:
        return math.nan
