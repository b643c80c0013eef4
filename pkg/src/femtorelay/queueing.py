"""M/D/1 waiting delays for direct and relayed flows.

Arrival and service rates share one unit (bits/s). An unstable queue
(service rate not above the arrival rate) has infinite delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def md1_kernel(lam, rate):
    """Elementwise M/D/1 mean wait; 0 where no traffic, inf where unstable."""
    lam = np.asarray(lam, dtype=float)
    rate = np.asarray(rate, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = lam / (2.0 * rate * (rate - lam))
    d = np.where(rate > lam, d, np.inf)
    return np.where(lam == 0.0, 0.0, d)


def md1_delay(lam: float, rate: float) -> float:
    """``lam / (2 R (R - lam))`` for R > lam, ``math.inf`` otherwise."""
    if lam < 0:
        raise ValueError("arrival rate must be non-negative")
    if lam == 0:
        return 0.0
    if rate <= lam:
        return math.inf
    return lam / (2.0 * rate * (rate - lam))


@dataclass(frozen=True)
class DelayReport:
    coarse_delay: float
    fine_delay: float

    @property
    def total_delay(self) -> float:
        # every packet, coarse or fine, has to reach the MBS
        return max(self.coarse_delay, self.fine_delay)

    @property
    def coarse_stable(self) -> bool:
        return math.isfinite(self.coarse_delay)

    @property
    def fine_stable(self) -> bool:
        return math.isfinite(self.fine_delay)

    @property
    def stable(self) -> bool:
        return self.coarse_stable and self.fine_stable


def traffic_split(lam: float, theta, mode: str = "proportional"):
    """Arrival rates (coarse, fine) of an MUE generating ``lam`` bits/s.

    ``proportional`` splits traffic like the power; ``duplicate`` feeds the
    full rate to both messages whenever the fine message exists.
    """
    theta = np.asarray(theta, dtype=float)
    if mode == "proportional":
        return (1.0 - theta) * lam, theta * lam
    if mode == "duplicate":
        return np.full_like(theta, lam), np.where(theta > 0, lam, 0.0)
    raise ValueError(f"unknown traffic split {mode!r}")


def split_delays(lam_coarse: float, lam_fine: float, coarse_rate: float, r1: float, r2: float) -> DelayReport:
    """Coarse delay over the direct link; fine delay summed over access and backhaul hops."""
    fine = md1_delay(lam_fine, r1) + md1_delay(lam_fine, r2)
    return DelayReport(md1_delay(lam_coarse, coarse_rate), fine)


def md1_sim_oracle(lam: float, service_rate: float, num_packets: int = 10**6, seed: int = 0) -> float:
    """Empirical mean waiting time of a simulated M/D/1 queue.

    Poisson arrivals at ``lam``, deterministic service ``1/service_rate``. Waits
    follow the Lindley recursion ``W_{n+1} = max(0, W_n + S - A_{n+1})``,
    evaluated in closed form as the running cumsum minus its running minimum.
    """
    if not lam > 0 or service_rate <= lam:
        raise ValueError(f"unstable or degenerate queue: lam={lam}, service_rate={service_rate}")
    if num_packets < 2:
        raise ValueError("need at least two packets")
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(1.0 / lam, num_packets - 1)
    steps = np.concatenate([[0.0], np.cumsum(1.0 / service_rate - gaps)])
    waits = steps - np.minimum.accumulate(steps)
    return float(waits.mean())


def md1_sim_loop(lam: float, service_rate: float, num_packets: int, seed: int = 0) -> float:
    """Event-by-event version of :func:`md1_sim_oracle`; slow, for cross-checks."""
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(1.0 / lam, num_packets - 1)
    service = 1.0 / service_rate
    w = 0.0
    total = 0.0
    for a in gaps:
        w = max(0.0, w + service - a)
        total += w
    return total / num_packets
