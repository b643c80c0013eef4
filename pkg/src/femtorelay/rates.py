"""Link rates for the classical, wired-backhaul and OTA-backhaul schemes.

Spectral efficiencies are in bits/s/Hz. The kernels at the top broadcast over
numpy arrays so the game can score a whole action grid at once; the
topology-level functions below them evaluate one MUE of one profile.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from femtorelay.config import ScenarioConfig, Scheme, dbm_to_watt
from femtorelay.topology import Topology

MBS = -1  # receiver id of the macro base station


def shannon(signal, interference, noise):
    return np.log2(1.0 + signal / (noise + interference))


def coarse_kernel(gain_direct, theta, power, interference, noise):
    return shannon(gain_direct * (1.0 - theta) * power, interference, noise)


def fine_access_kernel(gain_relay, theta, power, interference, noise, coarse=None):
    """Fine-message rate at the relay.

    The own coarse message is undecoded interference, unless ``coarse`` (the
    coarse rate the MBS decodes) is given and the relay can decode that rate
    too, in which case it is cancelled first.
    """
    fine_sig = gain_relay * theta * power
    noisy = shannon(fine_sig, gain_relay * (1.0 - theta) * power + interference, noise)
    if coarse is None:
        return noisy
    coarse_at_relay = shannon(gain_relay * (1.0 - theta) * power, interference + fine_sig, noise)
    return np.where(coarse_at_relay >= coarse, shannon(fine_sig, interference, noise), noisy)


def relayed_kernel(fine_access, backhaul):
    return 0.5 * np.minimum(fine_access, backhaul)


@dataclass(frozen=True)
class PowerProfile:
    """Transmit powers (watts) and power splits of every transmitter."""

    mue_power: tuple[float, ...]
    theta: tuple[float, ...]
    fue_powers: tuple[float, ...]
    fbs_backhaul_powers: tuple[float, ...]

    def coarse_power(self, m: int) -> float:
        return (1.0 - self.theta[m]) * self.mue_power[m]

    def fine_power(self, m: int) -> float:
        return self.theta[m] * self.mue_power[m]

    def with_mue(self, m: int, power: float, theta: float) -> "PowerProfile":
        p = list(self.mue_power)
        t = list(self.theta)
        p[m], t[m] = power, theta
        return replace(self, mue_power=tuple(p), theta=tuple(t))

    @classmethod
    def default(cls, topology: Topology, cfg: ScenarioConfig) -> "PowerProfile":
        """Every MUE at full power with no split; FUEs and FBSs at their configured power."""
        return cls(
            mue_power=(cfg.max_power_w,) * topology.num_mues,
            theta=(0.0,) * topology.num_mues,
            fue_powers=(dbm_to_watt(cfg.fue_power_dbm),) * topology.num_fbs,
            fbs_backhaul_powers=(dbm_to_watt(cfg.fbs_power_dbm),) * topology.num_fbs,
        )


@dataclass(frozen=True)
class RateBreakdown:
    scheme: Scheme
    coarse: float
    fine: float
    relay_fbs: int | None = None
    fine_access: float = 0.0  # R_{mf,F}, unhalved
    backhaul_leg: float = 0.0  # spectral efficiency available to the fine message, nu*R2
    degenerate: bool = False  # theta > 0 but the relay cannot decode any fine rate

    @property
    def total(self) -> float:
        return self.coarse + self.fine


def aggregate_fue_interference(receiver: int, n: int, exclude, topology: Topology,
                               powers: PowerProfile) -> float:
    """Sum of |h_j,rx|^2 P_j over FUEs j in K^n, skipping ``exclude``."""
    fues = [int(j) for j in topology.active_fues(n) if int(j) not in set(exclude)]
    if not fues:
        return 0.0
    p = np.asarray(powers.fue_powers)[fues]
    if receiver == MBS:
        g = topology.gain_fue_mbs[fues]
    else:
        g = topology.gain_fue_fbs[fues, receiver]
    return float(np.sum(g * p))


def cross_mue_interference(m: int, f: int, topology: Topology, powers: PowerProfile) -> float:
    """Coarse-message power of the other MUEs on m's sub-channel, received at FBS ``f``."""
    n = topology.mue_subchannel[m]
    total = 0.0
    for j in topology.mues_on(n):
        if j != m:
            total += topology.gain_mue_fbs[j, f] * powers.coarse_power(j)
    return float(total)


def _subchannel(m, n, topology):
    return int(topology.mue_subchannel[m]) if n is None else n


def mbs_interference(m: int, n: int | None, topology: Topology, powers: PowerProfile) -> float:
    return aggregate_fue_interference(MBS, _subchannel(m, n, topology), (), topology, powers)


def relay_interference(m: int, f: int, n: int | None, topology: Topology, powers: PowerProfile,
                       cfg: ScenarioConfig) -> float:
    """Interference at relay ``f`` while it decodes m's fine message (own FUE removed by SIC)."""
    i = aggregate_fue_interference(f, _subchannel(m, n, topology), (f,), topology, powers)
    if cfg.cross_mue_interference:
        i += cross_mue_interference(m, f, topology, powers)
    return i


def classical_mue_rate(m: int, n: int | None, topology: Topology, powers: PowerProfile,
                       cfg: ScenarioConfig) -> float:
    return float(shannon(topology.gain_mue_mbs[m] * powers.mue_power[m],
                         mbs_interference(m, n, topology, powers), cfg.noise_w))


def classical_fue_rate(k: int, f: int, n: int, topology: Topology, powers: PowerProfile,
                       backhaul_share: float, cfg: ScenarioConfig, mue: int | None = None) -> float:
    """FUE ``k`` uplink to FBS ``f`` in bits/s, capped by the wired share C_f (bits/s).

    ``mue`` is the macro user active on ``n`` in this slot; by default the
    first MUE scheduled on that sub-channel, if any.
    """
    interference = aggregate_fue_interference(f, n, (k,), topology, powers)
    if mue is None:
        on_n = topology.mues_on(n)
        mue = int(on_n[0]) if len(on_n) else None
    if mue is not None:
        interference += topology.gain_mue_fbs[mue, f] * powers.mue_power[mue]
    access = cfg.subchannel_bandwidth_hz * float(
        shannon(topology.gain_fue_fbs[k, f] * powers.fue_powers[k], interference, cfg.noise_w))
    return min(access, backhaul_share)


def ota_backhaul_rate(f: int, n: int | None, topology: Topology, powers: PowerProfile,
                      cfg: ScenarioConfig) -> float:
    """R_f0: FBS ``f`` to MBS over its OTA backhaul channel, co-channel FBSs interfering.

    ``n`` is accepted for symmetry with the access-link functions; backhaul
    channels are fixed per FBS by the topology.
    """
    others = topology.co_channel_fbs(f)
    p = np.asarray(powers.fbs_backhaul_powers)
    interference = float(np.sum(topology.gain_fbs_mbs[others] * p[others])) if len(others) else 0.0
    return float(shannon(topology.gain_fbs_mbs[f] * p[f], interference, cfg.noise_w))


def coarse_rate(m: int, n: int | None, theta: float, topology: Topology, powers: PowerProfile,
                cfg: ScenarioConfig, scheme: Scheme | None = None) -> float:
    """Direct-link rate of the coarse message; the same for both backhaul types."""
    return float(coarse_kernel(topology.gain_mue_mbs[m], theta, powers.mue_power[m],
                               mbs_interference(m, n, topology, powers), cfg.noise_w))


def fine_access_rate(m: int, f: int, n: int | None, theta: float, topology: Topology,
                     powers: PowerProfile, cfg: ScenarioConfig) -> float:
    coarse = None
    if cfg.fine_decoding == "sic":
        coarse = coarse_rate(m, n, theta, topology, powers, cfg)
    return float(fine_access_kernel(topology.gain_mue_fbs[m, f], theta, powers.mue_power[m],
                                    relay_interference(m, f, n, topology, powers, cfg), cfg.noise_w, coarse))


def backhaul_leg(f: int, scheme: Scheme, topology: Topology, powers: PowerProfile,
                 cfg: ScenarioConfig) -> float:
    """nu * R2 in bits/s/Hz: the backhaul rate reserved for relayed fine messages."""
    scheme = Scheme(scheme)
    if scheme is Scheme.OTA:
        return cfg.nu * ota_backhaul_rate(f, None, topology, powers, cfg)
    if scheme is Scheme.WRD:
        return cfg.nu * cfg.wired_share / cfg.subchannel_bandwidth_hz
    raise ValueError("the classical scheme has no relayed leg")


def relayed_fine_rate(m: int, f: int, n: int | None, theta: float, topology: Topology,
                      powers: PowerProfile, cfg: ScenarioConfig, scheme: Scheme) -> float:
    """Half-duplex decode-and-forward rate of the fine message."""
    access = fine_access_rate(m, f, n, theta, topology, powers, cfg)
    return float(relayed_kernel(access, backhaul_leg(f, scheme, topology, powers, cfg)))


def scheme_rates(m: int, relay_fbs: int | None, topology: Topology, powers: PowerProfile,
                 cfg: ScenarioConfig, scheme: Scheme) -> RateBreakdown:
    """Coarse/fine rate breakdown of MUE ``m`` under ``powers``.

    ``powers`` carries every MUE's (P, theta), which matters only for the
    optional cross-MUE interference term.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.CLA:
        return RateBreakdown(scheme, classical_mue_rate(m, None, topology, powers, cfg), 0.0)
    if relay_fbs is None:
        raise ValueError(f"MUE {m} has no relay FBS under {scheme.value}")
    theta = powers.theta[m]
    coarse = coarse_rate(m, None, theta, topology, powers, cfg, scheme)
    access = fine_access_rate(m, relay_fbs, None, theta, topology, powers, cfg)
    leg = backhaul_leg(relay_fbs, scheme, topology, powers, cfg)
    return RateBreakdown(
        scheme=scheme,
        coarse=coarse,
        fine=float(relayed_kernel(access, leg)),
        relay_fbs=relay_fbs,
        fine_access=access,
        backhaul_leg=leg,
        degenerate=bool(theta > 0 and access <= 0.0),
    )
