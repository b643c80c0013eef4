"""Random network drops and large-scale channel gains.

Indices are 0-based. FUE ``k`` is the single user of femtocell ``k`` and
shares that index with its FBS. The MBS sits at the origin.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from femtorelay.config import ConfigError, RangeError, ScenarioConfig


class LinkClass(str, enum.Enum):
    OUTDOOR = "outdoor"
    OUTDOOR_TO_INDOOR = "outdoor-to-indoor"
    INDOOR = "indoor"


def path_loss_db(link_class, distance, cfg: ScenarioConfig | None = None):
    """Path loss in dB for a link of the given class.

    Outdoor links use the macro model ``128.1 + 37.6 log10(d_km)``; indoor
    links the femto model ``38.46 + 20 log10(d_m)``. An outdoor-to-indoor link
    takes the larger of the two and crosses one wall. Works elementwise on
    arrays of distances.
    """
    cfg = cfg or ScenarioConfig()
    link_class = LinkClass(link_class)
    d = np.maximum(np.asarray(distance, dtype=float), cfg.min_distance_m)
    outdoor = cfg.outdoor_pl_intercept_db + cfg.outdoor_pl_slope_db * np.log10(d / 1000.0)
    indoor = cfg.indoor_pl_intercept_db + cfg.indoor_pl_slope_db * np.log10(d)
    if link_class is LinkClass.OUTDOOR:
        pl = outdoor
    elif link_class is LinkClass.INDOOR:
        pl = indoor
    else:
        pl = np.maximum(outdoor, indoor) + cfg.wall_loss_db
    return pl if pl.ndim else float(pl)


def channel_gain(pl_db, shadow_db):
    """Linear power gain |h|^2 from path loss and a shadowing draw, both in dB."""
    g = 10.0 ** (-(np.asarray(pl_db, dtype=float) + shadow_db) / 10.0)
    return g if g.ndim else float(g)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Topology:
    """One drop: node positions, static sub-channel plan and link gains.

    Gains are frequency flat (one shadowing draw per link per drop), so every
    sub-channel sees the same ``|h_ji|^2``.

    Gain arrays
      mue_mbs[m], mue_fbs[m, f], fue_mbs[k], fue_fbs[k, f], fbs_mbs[f].
    """

    mue_positions: np.ndarray
    fbs_positions: np.ndarray
    fue_positions: np.ndarray
    fue_subchannel: np.ndarray
    mue_subchannel: np.ndarray
    ota_channel: np.ndarray
    num_subchannels: int
    gain_mue_mbs: np.ndarray
    gain_mue_fbs: np.ndarray
    gain_fue_mbs: np.ndarray
    gain_fue_fbs: np.ndarray
    gain_fbs_mbs: np.ndarray

    mbs_position = (0.0, 0.0)

    @property
    def num_mues(self) -> int:
        return len(self.mue_positions)

    @property
    def num_fbs(self) -> int:
        return len(self.fbs_positions)

    @property
    def num_nodes(self) -> int:
        return 1 + self.num_mues + 2 * self.num_fbs

    def active_fues(self, n: int) -> np.ndarray:
        """K^n: FUEs transmitting on sub-channel ``n`` (at most one per femtocell)."""
        return np.flatnonzero(self.fue_subchannel == n)

    @property
    def active_fue_sets(self) -> tuple[np.ndarray, ...]:
        return tuple(self.active_fues(n) for n in range(self.num_subchannels))

    def co_channel_fbs(self, f: int) -> np.ndarray:
        """Other FBSs sharing the OTA backhaul channel of ``f``."""
        same = np.flatnonzero(self.ota_channel == self.ota_channel[f])
        return same[same != f]

    def mues_on(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.mue_subchannel == n)

    def __eq__(self, other):
        if not isinstance(other, Topology):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in self.__dataclass_fields__
        )

    __hash__ = None


def _uniform_disk(rng: np.random.Generator, radius: float, size: int) -> np.ndarray:
    r = radius * np.sqrt(rng.random(size))
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def _place_mues(rng, cfg: ScenarioConfig, fbs: np.ndarray) -> np.ndarray:
    # rejection sampling keeps MUEs outside every femto disk
    out = np.empty((cfg.num_mues, 2))
    filled = 0
    for _ in range(10_000):
        cand = _uniform_disk(rng, cfg.macro_radius_m, 4 * (cfg.num_mues - filled) + 4)
        d = np.linalg.norm(cand[:, None, :] - fbs[None, :, :], axis=2)
        ok = cand[(d > cfg.femto_radius_m).all(axis=1)]
        take = ok[: cfg.num_mues - filled]
        out[filled : filled + len(take)] = take
        filled += len(take)
        if filled == cfg.num_mues:
            return out
    raise RuntimeError("could not place MUEs outside the femtocells; macro disk too crowded")


def _distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)


def generate_topology(cfg: ScenarioConfig, seed: int | None = None) -> Topology:
    """Draw one network realisation.

    Placement and shadowing use independent streams spawned from ``seed``
    (``cfg.rng_seed`` when omitted), so the same seed always gives the same
    topology.
    """
    cfg.validate()
    if cfg.relaying and cfg.num_fbs < cfg.num_mues:
        raise RangeError("num_fbs", f"relaying needs num_fbs >= num_mues ({cfg.num_fbs} < {cfg.num_mues})")
    if cfg.num_subchannels < 1:
        raise ConfigError("num_subchannels", "must be >= 1")
    seed = cfg.rng_seed if seed is None else seed
    place_ss, shadow_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(place_ss)
    M, F = cfg.num_mues, cfg.num_fbs

    fbs = _uniform_disk(rng, cfg.macro_radius_m, F)
    fue = fbs + _uniform_disk(rng, cfg.femto_radius_m, F)
    mue = _place_mues(rng, cfg, fbs)
    origin = np.zeros((1, 2))

    pl_mue_mbs = path_loss_db(LinkClass.OUTDOOR, _distances(mue, origin)[:, 0], cfg)
    pl_mue_fbs = path_loss_db(LinkClass.OUTDOOR_TO_INDOOR, _distances(mue, fbs), cfg)
    pl_fue_mbs = path_loss_db(LinkClass.OUTDOOR_TO_INDOOR, _distances(fue, origin)[:, 0], cfg)
    d_fue_fbs = _distances(fue, fbs)
    pl_fue_fbs = path_loss_db(LinkClass.OUTDOOR_TO_INDOOR, d_fue_fbs, cfg)
    own = np.arange(F)
    pl_fue_fbs[own, own] = path_loss_db(LinkClass.INDOOR, d_fue_fbs[own, own], cfg)
    pl_fbs_mbs = path_loss_db(LinkClass.OUTDOOR_TO_INDOOR, _distances(fbs, origin)[:, 0], cfg)

    srng = np.random.default_rng(shadow_ss)
    sd = cfg.shadow_std_db

    def shadowed(pl):
        return channel_gain(pl, srng.normal(0.0, sd, np.shape(pl)))

    return Topology(
        mue_positions=_frozen(mue),
        fbs_positions=_frozen(fbs),
        fue_positions=_frozen(fue),
        fue_subchannel=_frozen_int(np.arange(F) % cfg.num_subchannels),
        mue_subchannel=_frozen_int(np.arange(M) % cfg.num_subchannels),
        ota_channel=_frozen_int(np.arange(F) % cfg.num_ota_channels),
        num_subchannels=cfg.num_subchannels,
        gain_mue_mbs=_frozen(shadowed(pl_mue_mbs)),
        gain_mue_fbs=_frozen(shadowed(pl_mue_fbs)),
        gain_fue_mbs=_frozen(shadowed(pl_fue_mbs)),
        gain_fue_fbs=_frozen(shadowed(pl_fue_fbs)),
        gain_fbs_mbs=_frozen(shadowed(pl_fbs_mbs)),
    )


def _frozen_int(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def rssi_dbm(mue: int, fbs: int, topology: Topology, cfg: ScenarioConfig) -> float:
    """Pilot RSSI of ``fbs`` seen by ``mue`` (reciprocal link, max power pilot)."""
    return cfg.max_tx_power_dbm + 10.0 * math.log10(topology.gain_mue_fbs[mue, fbs])


rssi = rssi_dbm
