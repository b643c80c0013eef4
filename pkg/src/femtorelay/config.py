"""Scenario parameters shared by every module."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field


class Scheme(str, enum.Enum):
    CLA = "CLA"  # classical: direct link only, no tier cooperation
    WRD = "WRD"  # rate splitting relayed over wired backhaul
    OTA = "OTA"  # rate splitting relayed over wireless backhaul


class ConfigError(ValueError):
    """Invalid configuration. ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class UnknownKeyError(ConfigError):
    pass


class RangeError(ConfigError):
    pass


class MissingFieldError(ConfigError):
    pass


def dbm_to_watt(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(w):
    return 10.0 * math.log10(w) + 30.0


def _default_theta_grid() -> tuple[float, ...]:
    return tuple(round(0.1 * k, 10) for k in range(10))


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical, traffic and game parameters of one scenario.

    Powers are in dBm, rates and capacities in bits/s, distances in metres.
    ``power_grid`` holds fractions of ``max_tx_power_dbm`` (linear scale).
    """

    macro_radius_m: float = 400.0
    femto_radius_m: float = 20.0
    num_mues: int = 5
    num_fbs: int = 80
    num_subchannels: int = 50
    max_tx_power_dbm: float = 20.0
    fue_power_dbm: float = 20.0
    fbs_power_dbm: float = 20.0
    noise_dbm: float = -130.0
    shadow_std_db: float = 10.0
    wall_loss_db: float = 12.0
    lambda_mue: float = 150e3
    lambda_fue: float = 150e3
    superframe_frames: int = 10
    delta: float = 0.5
    nu: float = 0.5
    wired_total_capacity: float = 37.5e6
    num_ota_channels: int = 32
    subchannel_bandwidth_hz: float = 180e3
    theta_grid: tuple[float, ...] = field(default_factory=_default_theta_grid)
    power_grid: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)
    # outdoor macro link: intercept + slope*log10(d_km)
    outdoor_pl_intercept_db: float = 128.1
    outdoor_pl_slope_db: float = 37.6
    # femtocell link: intercept + slope*log10(d_m)
    indoor_pl_intercept_db: float = 38.46
    indoor_pl_slope_db: float = 20.0
    min_distance_m: float = 1.0
    relaying: bool = True
    traffic_split: str = "proportional"  # or "duplicate"
    cross_mue_interference: bool = False
    fine_decoding: str = "coarse_as_noise"  # or "sic": relay strips the coarse message when it can decode it
    ota_interferers: str = "all"  # or "relays": only FBSs claimed in discovery use the OTA backhaul
    max_iterations: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta_grid", tuple(float(t) for t in self.theta_grid))
        object.__setattr__(self, "power_grid", tuple(float(p) for p in self.power_grid))
        self.validate()

    def validate(self) -> None:
        for key in ("macro_radius_m", "femto_radius_m", "lambda_mue", "lambda_fue",
                    "wired_total_capacity", "subchannel_bandwidth_hz", "min_distance_m"):
            val = getattr(self, key)
            if not (val > 0 and math.isfinite(val)):
                raise RangeError(key, f"must be strictly positive, got {val!r}")
        if self.shadow_std_db < 0:
            raise RangeError("shadow_std_db", "must be non-negative")
        if self.wall_loss_db < 0:
            raise RangeError("wall_loss_db", "must be non-negative")
        for key in ("num_mues", "num_fbs", "num_subchannels", "num_ota_channels",
                    "superframe_frames", "max_iterations"):
            val = getattr(self, key)
            if isinstance(val, bool) or not isinstance(val, int) or val < 1:
                raise RangeError(key, f"must be an integer >= 1, got {val!r}")
        if not 0.0 < self.delta < 1.0:
            raise RangeError("delta", f"must lie in (0, 1), got {self.delta!r}")
        if not 0.0 < self.nu <= 1.0:
            raise RangeError("nu", f"must lie in (0, 1], got {self.nu!r}")
        if not self.theta_grid:
            raise RangeError("theta_grid", "must not be empty")
        if any(not 0.0 <= t < 1.0 for t in self.theta_grid):
            raise RangeError("theta_grid", "every value must satisfy 0 <= theta < 1")
        if list(self.theta_grid) != sorted(set(self.theta_grid)):
            raise RangeError("theta_grid", "must be strictly increasing")
        if not self.power_grid:
            raise RangeError("power_grid", "must not be empty")
        if any(not 0.0 < p <= 1.0 for p in self.power_grid):
            raise RangeError("power_grid", "fractions of max power must lie in (0, 1]")
        if list(self.power_grid) != sorted(set(self.power_grid)):
            raise RangeError("power_grid", "must be strictly increasing")
        if self.fue_power_dbm > self.max_tx_power_dbm:
            raise RangeError("fue_power_dbm", "exceeds max_tx_power_dbm")
        if self.fbs_power_dbm > self.max_tx_power_dbm:
            raise RangeError("fbs_power_dbm", "exceeds max_tx_power_dbm")
        if self.fine_decoding not in ("coarse_as_noise", "sic"):
            raise RangeError("fine_decoding", "must be 'coarse_as_noise' or 'sic'")
        if self.ota_interferers not in ("all", "relays"):
            raise RangeError("ota_interferers", "must be 'all' or 'relays'")
        if self.traffic_split not in ("proportional", "duplicate"):
            raise RangeError("traffic_split", "must be 'proportional' or 'duplicate'")

    # derived linear quantities

    @property
    def noise_w(self) -> float:
        return dbm_to_watt(self.noise_dbm)

    @property
    def max_power_w(self) -> float:
        return dbm_to_watt(self.max_tx_power_dbm)

    @property
    def power_levels_w(self) -> tuple[float, ...]:
        return tuple(f * self.max_power_w for f in self.power_grid)

    @property
    def wired_share(self) -> float:
        """Per-FBS wired capacity C_f in bits/s (equal split of the total)."""
        return self.wired_total_capacity / self.num_fbs

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["theta_grid"] = list(self.theta_grid)
        out["power_grid"] = list(self.power_grid)
        return out

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in dataclasses.fields(cls)}
