"""Uplink rate-splitting relaying over wired and over-the-air femtocell backhauls."""

from femtorelay.config import ConfigError, ScenarioConfig, Scheme

__all__ = ["ConfigError", "ScenarioConfig", "Scheme"]
__version__ = "0.1.0"
