"""Network-formation game among MUEs.

Phase I claims one relay FBS per MUE by RSSI. Phase II runs sequential best
response over (theta, power) in a seeded random order each round until a
round changes nothing. Phase III is just the evaluation of the final
profile (:func:`evaluate_profile`).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from femtorelay import rates as R
from femtorelay.config import ScenarioConfig, Scheme
from femtorelay.queueing import DelayReport, md1_delay, md1_kernel, split_delays, traffic_split
from femtorelay.rates import PowerProfile, RateBreakdown
from femtorelay.topology import Topology, rssi_dbm

log = logging.getLogger(__name__)

NASH_TOL = 1e-9


@dataclass(frozen=True)
class Action:
    relay_fbs: int | None
    theta_index: int
    power_index: int


@dataclass(frozen=True)
class GameState:
    actions: tuple[Action, ...]
    scheme: Scheme
    iteration: int
    converged: bool
    utility_trace: tuple[tuple[float, ...], ...] = ()


@dataclass(frozen=True)
class NashCertificate:
    is_nash: bool
    max_gain: float  # largest improvement over the checked deviation space
    phase2_gain: float  # (theta, power) deviations, relay fixed
    relay_gain: float  # deviations to an unclaimed FBS; nan when not checked
    gains: tuple[float, ...] = field(default=())

    def __bool__(self):
        return self.is_nash


@dataclass(frozen=True)
class MueOutcome:
    rates: RateBreakdown
    delays: DelayReport
    utility: float


def utility_value(rate, delay, delta: float):
    """rate^delta / delay^(1-delta); zero wherever the delay is infinite."""
    rate = np.asarray(rate, dtype=float)
    delay = np.asarray(delay, dtype=float)
    ok = np.isfinite(delay) & (delay > 0)
    safe = np.where(ok, delay, 1.0)
    u = np.where(ok, np.power(rate, delta) / np.power(safe, 1.0 - delta), 0.0)
    return u if u.ndim else float(u)


def initial_profile(relays, cfg: ScenarioConfig) -> tuple[Action, ...]:
    """Everyone transmits directly at full power, with no split."""
    t0 = cfg.theta_grid.index(0.0) if 0.0 in cfg.theta_grid else 0
    top = len(cfg.power_grid) - 1
    return tuple(Action(f, t0, top) for f in relays)


def profile_powers(actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme) -> PowerProfile:
    base = PowerProfile.default(topology, cfg)
    levels = cfg.power_levels_w
    cla = Scheme(scheme) is Scheme.CLA
    backhaul = base.fbs_backhaul_powers
    if cfg.ota_interferers == "relays":
        relays = {a.relay_fbs for a in actions}
        backhaul = tuple(p if f in relays else 0.0 for f, p in enumerate(backhaul))
    return PowerProfile(
        mue_power=tuple(levels[a.power_index] for a in actions),
        theta=tuple(0.0 if cla else cfg.theta_grid[a.theta_index] for a in actions),
        fue_powers=base.fue_powers,
        fbs_backhaul_powers=backhaul,
    )


def evaluate_mue(m: int, actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme) -> MueOutcome:
    scheme = Scheme(scheme)
    powers = profile_powers(actions, topology, cfg, scheme)
    bw = cfg.subchannel_bandwidth_hz
    if scheme is Scheme.CLA:
        rb = R.scheme_rates(m, None, topology, powers, cfg, scheme)
        delays = DelayReport(md1_delay(cfg.lambda_mue, rb.coarse * bw), 0.0)
    else:
        rb = R.scheme_rates(m, actions[m].relay_fbs, topology, powers, cfg, scheme)
        lam_c, lam_f = traffic_split(cfg.lambda_mue, powers.theta[m], cfg.traffic_split)
        delays = split_delays(float(lam_c), float(lam_f), rb.coarse * bw, rb.fine_access * bw, rb.backhaul_leg * bw)
    return MueOutcome(rb, delays, utility_value(rb.total, delays.total_delay, cfg.delta))


def utility(m: int, actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme) -> float:
    return evaluate_mue(m, actions, topology, cfg, scheme).utility


def evaluate_profile(actions, topology, cfg, scheme) -> tuple[MueOutcome, ...]:
    return tuple(evaluate_mue(m, actions, topology, cfg, scheme) for m in range(len(actions)))


def utility_grid(m: int, actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme,
                 relay_fbs: int | None = None) -> np.ndarray:
    """Utility of every (theta_index, power_index) for MUE ``m``, others held fixed.

    Same arithmetic as :func:`utility`, broadcast over the grid. ``relay_fbs``
    overrides m's current relay.
    """
    scheme = Scheme(scheme)
    if relay_fbs is not None:
        a = actions[m]
        actions = _set(actions, m, Action(relay_fbs, a.theta_index, a.power_index))
    powers = profile_powers(actions, topology, cfg, scheme)
    p = np.asarray(cfg.power_levels_w, dtype=float)[None, :]
    n_theta = len(cfg.theta_grid)
    bw = cfg.subchannel_bandwidth_hz
    i_mbs = R.mbs_interference(m, None, topology, powers)
    g0 = topology.gain_mue_mbs[m]
    if scheme is Scheme.CLA:
        rate = R.shannon(g0 * p, i_mbs, cfg.noise_w)
        u = utility_value(rate, md1_kernel(cfg.lambda_mue, rate * bw), cfg.delta)
        return np.repeat(np.atleast_2d(u), n_theta, axis=0)
    f = actions[m].relay_fbs
    theta = np.asarray(cfg.theta_grid, dtype=float)[:, None]
    coarse = R.coarse_kernel(g0, theta, p, i_mbs, cfg.noise_w)
    access = R.fine_access_kernel(topology.gain_mue_fbs[m, f], theta, p,
                                  R.relay_interference(m, f, None, topology, powers, cfg), cfg.noise_w,
                                  coarse if cfg.fine_decoding == "sic" else None)
    leg = R.backhaul_leg(f, scheme, topology, powers, cfg)
    fine = R.relayed_kernel(access, leg)
    lam_c, lam_f = traffic_split(cfg.lambda_mue, theta, cfg.traffic_split)
    d_coarse = md1_kernel(lam_c, coarse * bw)
    d_fine = md1_kernel(lam_f, access * bw) + md1_kernel(lam_f, leg * bw)
    return utility_value(coarse + fine, np.maximum(d_coarse, d_fine), cfg.delta)


def discover_femtocells(topology: Topology, cfg: ScenarioConfig) -> tuple[int, ...]:
    """Phase I: in id order, each MUE claims its strongest unclaimed FBS."""
    M, F = topology.num_mues, topology.num_fbs
    if F < M:
        raise ValueError(f"need at least one FBS per MUE (F={F} < M={M})")
    claimed: set[int] = set()
    relays = []
    for m in range(M):
        levels = [rssi_dbm(m, f, topology, cfg) for f in range(F)]
        order = sorted(range(F), key=lambda f: (-levels[f], f))
        pick = next(f for f in order if f not in claimed)
        claimed.add(pick)
        relays.append(pick)
    return tuple(relays)


def best_response(m: int, actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme) -> Action:
    """Utility-maximising (theta, power) for ``m`` with its relay fixed.

    Ties go to the lowest theta index, then the lowest power index.
    """
    grid = utility_grid(m, actions, topology, cfg, scheme)
    ti, pi = np.unravel_index(int(np.argmax(grid)), grid.shape)
    return Action(actions[m].relay_fbs, int(ti), int(pi))


def _set(actions, m, action):
    out = list(actions)
    out[m] = action
    return tuple(out)


def run_game(topology: Topology, cfg: ScenarioConfig, scheme: Scheme, seed: int = 0,
             relays=None) -> GameState:
    """Phases I and II. Non-convergence within ``cfg.max_iterations`` rounds is reported, not raised."""
    scheme = Scheme(scheme)
    if relays is None:
        relays = discover_femtocells(topology, cfg) if scheme is not Scheme.CLA else (None,) * topology.num_mues
    actions = initial_profile(relays, cfg)
    rng = np.random.default_rng(seed)
    trace = []
    converged = False
    rounds = 0
    while rounds < cfg.max_iterations:
        rounds += 1
        changed = False
        for m in rng.permutation(topology.num_mues):
            m = int(m)
            new = best_response(m, actions, topology, cfg, scheme)
            if new != actions[m]:
                actions = _set(actions, m, new)
                changed = True
        trace.append(tuple(utility(m, actions, topology, cfg, scheme) for m in range(topology.num_mues)))
        if not changed:
            converged = True
            break
    if not converged:
        log.info("best response did not settle after %d rounds (%s)", rounds, scheme.value)
    return GameState(actions, scheme, rounds, converged, tuple(trace))


def is_nash(actions, topology: Topology, cfg: ScenarioConfig, scheme: Scheme,
            include_relays: bool = True, tol: float = NASH_TOL) -> NashCertificate:
    """Check every unilateral deviation; relay moves go to FBSs no other MUE holds.

    A deviation counts when it beats the current utility by more than
    ``tol * max(1, |u|)``.
    """
    scheme = Scheme(scheme)
    gains = []
    phase2 = 0.0
    relay_gain = 0.0 if include_relays and scheme is not Scheme.CLA else float("nan")
    verdict = True
    for m, a in enumerate(actions):
        u = utility(m, actions, topology, cfg, scheme)
        scale = tol * max(1.0, abs(u))
        g2 = float(np.max(utility_grid(m, actions, topology, cfg, scheme))) - u
        best = g2
        if include_relays and scheme is not Scheme.CLA:
            held = {b.relay_fbs for i, b in enumerate(actions) if i != m}
            for f in range(topology.num_fbs):
                if f in held or f == a.relay_fbs:
                    continue
                gf = float(np.max(utility_grid(m, actions, topology, cfg, scheme, relay_fbs=f))) - u
                relay_gain = max(relay_gain, gf)
                best = max(best, gf)
        phase2 = max(phase2, g2)
        gains.append(best)
        if best > scale:
            verdict = False
    max_gain = max(phase2, relay_gain) if include_relays and scheme is not Scheme.CLA else phase2
    return NashCertificate(verdict, max_gain, phase2, relay_gain, tuple(gains))


def pure_nash_profiles(relays, topology: Topology, cfg: ScenarioConfig, scheme: Scheme,
                       tol: float = NASH_TOL) -> list[tuple[Action, ...]]:
    """Every pure Nash profile of the Phase II game, by exhaustive enumeration.

    Uses only scalar :func:`utility` calls; exponential in the number of MUEs.
    """
    grid = list(itertools.product(range(len(cfg.theta_grid)), range(len(cfg.power_grid))))
    per_mue = [[Action(f, t, p) for t, p in grid] for f in relays]
    found = []
    for profile in itertools.product(*per_mue):
        stable = True
        for m in range(len(relays)):
            u = utility(m, profile, topology, cfg, scheme)
            for alt in per_mue[m]:
                if utility(m, _set(profile, m, alt), topology, cfg, scheme) > u + tol * max(1.0, abs(u)):
                    stable = False
                    break
            if not stable:
                break
        if stable:
            found.append(tuple(profile))
    return found
