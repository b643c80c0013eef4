import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from femtorelay.config import Scheme
from femtorelay.metrics import DropResult, EmpiricalCDF, MueRecord, improvement_ratio, summarize


def rec(m=0, rate=1.0, delay=0.1, u=None, theta=0.0):
    u = rate ** 0.5 / delay ** 0.5 if u is None else u
    return MueRecord(m, None, theta, 20.0, rate, 0.0, rate, delay, 0.0, delay, u)


def drop(scheme, d, recs, converged=True, point="p"):
    return DropResult(point, scheme, d, tuple(recs), converged, 1)


def test_cdf_examples():
    assert EmpiricalCDF([3, 1, 2]).quantile(0.5) == 2
    c = EmpiricalCDF([4.0] * 5)
    assert c(3.99) == 0.0 and c(4.0) == 1.0
    c = EmpiricalCDF(np.random.default_rng(0).uniform(size=10_000))
    assert abs(c.quantile(0.9) - 0.9) <= 0.02
    with pytest.raises(ValueError):
        EmpiricalCDF([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200), st.floats(0, 1), st.floats(0, 1))
def test_cdf_properties(xs, q1, q2):
    c = EmpiricalCDF(xs)
    lo, hi = sorted((q1, q2))
    assert min(xs) <= c.quantile(lo) <= c.quantile(hi) <= max(xs)
    pts = c.points()
    assert all(a[0] <= b[0] and a[1] < b[1] for a, b in zip(pts, pts[1:]))
    assert pts[-1][1] == 1.0
    assert c(c.quantile(hi)) >= hi - 1e-12


def test_improvement_ratio_examples():
    assert improvement_ratio(2.25, 1.0, "rate") == 2.25
    assert improvement_ratio(3.0, 3.0) == 1.0
    assert improvement_ratio(0.1, 1.0, "delay") == pytest.approx(10.0)
    with pytest.raises(ZeroDivisionError):
        improvement_ratio(1.0, 0.0)


def test_singleton_summary():
    s = summarize([drop(Scheme.CLA, 0, [rec(rate=2.0, delay=0.5)])]).schemes[Scheme.CLA]
    r = rec(rate=2.0, delay=0.5)
    assert (s.mean_rate, s.mean_delay, s.mean_utility) == (r.rate_total, r.delay_total, r.utility)


def test_identical_drops_idempotent():
    d = drop(Scheme.WRD, 0, [rec(0, 1.0), rec(1, 3.0, 0.2)])
    one, two = summarize([d]).schemes[Scheme.WRD], summarize([d, d]).schemes[Scheme.WRD]
    assert (one.mean_rate, one.mean_delay, one.mean_utility) == (two.mean_rate, two.mean_delay, two.mean_utility)


@settings(max_examples=40)
@given(st.lists(st.lists(st.tuples(st.floats(0.01, 20), st.floats(1e-6, 1.0)), min_size=1, max_size=4),
                min_size=1, max_size=8), st.randoms())
def test_pooled_means_and_permutation_invariance(drops_spec, rnd):
    drops = [drop(s, i, [rec(m, r, d) for m, (r, d) in enumerate(ms)])
             for i, ms in enumerate(drops_spec) for s in (Scheme.CLA, Scheme.OTA)]
    a = summarize(drops)
    shuffled = drops[:]
    rnd.shuffle(shuffled)
    b = summarize(shuffled)
    rates = [r for ms in drops_spec for r, _ in ms]
    for s in (Scheme.CLA, Scheme.OTA):
        assert a.schemes[s].mean_rate == pytest.approx(sum(rates) / len(rates), rel=1e-12)
        assert a.schemes[s].mean_rate == pytest.approx(b.schemes[s].mean_rate, rel=1e-12)
        assert a.schemes[s].rate_cdf.points() == b.schemes[s].rate_cdf.points()
    assert a.ratios[Scheme.OTA]["rate"] == pytest.approx(1.0)


def test_unconverged_and_unstable_accounting():
    drops = [drop(Scheme.WRD, 0, [rec(0, 1.0, math.inf, u=0.0)]), drop(Scheme.WRD, 1, [rec(0, 2.0, 0.1)]),
             drop(Scheme.WRD, 2, [rec(0, 50.0, 0.1)], converged=False)]
    s = summarize(drops).schemes[Scheme.WRD]
    assert s.converged_drops == 2 and s.unconverged_fraction == pytest.approx(1 / 3)
    assert s.unstable == 1 and s.mean_delay == 0.1 and s.mean_rate == 1.5
    with pytest.raises(ValueError):
        summarize([drops[2]])


def test_ratios_consistent_with_means():
    drops = [drop(Scheme.CLA, 0, [rec(0, 1.0, 0.4)]), drop(Scheme.OTA, 0, [rec(0, 2.5, 0.1)])]
    s = summarize(drops)
    assert s.ratios[Scheme.OTA]["rate"] == 2.5
    assert s.ratios[Scheme.OTA]["delay"] == pytest.approx(4.0)
    assert s.best_scheme() is Scheme.OTA
