"""Relay power policies: budgets, outage regions, and exact rate pinning."""

import math
from fractions import Fraction

import numpy as np
import pytest

from covertrelay import (
    CovertPowerExceedsBudget,
    derive_constants,
    forward_snr,
    outage_probability,
    power_no_covert,
    power_with_covert,
)
from helpers import detection_scenario, random_feasible

C = derive_constants(detection_scenario())


def _rel(actual: float, expected: float) -> float:
    return abs(actual - expected) / abs(expected)


class TestForwardingPolicy:
    def test_reference_values(self):
        d = power_no_covert(1.0, C)
        assert (_rel(d.p_forward, float(Fraction(33, 7))) <= 1e-12
                and d.p_covert == 0.0 and not d.outage)
        d = power_no_covert(0.5, C)
        assert _rel(d.p_forward, float(Fraction(66, 7))) <= 1e-12

    def test_budget_spent_fully_at_outage_edge(self):
        d = power_no_covert(C.h_min_forward, C)
        assert not d.outage
        assert _rel(d.p_forward, C.params.p_r_max) <= 1e-12

    def test_outage_below_edge(self):
        d = power_no_covert(C.h_min_forward * (1.0 - 1e-12), C)
        assert d.outage and d.p_forward == 0.0 and d.p_covert == 0.0
        assert power_no_covert(0.0, C).outage

    def test_gain_validation(self):
        for bad in (-1.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                power_no_covert(bad, C)


class TestCovertPolicy:
    def test_three_regimes(self):
        # Above the covert floor (0.66): embed and compensate.
        d = power_with_covert(1.0, C)
        assert _rel(d.p_forward, float(Fraction(99, 14))) <= 1e-12
        assert d.p_covert == 0.5 and not d.outage
        # Between the outage edge (33/70) and the floor: plain forwarding.
        d = power_with_covert(0.5, C)
        assert _rel(d.p_forward, float(Fraction(66, 7))) <= 1e-12
        assert d.p_covert == 0.0 and not d.outage
        # Below the outage edge: silence.
        d = power_with_covert(0.4, C)
        assert d.outage and d.p_forward == 0.0 and d.p_covert == 0.0

    def test_budget_saturates_at_covert_floor(self):
        d = power_with_covert(C.h_min_covert, C)
        total = d.p_forward + d.p_covert
        assert _rel(total, C.params.p_r_max) <= 1e-12

    def test_requires_headroom(self):
        c = derive_constants(detection_scenario(p_delta=2.0), strict=False)
        with pytest.raises(CovertPowerExceedsBudget):
            power_with_covert(1.0, c)

    def test_budget_never_exceeded_random(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            c = derive_constants(random_feasible(rng))
            cap = c.params.p_r_max * (1.0 + 1e-12)
            for h in rng.exponential(1.0, 10):
                for d in (power_no_covert(h, c), power_with_covert(h, c)):
                    assert d.p_forward + d.p_covert <= cap


class TestForwardSnr:
    def test_reference_target(self):
        assert C.snr_target == 3.0
        d = power_no_covert(1.0, C)
        assert _rel(forward_snr(1.0, d, C), 3.0) <= 1e-12

    def test_rate_pinned_for_both_policies(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            c = derive_constants(random_feasible(rng))
            r_sd = c.params.r_sd
            for h in rng.exponential(1.0, 10):
                for d in (power_no_covert(h, c), power_with_covert(h, c)):
                    if d.outage:
                        continue
                    capacity = 0.5 * math.log2(1.0 + forward_snr(h, d, c))
                    assert abs(capacity - r_sd) / r_sd <= 1e-12

    def test_rejects_outage_decision(self):
        d = power_no_covert(0.1, C)
        assert d.outage
        with pytest.raises(ValueError):
            forward_snr(0.1, d, C)

    def test_covert_interference_lowers_offpolicy_snr(self):
        # Same forwarding power with covert power added on top must hurt.
        clean = power_no_covert(1.0, C)
        dirty = power_with_covert(1.0, C)
        assert dirty.p_forward > clean.p_forward
        assert _rel(forward_snr(1.0, dirty, C), C.snr_target) <= 1e-12


class TestOutageProbability:
    def test_reference_value(self):
        expected = -math.expm1(-float(Fraction(33, 70)))
        assert _rel(outage_probability(C), expected) <= 1e-12

    def test_matches_forwarding_edge(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            c = derive_constants(random_feasible(rng))
            assert outage_probability(c) == -math.expm1(-c.h_min_forward)
