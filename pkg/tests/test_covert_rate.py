"""Covert SINR, the exponential integral, the mean effective covert rate,
and the constrained covert-power optimization."""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from covertrelay import (
    CovertPowerExceedsBudget,
    QuadratureNotConverged,
    covert_sinr,
    derive_constants,
    effective_rate_closed,
    effective_rate_quadrature,
    exp_integral_ei,
    optimize_covert_power,
)
from helpers import detection_scenario, ei_oracle, random_feasible, rate_scenario

C = derive_constants(detection_scenario())


def _rel(actual: float, expected: float) -> float:
    return abs(actual - expected) / abs(expected)


class TestCovertSinr:
    def test_reference_value(self):
        assert _rel(covert_sinr(1.0, C), float(Fraction(7, 23))) <= 1e-14

    def test_interference_limited_ceiling(self):
        ceiling = float(Fraction(7, 3))  # (eta*h_sr2 + 1) / mu
        assert _rel(covert_sinr(1e12, C), ceiling) <= 1e-9

    def test_zero_covert_power(self):
        c = derive_constants(detection_scenario(p_delta=0.0))
        assert covert_sinr(1.0, c) == 0.0

    def test_rejects_gains_below_covert_floor(self):
        with pytest.raises(ValueError):
            covert_sinr(C.h_min_covert * (1.0 - 1e-9), C)
        with pytest.raises(ValueError):
            covert_sinr(math.inf, C)


class TestExponentialIntegral:
    def test_reference_values(self):
        assert _rel(exp_integral_ei(-1.0), -0.21938393439552029) <= 1e-13
        assert _rel(exp_integral_ei(-0.001), -6.331539364136149) <= 1e-13
        assert _rel(exp_integral_ei(-10.0), -4.156968929685326e-06) <= 1e-13

    @pytest.mark.parametrize("a", [1e-6, 0.05, 0.5, 1.0, 3.9, 4.1, 12.0, 45.0])
    def test_matches_quadrature(self, a):
        assert _rel(exp_integral_ei(-a), ei_oracle(a)) <= 1e-12

    def test_rejects_nonnegative_and_nonfinite(self):
        for bad in (0.0, 1.0, math.inf, -math.inf, math.nan):
            with pytest.raises(ValueError):
                exp_integral_ei(bad)


class TestEffectiveRate:
    def test_reference_values(self):
        assert _rel(effective_rate_closed(C).value,
                    0.2670064636219428) <= 1e-12
        large = derive_constants(rate_scenario(h_sr2=1.0, p_delta=0.14))
        assert _rel(effective_rate_closed(large).value,
                    0.17881636141872653) <= 1e-12
        large2 = derive_constants(rate_scenario(h_sr2=2.0, p_delta=0.14))
        assert _rel(effective_rate_closed(large2).value,
                    0.17911913897383477) <= 1e-12

    def test_zero_covert_power_shortcut(self):
        c = derive_constants(detection_scenario(p_delta=0.0))
        closed = effective_rate_closed(c)
        quadrature = effective_rate_quadrature(c)
        assert closed.value == 0.0 and closed.method == "closed_form"
        assert closed.abs_err_estimate is None
        assert quadrature.value == 0.0 and quadrature.method == "quadrature"

    def test_closed_matches_quadrature_random(self):
        rng = np.random.default_rng(41)
        worst = 0.0
        for _ in range(30):
            c = derive_constants(random_feasible(rng))
            closed = effective_rate_closed(c).value
            quadrature = effective_rate_quadrature(c).value
            worst = max(worst, abs(closed - quadrature)
                        / max(abs(quadrature), 1e-300))
        assert worst <= 1e-9

    def test_result_bounded_by_sinr_ceiling(self):
        rng = np.random.default_rng(43)
        for _ in range(30):
            c = derive_constants(random_feasible(rng))
            ceiling = c.p_c * math.log2(
                1.0 + (c.eta * c.params.h_sr2 + 1.0) / c.mu)
            value = effective_rate_closed(c).value
            assert 0.0 <= value <= ceiling * (1.0 + 1e-12)

    def test_requires_headroom(self):
        c = derive_constants(detection_scenario(p_delta=2.0), strict=False)
        with pytest.raises(CovertPowerExceedsBudget):
            effective_rate_closed(c)
        with pytest.raises(CovertPowerExceedsBudget):
            effective_rate_quadrature(c)

    def test_quadrature_reports_error_estimate(self):
        result = effective_rate_quadrature(C)
        assert result.method == "quadrature"
        assert 0.0 <= result.abs_err_estimate <= 1e-10

    def test_quadrature_raises_when_tolerance_unreachable(self):
        with pytest.raises(QuadratureNotConverged) as info:
            effective_rate_quadrature(C, abs_tol=0.0)
        assert _rel(info.value.value, 0.2670064636219428) <= 1e-9
        assert info.value.abs_err > 0.0


class TestOptimizeCovertPower:
    def test_epsilon_validation(self):
        for bad in (-0.1, 1.5, math.nan, math.inf):
            with pytest.raises(ValueError):
                optimize_covert_power(rate_scenario(), bad)

    def test_zero_epsilon_forbids_transmission(self):
        result = optimize_covert_power(rate_scenario(), 0.0)
        assert result.p_delta_star == 0.0
        assert result.r_bar_c_star == 0.0
        assert result.p_delta_eps == 0.0
        assert result.binding

    def test_vacuous_epsilon_releases_constraint(self):
        result = optimize_covert_power(rate_scenario(), 1.0)
        assert _rel(result.p_delta_eps, 124.625) <= 1e-12
        assert result.p_delta_star >= 0.9999 * result.p_delta_eps
        assert not result.binding

    def test_constrained_reference_values(self):
        result = optimize_covert_power(rate_scenario(h_sr2=1.0), 0.1)
        assert _rel(result.p_delta_eps, 0.13984359273331393) <= 1e-9
        assert _rel(result.r_bar_c_star, 0.1786370370367578) <= 1e-9
        assert result.binding
        assert _rel(result.p_delta_star, result.p_delta_eps) <= 1e-6

        result2 = optimize_covert_power(rate_scenario(h_sr2=2.0), 0.1)
        assert _rel(result2.p_delta_eps, 0.1397746034302827) <= 1e-9
        assert _rel(result2.r_bar_c_star, 0.17886021767387258) <= 1e-9
        assert result2.binding

    def test_tighter_covertness_means_less_power_and_rate(self):
        loose = optimize_covert_power(rate_scenario(), 0.2)
        tight = optimize_covert_power(rate_scenario(), 0.05)
        assert tight.p_delta_eps < loose.p_delta_eps
        assert tight.r_bar_c_star < loose.r_bar_c_star
