"""Covert communication analysis for amplify-and-forward relay networks.

A relay forwards a source's message at a granted rate while opportunistically
superimposing a covert message for the destination; the source doubles as a
radiometer warden. This package provides the per-block relay power policies,
the warden's detection error rates and optimal threshold, the mean effective
covert rate (closed form and quadrature), a constrained covert-power
optimizer, Monte Carlo validation, and an experiment CLI that writes CSV
reports with optional figure rendering.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, CovertPowerExceedsBudget, CovertRelayError,
                     InfeasibleRate, NoFeasibleCovertPower,
                     QuadratureNotConverged)
from .params import (DerivedConstants, SystemParams, db_to_linear,
                     derive_constants, load_scenario, parse_scenario_text,
                     scenario_from_mapping)
from .power import (PowerDecision, forward_snr, outage_probability,
                    power_no_covert, power_with_covert)
from .detection import (DetectionCurve, ThresholdResult, detection_curve,
                        false_alarm_rate, miss_detection_rate,
                        optimal_threshold, total_error)
from .covert_rate import (CovertPowerResult, RateResult, covert_sinr,
                          effective_rate_closed, effective_rate_quadrature,
                          exp_integral_ei, optimize_covert_power)
from .montecarlo import McEstimate, simulate_detection, simulate_effective_rate

__all__ = [
    "__version__",
    "CovertRelayError", "InfeasibleRate", "CovertPowerExceedsBudget",
    "QuadratureNotConverged", "NoFeasibleCovertPower", "ConfigError",
    "SystemParams", "DerivedConstants", "derive_constants", "db_to_linear",
    "load_scenario", "parse_scenario_text", "scenario_from_mapping",
    "PowerDecision", "power_no_covert", "power_with_covert", "forward_snr",
    "outage_probability",
    "DetectionCurve", "ThresholdResult", "false_alarm_rate",
    "miss_detection_rate", "total_error", "detection_curve",
    "optimal_threshold",
    "RateResult", "CovertPowerResult", "covert_sinr", "exp_integral_ei",
    "effective_rate_closed", "effective_rate_quadrature",
    "optimize_covert_power",
    "McEstimate", "simulate_detection", "simulate_effective_rate",
]
