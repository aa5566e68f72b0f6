"""Warden radiometer error rates and the optimal detection threshold.

The warden S knows its own transmit power and the reciprocal R->S channel,
so under the no-covert hypothesis (H0) the power it receives back from the
relay is a deterministic function of the R->D gain; embedding the covert
message (H1) shifts that power upward. Conditioned on the covert-capable
channel event, both hypothesis distributions are supported on known
intervals, which makes the false-alarm and miss-detection probabilities of
a threshold test piecewise closed-form in the threshold tau.

All rate functions accept a scalar tau or an array of taus and broadcast
elementwise; scalars in, float out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CovertPowerExceedsBudget
from .params import DerivedConstants

__all__ = [
    "DetectionCurve",
    "ThresholdResult",
    "false_alarm_rate",
    "miss_detection_rate",
    "total_error",
    "detection_curve",
    "optimal_threshold",
]

# Relative width (fraction of the search bracket) below which the threshold
# refinement stops.
_TAU_REL_TOL = 1e-9


@dataclass(frozen=True)
class DetectionCurve:
    """Sampled detection performance over a grid of thresholds."""

    taus: np.ndarray
    p_fa: np.ndarray
    p_md: np.ndarray
    xi: np.ndarray


@dataclass(frozen=True)
class ThresholdResult:
    """Minimizer of the warden's total error over the threshold.

    tau_star      threshold achieving the minimum
    xi_star       minimum total error p_fa + p_md
    evaluations   number of total_error evaluations spent in the search
    """

    tau_star: float
    xi_star: float
    evaluations: int


def _require_covert_feasible(c: DerivedConstants) -> None:
    if c.p_c <= 0.0:
        raise CovertPowerExceedsBudget(
            "detection rates are conditioned on the covert-capable channel "
            "event, which has probability zero for this scenario")


def _prepare(tau):
    t = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(t)):
        raise ValueError(f"tau must be finite, got {tau!r}")
    return t


def false_alarm_rate(tau, c: DerivedConstants):
    """Probability the warden flags a covert-free block, P[T >= tau | H0].

    Equals 1 below the warden noise floor sigma2_s, decays to 0 at rho1
    (the largest statistic a covert-capable block can produce under H0),
    and is 0 beyond.
    """
    _require_covert_feasible(c)
    t = _prepare(tau)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p = c.params
    out = np.zeros(t.shape)
    out[t < p.sigma2_s] = 1.0
    # rho1 itself stays on the zero branch: the formula's exponent vanishes
    # there only in exact arithmetic, and the cancellation residue would
    # otherwise leave a spurious positive rate at the region boundary.
    mid = (t >= p.sigma2_s) & (t < c.rho1)
    gap = t[mid] - p.sigma2_s
    with np.errstate(divide="ignore"):
        exponent = c.mu * p.sigma2_d * (1.0 / c.headroom - p.h_rs2 / gap)
    out[mid] = -np.expm1(exponent) + 0.0  # +0.0 keeps near-zero values at +0
    return float(out[0]) if scalar else out


def miss_detection_rate(tau, c: DerivedConstants):
    """Probability the warden misses the covert message, P[T < tau | H1].

    Zero below rho2 (the smallest statistic an embedding block produces),
    rises to 1 at the statistic's supremum rho3, and is 1 beyond.
    """
    _require_covert_feasible(c)
    t = _prepare(tau)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    p = c.params
    out = np.zeros(t.shape)
    # rho3 sits on the saturated branch for the same reason rho1 sits on the
    # false-alarm zero branch: the formula reaches 1 there only in exact
    # arithmetic and could round past 1 otherwise.
    out[t >= c.rho3] = 1.0
    mid = (t >= c.rho2) & (t < c.rho3)
    gap = t[mid] - c.rho2
    with np.errstate(divide="ignore"):
        exponent = c.mu * p.sigma2_d * (1.0 / c.headroom - p.h_rs2 / gap)
    out[mid] = np.exp(exponent)
    return float(out[0]) if scalar else out


def total_error(tau, c: DerivedConstants):
    """Total detection error xi = p_fa + p_md at threshold tau."""
    return false_alarm_rate(tau, c) + miss_detection_rate(tau, c)


def detection_curve(c: DerivedConstants, taus) -> DetectionCurve:
    """Evaluate both error rates on an ascending threshold grid."""
    t = _prepare(taus)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("taus must be a one-dimensional, non-empty grid")
    if np.any(np.diff(t) < 0):
        raise ValueError("taus must be ascending")
    p_fa = false_alarm_rate(t, c)
    p_md = miss_detection_rate(t, c)
    return DetectionCurve(taus=t, p_fa=p_fa, p_md=p_md, xi=p_fa + p_md)


def optimal_threshold(c: DerivedConstants, grid_points: int = 1024,
                      refine_points: int = 64) -> ThresholdResult:
    """Warden-optimal threshold: minimize xi over tau.

    The minimizer always lies in [rho2, rho1] when that interval is
    non-empty (below rho2 the miss rate is already zero while the false
    alarm rate still falls; above rho1 the converse), so the search is a
    dense grid over [rho2, rho1] followed by bracketed grid-refinement
    passes around the best point. Plain grids are used instead of a
    golden-section search because unimodality of xi is not established.

    For p_delta > p_delta_u the interval flips (rho1 < rho2) and every tau
    between them yields xi = 0; the midpoint is returned.
    """
    _require_covert_feasible(c)
    lo, hi = c.rho2, c.rho1
    if hi <= lo:
        mid = 0.5 * (lo + hi)
        return ThresholdResult(mid, float(total_error(mid, c)), 1)
    evaluations = 0
    taus = np.linspace(lo, hi, grid_points)
    xi = total_error(taus, c)
    evaluations += taus.size
    i = int(np.argmin(xi))
    best_tau = float(taus[i])
    best_xi = float(xi[i])
    b_lo = float(taus[max(i - 1, 0)])
    b_hi = float(taus[min(i + 1, taus.size - 1)])
    tol = _TAU_REL_TOL * (hi - lo)
    while b_hi - b_lo > tol:
        taus = np.linspace(b_lo, b_hi, refine_points)
        xi = total_error(taus, c)
        evaluations += taus.size
        j = int(np.argmin(xi))
        if float(xi[j]) < best_xi:
            best_xi = float(xi[j])
            best_tau = float(taus[j])
        b_lo = float(taus[max(j - 1, 0)])
        b_hi = float(taus[min(j + 1, taus.size - 1)])
    return ThresholdResult(best_tau, best_xi, evaluations)
