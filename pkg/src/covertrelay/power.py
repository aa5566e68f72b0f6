"""Per-block relay power policies and the end-to-end SNR they pin.

The relay observes the R->D channel gain ``h_rd2`` each block and chooses
its forwarding power so the destination's SNR lands exactly on the granted
target. When the block additionally supports the covert message within the
power budget, the relay superimposes ``p_delta`` of covert power and raises
the forwarding power so the granted rate still holds; otherwise it either
forwards without the covert message or declares an outage when even plain
forwarding would exceed the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CovertPowerExceedsBudget
from .params import DerivedConstants

__all__ = [
    "PowerDecision",
    "power_no_covert",
    "power_with_covert",
    "forward_snr",
    "outage_probability",
]


@dataclass(slots=True)
class PowerDecision:
    """Relay action for one block.

    p_forward   power spent forwarding the granted S->D message
    p_covert    power spent on the covert message (0 when not embedded)
    outage      True when the budget cannot meet the rate grant, in which
                case both powers are zero and the relay stays silent
    """

    p_forward: float
    p_covert: float
    outage: bool


def _check_gain(h_rd2: float) -> float:
    if not (isinstance(h_rd2, (int, float)) and math.isfinite(h_rd2) and h_rd2 >= 0):
        raise ValueError(f"h_rd2 must be finite and >= 0, got {h_rd2!r}")
    return float(h_rd2)


def power_no_covert(h_rd2: float, c: DerivedConstants) -> PowerDecision:
    """Forwarding-only policy: spend mu*sigma2_d/h_rd2 or declare outage.

    The relay forwards with exactly the power that pins the destination SNR
    to the target; blocks whose gain falls below h_min_forward would need
    more than p_r_max, so they are outages.
    """
    h = _check_gain(h_rd2)
    if h >= c.h_min_forward and h > 0.0:
        return PowerDecision(c.mu * c.params.sigma2_d / h, 0.0, False)
    return PowerDecision(0.0, 0.0, True)


def power_with_covert(h_rd2: float, c: DerivedConstants) -> PowerDecision:
    """Covert-capable policy with three regimes over the R->D gain.

    Strong blocks (h_rd2 >= h_min_covert) carry the covert message: the
    forwarding power mu*p_delta + mu*sigma2_d/h_rd2 both compensates the
    covert interference at the destination and keeps the granted rate exact.
    Intermediate blocks fall back to plain forwarding; weak blocks are
    outages. Requires positive budget headroom, i.e. p_delta < p_r_max/(mu+1).
    """
    if c.headroom <= 0.0:
        raise CovertPowerExceedsBudget(
            f"p_delta={c.params.p_delta:.6g} leaves no budget headroom "
            f"(needs p_delta < {c.params.p_r_max / (c.mu + 1.0):.6g})")
    h = _check_gain(h_rd2)
    if h >= c.h_min_covert:
        return PowerDecision(
            c.mu * c.params.p_delta + c.mu * c.params.sigma2_d / h,
            c.params.p_delta, False)
    if h >= c.h_min_forward and h > 0.0:
        return PowerDecision(c.mu * c.params.sigma2_d / h, 0.0, False)
    return PowerDecision(0.0, 0.0, True)


def forward_snr(h_rd2: float, decision: PowerDecision, c: DerivedConstants) -> float:
    """End-to-end SNR at the destination for a non-outage decision.

    Accounts for the amplified relay noise on the second hop and, when the
    decision embeds the covert message, for the covert signal acting as
    interference on the granted message. On-policy decisions give back
    exactly the pinned target snr_target.
    """
    if decision.outage:
        raise ValueError("forward_snr is undefined for an outage decision")
    h = _check_gain(h_rd2)
    p = c.params
    gamma1 = p.p_s * p.h_sr2 / p.sigma2_r
    if decision.p_covert == 0.0:
        gamma2 = decision.p_forward * h / p.sigma2_d
        return gamma1 * gamma2 / (gamma1 + gamma2 + 1.0)
    gamma3 = decision.p_forward * h / p.sigma2_d
    covert_leak = gamma3 * decision.p_covert / decision.p_forward
    return gamma1 * gamma3 / (gamma3 + (gamma1 + 1.0) * (covert_leak + 1.0))


def outage_probability(c: DerivedConstants) -> float:
    """Probability that a Rayleigh block cannot support the rate grant.

    The R->D power gain is unit-mean exponential, so the outage event
    h_rd2 < h_min_forward has probability 1 - exp(-h_min_forward). Both
    power policies share this outage region.
    """
    return -math.expm1(-c.h_min_forward)
