"""Monte Carlo validation of the analytic detection and rate results.

The simulations replay the per-block system behavior from first principles:
draw the R->D power gain, apply the relay power policy, form the warden's
received-power statistic or the destination's covert SINR, and score the
block. They deliberately avoid the analytic shortcuts they are meant to
check (piecewise error-rate formulas, the averaged rate's closed form).

Sampling is chunked: trials are split into fixed-size chunks, chunk i uses
an independent child stream spawned from the master seed, and results are
reduced in chunk order. The chunk streams make the totals independent of
how chunks would be scheduled, so a parallel executor would reproduce the
sequential results bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import SystemParams, derive_constants

__all__ = ["McEstimate", "simulate_detection", "simulate_effective_rate"]

_CHUNK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo estimate with a 3-sigma half width.

    half_width is 3 * sqrt(p*(1-p)/trials) for proportions and
    3 * (sample std)/sqrt(trials) for means; when the plug-in variance is
    exactly zero (empirical rate 0 or 1, or a constant score) it is floored
    at 3/trials so the width stays positive for any finite trial count.
    """

    value: float
    half_width: float
    trials: int
    seed: int


def _check_trials_seed(trials: int, seed: int) -> None:
    if not (isinstance(trials, int) and trials > 0):
        raise ValueError(f"trials must be a positive integer, got {trials!r}")
    if not (isinstance(seed, int) and seed >= 0):
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")


def _chunk_streams(seed: int, trials: int):
    """Yield (generator, chunk_size) pairs with per-chunk child seeding."""
    n_chunks = (trials + _CHUNK - 1) // _CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    for i, child in enumerate(children):
        size = min(_CHUNK, trials - i * _CHUNK)
        yield np.random.Generator(np.random.Philox(child)), size


def _exponential_from_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Unit-mean exponential draws via the inverse CDF -ln(1-u)."""
    return -np.log1p(-rng.random(size))


def simulate_detection(params: SystemParams, tau: float, hypothesis: int,
                       trials: int, seed: int) -> McEstimate:
    """Empirical warden error rate at threshold tau under one hypothesis.

    Draws R->D gains conditioned on the covert-capable event (a unit-mean
    exponential restarted at the covert floor, by memorylessness), replays
    the appropriate relay power policy, and forms the warden statistic
    T = (relay transmit power) * h_rs2 + sigma2_s. Under hypothesis 0 the
    estimate is the false-alarm rate (fraction with T >= tau); under
    hypothesis 1 it is the miss rate (fraction with T < tau).
    """
    if hypothesis not in (0, 1):
        raise ValueError(f"hypothesis must be 0 or 1, got {hypothesis!r}")
    if not (isinstance(tau, (int, float)) and math.isfinite(tau)):
        raise ValueError(f"tau must be finite, got {tau!r}")
    _check_trials_seed(trials, seed)
    c = derive_constants(params)
    p = c.params
    floor = c.h_min_covert
    hits = 0
    for rng, size in _chunk_streams(seed, trials):
        h = floor + _exponential_from_uniform(rng, size)
        if hypothesis == 0:
            transmit = c.mu * p.sigma2_d / h
        else:
            transmit = c.mu * p.p_delta + c.mu * p.sigma2_d / h + p.p_delta
        statistic = transmit * p.h_rs2 + p.sigma2_s
        if hypothesis == 0:
            hits += int(np.count_nonzero(statistic >= tau))
        else:
            hits += int(np.count_nonzero(statistic < tau))
    rate = hits / trials
    variance = rate * (1.0 - rate) / trials
    half = 3.0 * math.sqrt(variance) if variance > 0.0 else 3.0 / trials
    return McEstimate(rate, half, trials, seed)


def simulate_effective_rate(params: SystemParams, trials: int,
                            seed: int) -> McEstimate:
    """Empirical mean effective covert rate over unconditioned blocks.

    Draws unconditioned R->D gains, scores covert-capable blocks with
    log2(1 + SINR) where the SINR is rebuilt from the raw signal model
    (covert power over amplified relay noise plus destination noise), and
    scores all other blocks zero.
    """
    _check_trials_seed(trials, seed)
    c = derive_constants(params)
    p = c.params
    relay_noise_gain = c.amp_gain ** 2 * p.sigma2_r
    total = 0.0
    total_sq = 0.0
    for rng, size in _chunk_streams(seed, trials):
        h = _exponential_from_uniform(rng, size)
        capable = h >= c.h_min_covert
        hc = h[capable]
        forward = c.mu * p.p_delta + c.mu * p.sigma2_d / hc
        noise = forward * hc * relay_noise_gain + p.sigma2_d
        scores = np.log2(1.0 + p.p_delta * hc / noise)
        total += float(scores.sum())
        total_sq += float((scores * scores).sum())
    mean = total / trials
    if trials > 1:
        sample_var = max(total_sq - total * total / trials, 0.0) / (trials - 1)
    else:
        sample_var = 0.0
    half = (3.0 * math.sqrt(sample_var / trials) if sample_var > 0.0
            else 3.0 / trials)
    return McEstimate(mean, half, trials, seed)
