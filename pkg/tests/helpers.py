"""Shared fixtures-in-spirit for the test suite.

Reference scenarios, a randomized feasible-scenario generator, an
independent quadrature oracle for the exponential integral, and small
CSV-report parsing utilities used by the CLI and acceptance tests.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy import integrate

from covertrelay import SystemParams, derive_constants

__all__ = [
    "detection_scenario",
    "rate_scenario",
    "log_uniform",
    "random_feasible",
    "ei_oracle",
    "read_report",
    "column",
]


def detection_scenario(p_delta: float = 0.5) -> SystemParams:
    """Small-power reference scenario for detection-side checks.

    p_s = p_r_max = 10, unit noise everywhere, r_sd = 1, unit channel
    gains. Its derived constants reduce to simple fractions (mu = 33/7,
    p_delta_u = 7/8, ...), so expected values can be frozen by hand.
    """
    return SystemParams(p_s=10.0, p_r_max=10.0, p_delta=p_delta)


def rate_scenario(h_sr2: float = 1.0, p_delta: float = 0.0) -> SystemParams:
    """Large-power reference scenario for covert-rate checks.

    p_s = p_r_max = 1000 (30 dB), unit noise, r_sd = 1. The mean effective
    covert rate has a pronounced interior maximum in p_delta here, and the
    covertness constraint binds far below it.
    """
    return SystemParams(p_s=1000.0, p_r_max=1000.0, h_sr2=h_sr2,
                        p_delta=p_delta)


def log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_feasible(rng: np.random.Generator,
                    with_covert: bool = True) -> SystemParams:
    """Draw a random scenario that passes every feasibility check.

    Powers and gains are log-uniform over wide ranges; the rate grant is
    kept feasible with a 5% margin, the covert power (when requested) is a
    log-uniform fraction of p_delta_u, and scenarios whose covert-capable
    probability underflows to zero are rejected. Half the draws break
    channel reciprocity with an independent warden-side gain.
    """
    while True:
        r_sd = float(rng.uniform(0.25, 2.0))
        sigma2_r = log_uniform(rng, 0.1, 10.0)
        h_sr2 = log_uniform(rng, 0.05, 20.0)
        p_s = log_uniform(rng, 0.5, 2000.0)
        snr_target = 2.0 ** (2.0 * r_sd) - 1.0
        if p_s * h_sr2 <= 1.05 * sigma2_r * snr_target:
            continue
        h_rs2 = log_uniform(rng, 0.05, 20.0) if rng.random() < 0.5 else None
        params = SystemParams(
            p_s=p_s,
            p_r_max=log_uniform(rng, 0.5, 2000.0),
            sigma2_r=sigma2_r,
            sigma2_d=log_uniform(rng, 0.1, 10.0),
            sigma2_s=log_uniform(rng, 0.1, 10.0),
            r_sd=r_sd,
            h_sr2=h_sr2,
            h_rs2=h_rs2,
        )
        c = derive_constants(params)
        if with_covert:
            params = replace(
                params, p_delta=log_uniform(rng, 1e-3, 1.0) * c.p_delta_u)
            c = derive_constants(params)
        if c.p_c <= 0.0:
            continue
        return params


def ei_oracle(a: float) -> float:
    """Quadrature reference for Ei(-a), a > 0, independent of the library.

    Splits the defining integral of E1(a) at a + 1; the head is mapped by
    s = a*(exp(w) - 1) onto a finite interval with a bounded integrand, the
    tail keeps its natural exponential decay. Both pieces are handed to
    adaptive quadrature at near machine-level relative tolerance.
    """
    if not (math.isfinite(a) and a > 0.0):
        raise ValueError(f"ei_oracle needs a > 0, got {a!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(
            lambda w: math.exp(-a * math.expm1(w)),
            0.0, math.log1p(1.0 / a), epsabs=0.0, epsrel=1e-13, limit=200)
        tail, _ = integrate.quad(
            lambda u: math.exp(-u) / (u + a),
            1.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return -math.exp(-a) * (head + tail)


def read_report(path: Path) -> tuple[list[str], list[str], list[list[str]]]:
    """Split an emitted CSV report into (meta lines, header, data rows)."""
    meta: list[str] = []
    header: list[str] | None = None
    rows: list[list[str]] = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            meta.append(line[2:])
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise ValueError(f"{path} holds no CSV header")
    return meta, header, rows


def column(header: list[str], rows: list[list[str]], name: str,
           kind=float) -> list:
    """Extract one named column from parsed report rows."""
    index = header.index(name)
    return [kind(row[index]) for row in rows]
