"""System parameters and derived constants for the covert AF relay model.

The model: a source S sends to a destination D through an amplify-and-forward
relay R over quasi-static Rayleigh fading channels. S grants R a fixed
spectral efficiency ``r_sd`` (bits/s/Hz over the two hops) and R adapts its
forwarding power on every block so that the end-to-end SNR exactly meets the
corresponding target, spending any remaining power budget on a covert message
of power ``p_delta`` toward D. S simultaneously plays warden: it knows its
own transmit power and the R->S channel (reciprocal to S->R), observes the
radio power received back from R, and runs a radiometer to decide whether R
is embedding the covert message.

Everything downstream (power policies, detection error rates, covert rate)
consumes the validated :class:`SystemParams` plus the cached algebra in
:class:`DerivedConstants`, produced once by :func:`derive_constants`.

Channel gains are power gains (``|h|^2``); all powers and variances are
linear (watts). dB inputs are converted only at the scenario-file / CLI
boundary, never inside the library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, CovertPowerExceedsBudget, InfeasibleRate

__all__ = [
    "SystemParams",
    "DerivedConstants",
    "derive_constants",
    "db_to_linear",
    "parse_setting",
    "parse_scenario_text",
    "scenario_from_mapping",
    "load_scenario",
]


@dataclass(frozen=True)
class SystemParams:
    """Static scenario description, all quantities linear.

    p_s         source transmit power
    p_r_max     relay power budget per block
    sigma2_r    noise variance at the relay
    sigma2_d    noise variance at the destination
    sigma2_s    noise variance at the source/warden
    r_sd        granted end-to-end spectral efficiency (bits/s/Hz)
    p_delta     covert message power superimposed by the relay
    h_sr2       S->R channel power gain for the block under study
    h_rs2       R->S channel power gain seen by the warden; defaults to
                h_sr2 (channel reciprocity)
    """

    p_s: float
    p_r_max: float
    sigma2_r: float = 1.0
    sigma2_d: float = 1.0
    sigma2_s: float = 1.0
    r_sd: float = 1.0
    p_delta: float = 0.0
    h_sr2: float = 1.0
    h_rs2: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.h_rs2 is None:
            object.__setattr__(self, "h_rs2", float(self.h_sr2))
        for name in ("p_s", "p_r_max", "sigma2_r", "sigma2_d", "sigma2_s",
                     "r_sd", "h_sr2", "h_rs2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)
                    and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not (isinstance(self.p_delta, (int, float))
                and math.isfinite(self.p_delta) and self.p_delta >= 0):
            raise ValueError(
                f"p_delta must be finite and >= 0, got {self.p_delta!r}")
        object.__setattr__(self, "p_delta", float(self.p_delta))


@dataclass(frozen=True)
class DerivedConstants:
    """Cached algebra shared by every analytic formula.

    params         the validated scenario these constants were derived from
    snr_target     end-to-end SNR pinned by the rate grant, 2**(2*r_sd) - 1
    mu             power-scaling factor: the relay forwards mu * (received
                   signal+noise power normalized by the R->D gain)
    eta            source SNR contrast p_s / sigma2_r
    amp_gain       AF amplification gain 1 / sqrt(p_s*h_sr2 + sigma2_r)
    p_delta_u      largest covert power for which the warden's minimum total
                   error is guaranteed positive, p_r_max / (2*(mu+1))
    headroom       p_r_max - (mu+1)*p_delta, the budget slack that must stay
                   positive for covert transmission to ever be possible
    h_min_forward  smallest R->D gain with no relay outage, mu*sigma2_d/p_r_max
    h_min_covert   smallest R->D gain at which the relay can embed the covert
                   message within budget, mu*sigma2_d/headroom (inf if the
                   headroom is gone)
    rho1           warden statistic at the covert-capable gain floor under H0
    rho2           infimum of the warden statistic under H1
    rho3           supremum of the warden statistic under both hypotheses
    p_c            probability that a Rayleigh block supports covert
                   transmission, exp(-h_min_covert)
    """

    params: SystemParams
    snr_target: float
    mu: float
    eta: float
    amp_gain: float
    p_delta_u: float
    headroom: float
    h_min_forward: float
    h_min_covert: float
    rho1: float
    rho2: float
    rho3: float
    p_c: float


def derive_constants(params: SystemParams, strict: bool = True) -> DerivedConstants:
    """Validate feasibility and precompute the shared constants.

    Raises InfeasibleRate when the granted rate exceeds what the S->R link
    can deliver at any relay power (p_s*h_sr2 <= sigma2_r*snr_target).

    When the covert power eats the whole budget ((mu+1)*p_delta >= p_r_max)
    the covert-capable event has probability zero; with ``strict`` (default)
    that raises CovertPowerExceedsBudget, while ``strict=False`` returns
    constants with p_c = 0 and h_min_covert = inf for sweep-style callers
    that want the degenerate point on a curve instead of an error.
    """
    snr_target = 2.0 ** (2.0 * params.r_sd) - 1.0
    received = params.p_s * params.h_sr2
    slack = received - params.sigma2_r * snr_target
    if slack <= 0.0:
        raise InfeasibleRate(
            f"rate grant r_sd={params.r_sd} needs p_s*h_sr2 > "
            f"sigma2_r*(2**(2*r_sd)-1) = {params.sigma2_r * snr_target:.6g}, "
            f"got {received:.6g}")
    mu = (received + params.sigma2_r) * snr_target / slack
    eta = params.p_s / params.sigma2_r
    amp_gain = 1.0 / math.sqrt(received + params.sigma2_r)
    p_delta_u = params.p_r_max / (2.0 * (mu + 1.0))
    headroom = params.p_r_max - (mu + 1.0) * params.p_delta
    if headroom <= 0.0:
        if strict:
            raise CovertPowerExceedsBudget(
                f"p_delta={params.p_delta:.6g} >= p_r_max/(mu+1) = "
                f"{params.p_r_max / (mu + 1.0):.6g}; the covert-capable "
                f"event has probability zero")
        h_min_covert = math.inf
        p_c = 0.0
    else:
        h_min_covert = mu * params.sigma2_d / headroom
        p_c = math.exp(-h_min_covert)
    h_min_forward = mu * params.sigma2_d / params.p_r_max
    rho1 = headroom * params.h_rs2 + params.sigma2_s
    rho2 = (mu + 1.0) * params.p_delta * params.h_rs2 + params.sigma2_s
    rho3 = params.p_r_max * params.h_rs2 + params.sigma2_s
    return DerivedConstants(
        params=params,
        snr_target=snr_target,
        mu=mu,
        eta=eta,
        amp_gain=amp_gain,
        p_delta_u=p_delta_u,
        headroom=headroom,
        h_min_forward=h_min_forward,
        h_min_covert=h_min_covert,
        rho1=rho1,
        rho2=rho2,
        rho3=rho3,
        p_c=p_c,
    )


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale, 10**(value_db/10)."""
    return 10.0 ** (value_db / 10.0)


_FIELD_NAMES = tuple(f.name for f in fields(SystemParams))


def parse_setting(key: str, raw: str, where: str) -> tuple[str, float]:
    """Resolve one ``key = value`` scenario setting to (field, linear value).

    Keys are SystemParams field names, optionally suffixed ``_db`` to supply
    the value in decibels (converted here, at the boundary). ``where``
    identifies the source (file:line or flag text) for error messages.
    """
    field = key[:-3] if key.endswith("_db") else key
    if field not in _FIELD_NAMES:
        raise ConfigError(f"{where}: unknown scenario key {key!r} "
                          f"(expected one of {', '.join(_FIELD_NAMES)}, "
                          f"each optionally suffixed _db)")
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{where}: could not parse value {raw!r} for "
                          f"{key!r} as a number") from None
    if key.endswith("_db"):
        value = db_to_linear(value)
    return field, value


def parse_scenario_text(text: str, source: str = "<scenario>") -> dict[str, float]:
    """Parse flat ``key = value`` scenario text into a field mapping.

    Blank lines and ``#`` comments are ignored. Each parameter may be given
    once, either linear or as its ``_db`` form; supplying both (or repeating
    a key) is an error, as is any unknown key. Values are returned linear.
    """
    items: dict[str, float] = {}
    seen: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}:{lineno}"
        key, sep, raw = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{where}: expected 'key = value', got {line!r}")
        key = key.strip()
        raw = raw.strip()
        field, value = parse_setting(key, raw, where)
        if field in seen:
            raise ConfigError(
                f"{where}: {key!r} conflicts with earlier {seen[field]!r}; "
                f"give each parameter once, linear or dB but not both")
        seen[field] = key
        items[field] = value
    return items


def scenario_from_mapping(items: dict[str, float]) -> SystemParams:
    """Build validated SystemParams from a parsed mapping (linear values)."""
    missing = [name for name in ("p_s", "p_r_max") if name not in items]
    if missing:
        raise ConfigError(f"scenario must define {' and '.join(missing)} "
                          f"(directly or via the _db form)")
    try:
        return SystemParams(**items)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path) -> SystemParams:
    """Load a scenario file (flat key = value text) into SystemParams."""
    text = Path(path).read_text()
    return scenario_from_mapping(parse_scenario_text(text, source=str(path)))
