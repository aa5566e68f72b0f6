"""Exception types raised by the covertrelay library."""


class CovertRelayError(Exception):
    """Base class for all covertrelay-specific errors."""


class InfeasibleRate(CovertRelayError):
    """The source-relay link cannot support the requested end-to-end rate.

    Raised when P_s * |h_sr|^2 <= sigma2_r * (2**(2*r_sd) - 1), in which
    case no finite relay power achieves the target rate and the
    power-scaling factor mu is undefined (or negative).
    """


class CovertPowerExceedsBudget(CovertRelayError):
    """The covert power leaves no headroom in the relay power budget.

    Raised when (mu + 1) * p_delta >= p_r_max: the channel-gain condition
    under which the relay can superimpose the covert signal then has
    probability zero, so every covert-mode quantity degenerates.
    """


class QuadratureNotConverged(CovertRelayError):
    """Numerical integration failed to meet its error target.

    Carries the estimate and the reported error bound so callers can
    inspect how far the integrator got.
    """

    def __init__(self, message, value=None, abs_err=None):
        super().__init__(message)
        self.value = value
        self.abs_err = abs_err


class NoFeasibleCovertPower(CovertRelayError):
    """No covert power in (0, p_delta_u] satisfies the covertness constraint."""


class ConfigError(CovertRelayError):
    """A scenario file or command-line setting could not be parsed."""
