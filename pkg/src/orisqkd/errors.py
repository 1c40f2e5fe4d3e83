"""Exception types raised by the channel and key-rate models."""

from __future__ import annotations


class OrisError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(OrisError, ArithmeticError):
    """An adaptive integration hit its subdivision limit before reaching tolerance."""


class OrderTooLarge(OrisError, ValueError):
    """Requested quadrature order exceeds the supported maximum."""


class InvalidAngle(OrisError, ValueError):
    """A zenith angle lies outside [0, pi/2)."""


class InvalidConfig(OrisError, ValueError):
    """A scenario parameter violates a physical constraint.

    ``field`` names the offending parameter.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class InvalidFocus(OrisError, ValueError):
    """QPS focus distance is not strictly positive."""


class OutOfSurface(OrisError, ValueError):
    """A phase-profile evaluation point lies outside the ORIS."""


class SaturatedChannel(OrisError, ValueError):
    """Transmittance reached 1, where the PLOB bound diverges."""


class ConfigError(OrisError, ValueError):
    """A scenario configuration file could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        key: str | None = None,
    ) -> None:
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.path = path
        self.line = line
        self.key = key
