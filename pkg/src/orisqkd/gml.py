"""Geometric-and-misalignment loss (GML) at the receiver aperture.

The circular aperture of radius ``a`` is replaced by the square of equal
area (side ``a*sqrt(pi)``), which makes the capture fraction separable in
the two transverse axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .beam import RxBeam
from .errors import InvalidConfig
from .numerics import erf_accurate

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class HoverStats:
    """Independent Gaussian pointing offsets of the hovering drone, per axis."""

    mu_x: float = 0.0
    mu_y: float = 0.0
    sigma_x: float = 0.0
    sigma_y: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mu_x", "mu_y", "sigma_x", "sigma_y"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidConfig(name, f"must be finite, got {getattr(self, name)}")
        if self.sigma_x < 0:
            raise InvalidConfig("sigma_x", f"must be >= 0, got {self.sigma_x}")
        if self.sigma_y < 0:
            raise InvalidConfig("sigma_y", f"must be >= 0, got {self.sigma_y}")


PE_PRESETS: dict[str, HoverStats] = {
    "none": HoverStats(),
    "weak": HoverStats(0.3, 0.2, 0.2, 0.1),
    "moderate": HoverStats(0.4, 0.3, 0.25, 0.2),
    "strong": HoverStats(0.5, 0.4, 0.3, 0.25),
}


@dataclass(frozen=True)
class ReceiverSpec:
    aperture_radius: float = 0.045
    tau_eff: float = 0.5

    def __post_init__(self) -> None:
        if not self.aperture_radius > 0:
            raise InvalidConfig("aperture_radius", f"must be > 0, got {self.aperture_radius}")
        if not 0 < self.tau_eff <= 1:
            raise InvalidConfig("tau_eff", f"must lie in (0, 1], got {self.tau_eff}")


def _check_widths(rx: RxBeam) -> None:
    if not (rx.w_rx_x > 0 and rx.w_rx_y > 0):
        raise ValueError(f"beam widths must be > 0, got ({rx.w_rx_x}, {rx.w_rx_y})")


def _erf_window(upper, lower):
    """``erf(upper) - erf(lower)`` for ``upper > lower`` without cancellation.

    When both ends lie on the same side of zero the difference is taken
    between complementary error functions, which keeps far-tail windows
    positive instead of rounding them to zero.
    """
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    out = special.erf(upper) - special.erf(lower)
    right = lower > 0
    left = upper < 0
    if np.any(right) or np.any(left):
        out = np.where(right, special.erfc(lower) - special.erfc(upper), out)
        out = np.where(left, special.erfc(-upper) - special.erfc(-lower), out)
    return float(out) if out.ndim == 0 else out


def _axis_capture(delta, w: float, a: float):
    half = a * _SQRT_PI / (2.0 * w)
    shift = np.asarray(delta, dtype=float) / (_SQRT2 * w)
    return 0.5 * _erf_window(shift + half, shift - half)


def conditional_gml(offset_x, offset_y, rx: RxBeam, a: float):
    """Captured power fraction for a fixed beam-centre offset.

    Vectorised over ``offset_x`` and ``offset_y``; scalars give a ``float``.
    """
    _check_widths(rx)
    out = _axis_capture(offset_x, rx.w_rx_x, a) * _axis_capture(offset_y, rx.w_rx_y, a)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _axis_average(mu: float, sigma: float, w: float, a: float) -> float:
    scale = math.sqrt(1.0 + sigma**2 / w**2)
    shift = mu / (_SQRT2 * w)
    half = a * _SQRT_PI / (2.0 * w)
    return _erf_window((shift + half) / scale, (shift - half) / scale)


def average_gml(rx: RxBeam, hover: HoverStats, a: float) -> float:
    """Closed-form GML averaged over Gaussian hovering offsets.

    The profile only enters through the receiver widths in ``rx``.
    """
    _check_widths(rx)
    return 0.25 * _axis_average(hover.mu_x, hover.sigma_x, rx.w_rx_x, a) * _axis_average(
        hover.mu_y, hover.sigma_y, rx.w_rx_y, a
    )


def deterministic_gml(rx: RxBeam, a: float) -> float:
    """GML of a perfectly pointed beam."""
    _check_widths(rx)
    return erf_accurate(a * _SQRT_PI / (2.0 * rx.w_rx_x)) * erf_accurate(
        a * _SQRT_PI / (2.0 * rx.w_rx_y)
    )


def to_db(gml: float) -> float:
    """Power ratio in decibels (a loss is negative)."""
    return 10.0 * math.log10(gml)
