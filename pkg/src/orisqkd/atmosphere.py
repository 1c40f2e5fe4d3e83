"""Altitude-dependent turbulence and attenuation along the two link legs.

Hufnagel-Valley refractive-index structure profile driven by a modified
Greenwood wind model, Rytov variances of slanted legs, the general
scintillation index, and the deterministic path losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, TYPE_CHECKING

from .errors import InvalidAngle, InvalidConfig
from .numerics import integrate_adaptive

if TYPE_CHECKING:
    from .geometry import LinkGeometry

# Greenwood wind bump and the altitude band that defines the rms wind speed
WIND_BUMP_AMPLITUDE = 30.0
WIND_BUMP_CENTER = 12448.0
WIND_BUMP_WIDTH = 4800.0
RMS_WIND_LOW = 5000.0
RMS_WIND_HIGH = 20000.0

ALTITUDE_RTOL = 1e-9


@dataclass(frozen=True)
class AtmosphereSpec:
    """Ground-level turbulence and attenuation parameters.

    ``vacuum_mode`` switches the structure constant off everywhere, which
    zeroes every Rytov variance and the beam-broadening terms.
    """

    A: float = 3e-13
    v_g: float = 5.0
    tau_zen: float = 0.78
    beta_l_db_per_km: float = 0.43
    vacuum_mode: bool = False

    def __post_init__(self) -> None:
        if not self.A >= 0:
            raise InvalidConfig("A", f"must be >= 0, got {self.A}")
        if not self.v_g >= 0:
            raise InvalidConfig("v_g", f"must be >= 0, got {self.v_g}")
        if not 0 < self.tau_zen <= 1:
            raise InvalidConfig("tau_zen", f"must lie in (0, 1], got {self.tau_zen}")
        if not self.beta_l_db_per_km >= 0:
            raise InvalidConfig(
                "beta_l_db_per_km", f"must be >= 0, got {self.beta_l_db_per_km}"
            )

    @property
    def beta_l_per_m(self) -> float:
        """Extinction coefficient in nepers per metre."""
        return db_per_km_to_per_m(self.beta_l_db_per_km)


@dataclass(frozen=True)
class PathSegment:
    """A slanted leg between two altitudes at a fixed zenith angle (radians)."""

    h_low: float
    h_high: float
    zenith_angle: float

    def __post_init__(self) -> None:
        if not self.h_low < self.h_high:
            raise InvalidConfig("h_high", f"must exceed h_low ({self.h_low}), got {self.h_high}")
        if not 0 <= self.zenith_angle < math.pi / 2:
            raise InvalidAngle(f"zenith angle must lie in [0, pi/2), got {self.zenith_angle}")


class AtmosphericLoss(NamedTuple):
    tau_l1: float
    tau_l2: float
    tau_l: float


def db_per_km_to_per_m(beta_db_per_km: float) -> float:
    return beta_db_per_km * math.log(10.0) / (10.0 * 1000.0)


def wind_profile(
    h: float, v_g: float, h_oris: float, amplitude: float = WIND_BUMP_AMPLITUDE
) -> float:
    """Greenwood wind speed at altitude ``h``, shifted by the ORIS altitude."""
    return v_g + amplitude * math.exp(-(((h - WIND_BUMP_CENTER + h_oris) / WIND_BUMP_WIDTH) ** 2))


@lru_cache(maxsize=64)
def rms_wind(v_g: float, h_oris: float, amplitude: float = WIND_BUMP_AMPLITUDE) -> float:
    """Root-mean-square transverse wind speed over 5-20 km."""
    if not v_g >= 0:
        raise ValueError(f"v_g must be >= 0, got {v_g}")
    span = RMS_WIND_HIGH - RMS_WIND_LOW
    if v_g == 0 and amplitude == 0:
        return 0.0
    mean_sq = integrate_adaptive(
        lambda h: wind_profile(h, v_g, h_oris, amplitude) ** 2,
        RMS_WIND_LOW,
        RMS_WIND_HIGH,
        ALTITUDE_RTOL,
        breakpoints=[WIND_BUMP_CENTER - h_oris],
    ) / span
    return math.sqrt(mean_sq)


def cn2(h: float, spec: AtmosphereSpec, v_rms: float) -> float:
    """Hufnagel-Valley refractive-index structure parameter in m^-2/3."""
    if spec.vacuum_mode:
        return 0.0
    return (
        0.00594 * (v_rms / 27.0) ** 2 * (1e-5 * h) ** 10 * math.exp(-h / 1000.0)
        + 2.7e-16 * math.exp(-h / 1500.0)
        + spec.A * math.exp(-h / 100.0)
    )


def _altitude_breakpoints(h_low: float, h_high: float) -> list[float]:
    # scale heights of the three Cn2 terms, measured from the segment floor
    span = h_high - h_low
    return [u for u in (100.0, 500.0, 1500.0, 5000.0, 10000.0) if u < span]


def integrate_cn2_moment(
    seg: PathSegment,
    spec: AtmosphereSpec,
    v_rms: float,
    weight,
    rel_tol: float = ALTITUDE_RTOL,
) -> float:
    """``int Cn2(h) weight(h - h_low) dh`` over the segment.

    Integrated in the shifted variable ``u = h - h_low`` so that power-law
    weights keep their endpoint singularity on a panel boundary.
    """
    if spec.vacuum_mode:
        return 0.0
    span = seg.h_high - seg.h_low
    return integrate_adaptive(
        lambda u: cn2(u + seg.h_low, spec, v_rms) * weight(u),
        0.0,
        span,
        rel_tol,
        breakpoints=_altitude_breakpoints(seg.h_low, seg.h_high),
    )


def rytov_variance(seg: PathSegment, spec: AtmosphereSpec, k: float, v_rms: float) -> float:
    """Rytov variance of a slanted leg.

    The same ground-referenced ``(h - h_low)**(5/6)`` kernel is applied to
    both the HAP-ORIS and the ORIS-LAP legs.
    """
    if spec.vacuum_mode:
        return 0.0
    moment = integrate_cn2_moment(seg, spec, v_rms, lambda u: u ** (5.0 / 6.0))
    return 2.25 * k ** (7.0 / 6.0) * (1.0 / math.cos(seg.zenith_angle)) ** (11.0 / 6.0) * moment


def scintillation_index(sigma_R1_sq: float) -> float:
    """General scintillation index valid across turbulence regimes."""
    if sigma_R1_sq < 0:
        raise ValueError(f"Rytov variance must be >= 0, got {sigma_R1_sq}")
    s = sigma_R1_sq
    p = s ** (6.0 / 5.0)  # sigma_R^(12/5)
    exponent = 0.49 * s / (1.0 + 1.11 * p) ** (7.0 / 6.0) + 0.51 * s / (1.0 + 0.69 * p) ** (5.0 / 6.0)
    return math.expm1(exponent)


def atmospheric_loss(geom: LinkGeometry, spec: AtmosphereSpec) -> AtmosphericLoss:
    """Deterministic path losses of the HAP-ORIS and ORIS-LAP legs."""
    if not 0 <= geom.phi_i < math.pi / 2:
        raise InvalidAngle(f"phi_i must lie in [0, pi/2), got {geom.phi_i}")
    tau_l1 = spec.tau_zen ** (1.0 / math.cos(geom.phi_i))
    tau_l2 = math.exp(-spec.beta_l_per_m * geom.d2)
    return AtmosphericLoss(tau_l1, tau_l2, tau_l1 * tau_l2)
