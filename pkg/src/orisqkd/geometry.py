"""HAP -> ORIS -> LAP link geometry.

Angles are zenith angles in radians unless a name ends in ``_deg``. The
azimuths are fixed to the coplanar configuration (incident azimuth 0,
reflected azimuth pi), so the incident and reflected footprints share axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidAngle, InvalidConfig

EARTH_RADIUS_M = 6370e3
AZIMUTH_IN = 0.0
AZIMUTH_OUT = math.pi


@dataclass(frozen=True)
class LinkGeometry:
    h_hap: float
    h_oris: float
    h_lap: float
    d_lap: float
    phi_i: float
    phi_r: float
    theta_i: float
    theta_r: float
    d1: float
    d2: float
    R_E: float = EARTH_RADIUS_M
    d_n_threshold: float | None = None

    @property
    def f_min(self) -> float:
        """Smallest QPS focus distance; QPS at this focus reproduces LPS."""
        return self.d2 / 2.0


def slant_distance_d1(phi_i: float, h_hap: float, h_oris: float, R_E: float = EARTH_RADIUS_M) -> float:
    """HAP-ORIS path length over a spherical Earth at zenith angle ``phi_i``."""
    if not 0 <= phi_i < math.pi / 2:
        raise InvalidAngle(f"phi_i must lie in [0, pi/2), got {phi_i}")
    if not h_hap > h_oris:
        raise InvalidConfig("h_hap", f"must exceed h_oris ({h_oris}), got {h_hap}")
    c = math.cos(phi_i)
    r_hap = R_E + h_hap
    r_oris = R_E + h_oris
    # (R+h_hap)^2 + (R+h_oris)^2 (cos^2 - 1), written to avoid cancellation
    disc = (r_hap - r_oris) * (r_hap + r_oris) + (r_oris * c) ** 2
    return math.sqrt(disc) - r_oris * c


def derive_geometry(
    *,
    phi_i: float,
    phi_r: float,
    h_hap: float,
    h_oris: float,
    d_lap: float,
    R_E: float = EARTH_RADIUS_M,
    h_lap: float | None = None,
    d_n_threshold: float | None = None,
) -> LinkGeometry:
    """Populate a :class:`LinkGeometry` from the scenario parameters.

    ``h_lap`` is derived from ``d_lap`` and ``phi_r``; a supplied value must
    agree to 1e-9 relative. With ``phi_r == 0`` the drone sits straight
    above the ORIS, ``d_lap`` must be 0 and ``h_lap`` is required.
    """
    if not 0 <= phi_r < math.pi / 2:
        raise InvalidConfig("phi_r", f"must lie in [0, 90) degrees, got {math.degrees(phi_r)}")
    if not 0 <= phi_i < math.pi / 2:
        raise InvalidConfig("phi_i", f"must lie in [0, 90) degrees, got {math.degrees(phi_i)}")
    if not R_E > 0:
        raise InvalidConfig("R_E", f"must be > 0, got {R_E}")
    if not h_hap > h_oris:
        raise InvalidConfig("h_hap", f"must exceed h_oris ({h_oris}), got {h_hap}")
    if not d_lap >= 0:
        raise InvalidConfig("d_lap", f"must be >= 0, got {d_lap}")

    theta_i = math.pi / 2 - phi_i
    theta_r = math.pi / 2 - phi_r

    if phi_r == 0.0:
        if d_lap != 0.0:
            raise InvalidConfig("d_lap", "must be 0 for a vertical ORIS-LAP link (phi_r = 0)")
        if h_lap is None:
            raise InvalidConfig("h_lap", "is required for a vertical ORIS-LAP link (phi_r = 0)")
        d2 = h_lap - h_oris
    else:
        if d_lap == 0.0:
            raise InvalidConfig("d_lap", "must be > 0 for a slanted ORIS-LAP link")
        derived = d_lap * math.tan(theta_r) + h_oris
        if h_lap is None:
            h_lap = derived
        elif not math.isclose(h_lap, derived, rel_tol=1e-9):
            raise InvalidConfig(
                "h_lap",
                f"{h_lap} is inconsistent with d_lap*tan(theta_r) + h_oris = {derived}",
            )
        d2 = d_lap / math.cos(theta_r)

    if not h_lap > h_oris:
        raise InvalidConfig("h_lap", f"must exceed h_oris ({h_oris}), got {h_lap}")
    if d_n_threshold is not None and not d2 > d_n_threshold:
        raise InvalidConfig(
            "d_n_threshold",
            f"ORIS-LAP distance {d2:.3f} m is not beyond the intermediate-field limit {d_n_threshold} m",
        )

    return LinkGeometry(
        h_hap=h_hap,
        h_oris=h_oris,
        h_lap=h_lap,
        d_lap=d_lap,
        phi_i=phi_i,
        phi_r=phi_r,
        theta_i=theta_i,
        theta_r=theta_r,
        d1=slant_distance_d1(phi_i, h_hap, h_oris, R_E),
        d2=d2,
        R_E=R_E,
        d_n_threshold=d_n_threshold,
    )
