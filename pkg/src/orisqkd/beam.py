"""Extended Huygens-Fresnel beam propagation through the ORIS.

Covers the collimated Gaussian transmit beam, its turbulence-broadened
long-term waist on the ORIS, the ORIS-LAP coherence length, the three ORIS
phase-shift profiles, and the equivalent beam widths at the receiver.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

from .atmosphere import AtmosphereSpec, PathSegment, integrate_cn2_moment, rms_wind
from .errors import InvalidFocus, OutOfSurface
from .geometry import LinkGeometry

ProfileKind = Literal["LPS", "QPS", "FPS"]


@dataclass(frozen=True)
class TxBeam:
    """Collimated Gaussian beam leaving the HAP."""

    wavelength: float = 810e-9
    theta_div: float = 16.5e-6

    def __post_init__(self) -> None:
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength}")
        if not self.theta_div > 0:
            raise ValueError(f"theta_div must be > 0, got {self.theta_div}")

    @property
    def w0(self) -> float:
        return self.wavelength / (math.pi * self.theta_div)

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def z_R1(self) -> float:
        return math.pi * self.w0**2 / self.wavelength


@dataclass(frozen=True)
class BeamAtOris:
    """Long-term beam on the ORIS plane.

    ``w_ix`` is the footprint semi-width along the plane of incidence,
    stretched by ``1/sin(theta_i)``; ``w_iy`` is the transverse one.
    """

    w_d1: float
    T: float
    Lambda0: float
    Lambda: float
    w_ix: float
    w_iy: float
    fits_oris: bool
    k: float


@dataclass(frozen=True)
class PhaseProfile:
    kind: ProfileKind
    focus_f: float | None = None
    phi_0: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("LPS", "QPS", "FPS"):
            raise ValueError(f"unknown phase profile {self.kind!r}")
        if self.kind == "QPS":
            if self.focus_f is None or not self.focus_f > 0:
                raise InvalidFocus(f"QPS focus distance must be > 0, got {self.focus_f}")
        elif self.focus_f is not None:
            raise ValueError(f"{self.kind} takes no focus distance")

    @classmethod
    def lps(cls) -> PhaseProfile:
        return cls("LPS")

    @classmethod
    def qps(cls, focus_f: float) -> PhaseProfile:
        return cls("QPS", focus_f)

    @classmethod
    def fps(cls) -> PhaseProfile:
        return cls("FPS")

    @property
    def label(self) -> str:
        if self.kind == "QPS":
            return f"qps:{self.focus_f:.17g}"
        return self.kind.lower()


@dataclass(frozen=True)
class RxBeam:
    """Equivalent beam widths at the receiver plane and what produced them."""

    w_rx_x: float
    w_rx_y: float
    epsilon: float
    rho0: float
    Lambda1: float


def turbulence_T(tx: TxBeam, geom: LinkGeometry, atm: AtmosphereSpec) -> float:
    """Turbulence-induced broadening factor of the HAP-ORIS leg."""
    if atm.vacuum_mode:
        return 0.0
    k = tx.k
    lam0 = 2.0 * geom.d1 / (k * tx.w0**2)
    lam = lam0 / (1.0 + lam0**2)
    height = geom.h_hap - geom.h_oris
    seg = PathSegment(geom.h_oris, geom.h_hap, geom.phi_i)
    v = rms_wind(atm.v_g, geom.h_oris)
    moment = integrate_cn2_moment(seg, atm, v, lambda u: (u / height) ** (5.0 / 3.0))
    return (
        4.35
        * lam ** (5.0 / 6.0)
        * k ** (7.0 / 6.0)
        * height ** (5.0 / 6.0)
        * (1.0 / math.cos(geom.phi_i)) ** (11.0 / 6.0)
        * moment
    )


def beam_at_oris(
    tx: TxBeam,
    geom: LinkGeometry,
    atm: AtmosphereSpec,
    oris_side: tuple[float, float] = (1.0, 1.0),
) -> BeamAtOris:
    """Long-term waist and footprint of the incident beam on the ORIS.

    ``fits_oris`` compares footprint diameters with the ORIS sides; when it
    is false the saturated power-scaling assumption does not hold and a
    ``RuntimeWarning`` is issued.
    """
    k = tx.k
    lam0 = 2.0 * geom.d1 / (k * tx.w0**2)
    T = turbulence_T(tx, geom, atm)
    w_d1 = tx.w0 * math.sqrt((1.0 + lam0**2) * (1.0 + T))
    w_ix = w_d1 / math.sin(geom.theta_i)
    w_iy = w_d1
    fits = 2.0 * w_ix <= oris_side[0] and 2.0 * w_iy <= oris_side[1]
    if not fits:
        # constant text so the default filter reports it once per call site
        warnings.warn(
            "incident footprint exceeds the ORIS; see BeamAtOris.fits_oris",
            RuntimeWarning,
            stacklevel=2,
        )
    return BeamAtOris(
        w_d1=w_d1,
        T=T,
        Lambda0=lam0,
        Lambda=lam0 / (1.0 + lam0**2),
        w_ix=w_ix,
        w_iy=w_iy,
        fits_oris=fits,
        k=k,
    )


def coherence_length_rho0(geom: LinkGeometry, atm: AtmosphereSpec, k: float) -> float:
    """Coherence length of the ORIS-LAP leg; ``inf`` without turbulence."""
    if atm.vacuum_mode:
        return math.inf
    seg = PathSegment(geom.h_oris, geom.h_lap, geom.phi_r)
    v = rms_wind(atm.v_g, geom.h_oris)
    moment = integrate_cn2_moment(seg, atm, v, lambda u: 1.0)
    if moment == 0.0:
        return math.inf
    return (1.45 * k**2 * moment) ** (-3.0 / 5.0) * math.cos(geom.phi_r) ** (3.0 / 5.0)


def _diffractive_widths(
    w: float, eps: float, lam1: float, si: float, sr: float, focus_term: float
) -> tuple[float, float]:
    # shared by LPS (focus_term = 1) and QPS so that f = d2/2 reproduces LPS exactly
    ratio = si**2 / sr**2
    w_x = w * abs(sr) / abs(si) * math.sqrt(eps * (ratio * lam1) ** 2 + focus_term)
    w_y = w * math.sqrt(eps * lam1**2 + focus_term)
    return w_x, w_y


def rx_beam_widths(
    profile: PhaseProfile, boris: BeamAtOris, geom: LinkGeometry, rho0: float
) -> RxBeam:
    """Equivalent beam widths at the receiver aperture for a phase profile."""
    w = boris.w_d1
    eps = 1.0 + 2.0 * w**2 / rho0**2
    lam1 = 2.0 * geom.d2 / (boris.k * w**2)
    si = math.sin(geom.theta_i)
    sr = math.sin(geom.theta_r)

    if profile.kind == "LPS":
        w_x, w_y = _diffractive_widths(w, eps, lam1, si, sr, 1.0)
    elif profile.kind == "QPS":
        f = profile.focus_f
        if f is None or not f > 0:
            raise InvalidFocus(f"QPS focus distance must be > 0, got {f}")
        if f < geom.d2 / 2.0:
            warnings.warn(
                f"QPS focus {f} m is below d2/2 = {geom.d2 / 2.0} m (outside the narrowing regime)",
                RuntimeWarning,
                stacklevel=2,
            )
        w_x, w_y = _diffractive_widths(w, eps, lam1, si, sr, (geom.d2 / (2.0 * f)) ** 2)
    else:
        w_x = w * abs(si) / abs(sr) * math.sqrt(eps) * lam1
        w_y = w * math.sqrt(eps) * lam1

    return RxBeam(w_rx_x=w_x, w_rx_y=w_y, epsilon=eps, rho0=rho0, Lambda1=lam1)


def phase_gradients(geom: LinkGeometry) -> tuple[float, float]:
    """Linear phase gradients steering the incident beam towards the LAP.

    With the coplanar azimuths (0 in, pi out) the cosines are +1 and -1 and
    both sines vanish, so the transverse gradient is exactly zero.
    """
    phi_x = math.cos(geom.theta_i) - math.cos(geom.theta_r)
    phi_y = 0.0
    return phi_x, phi_y


def phase_profile_value(
    profile: PhaseProfile,
    point: tuple[float, float],
    geom: LinkGeometry,
    tx: TxBeam,
    R_d1: float | None = None,
    oris_side: tuple[float, float] = (1.0, 1.0),
) -> float:
    """Phase (radians) applied by the ORIS at ``point = (x_r, y_r)``.

    ``R_d1`` is the incident wavefront curvature radius; it defaults to
    ``d1`` since the ORIS lies far beyond the Rayleigh range.
    """
    x, y = point
    if abs(x) > oris_side[0] / 2.0 or abs(y) > oris_side[1] / 2.0:
        raise OutOfSurface(f"point ({x}, {y}) lies outside the {oris_side[0]} x {oris_side[1]} m ORIS")
    k = tx.k
    R = geom.d1 if R_d1 is None else R_d1
    si = math.sin(geom.theta_i)
    sr = math.sin(geom.theta_r)
    phi_x, phi_y = phase_gradients(geom)

    if profile.kind == "LPS":
        return k * (phi_x * x + phi_y * y + profile.phi_0)
    if profile.kind == "QPS":
        f = profile.focus_f
        phi_x2 = -(si**2) / (2.0 * R) - sr**2 / (2.0 * geom.d2) + sr**2 / (4.0 * f)
        phi_y2 = -1.0 / (2.0 * R) - 1.0 / (2.0 * geom.d2) + 1.0 / (4.0 * f)
        return k * (phi_x2 * x**2 + phi_y2 * y**2 + phi_x * x + phi_y * y + profile.phi_0)

    # FPS cancels the incident phase and the path to the aperture centre
    d1_hat = geom.d1 - x * math.cos(geom.theta_i)
    psi_in = k * (d1_hat + (x**2 * si**2 + y**2) / (2.0 * R)) - math.atan(geom.d1 / tx.z_R1)
    ox = -geom.d2 * math.cos(geom.theta_r)
    oz = geom.d2 * sr
    return -psi_in - k * math.sqrt((ox - x) ** 2 + y**2 + oz**2)
