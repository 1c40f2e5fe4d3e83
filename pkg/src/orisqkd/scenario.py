"""End-to-end evaluation of one HAP -> ORIS -> LAP link.

:class:`Scenario` holds everything that does not change along a sweep;
:meth:`Scenario.at` resolves the angle-dependent quantities once so that
many phase profiles or focus distances can be evaluated cheaply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .atmosphere import (
    AtmosphereSpec,
    AtmosphericLoss,
    PathSegment,
    atmospheric_loss,
    rms_wind,
    rytov_variance,
    scintillation_index,
)
from .beam import (
    BeamAtOris,
    PhaseProfile,
    RxBeam,
    TxBeam,
    beam_at_oris,
    coherence_length_rho0,
    rx_beam_widths,
)
from .geometry import EARTH_RADIUS_M, LinkGeometry, derive_geometry
from .gml import HoverStats, ReceiverSpec, average_gml, deterministic_gml
from .numerics import gauss_laguerre
from .skr import DEFAULT_LAGUERRE_ORDER, ChannelBudget, FocusOptimum, optimize_focus, plob_average_gl


@dataclass(frozen=True)
class Scenario:
    tx: TxBeam = field(default_factory=TxBeam)
    atm: AtmosphereSpec = field(default_factory=AtmosphereSpec)
    receiver: ReceiverSpec = field(default_factory=ReceiverSpec)
    h_oris: float = 50.0
    h_hap: float = 20000.0
    h_lap: float | None = 300.0
    d_lap: float = 250.0
    phi_r: float = math.pi / 4
    R_E: float = EARTH_RADIUS_M
    oris_side: tuple[float, float] = (1.0, 1.0)
    d_n_threshold: float | None = None
    laguerre_order: int = DEFAULT_LAGUERRE_ORDER

    def geometry(self, phi_i: float) -> LinkGeometry:
        return derive_geometry(
            phi_i=phi_i,
            phi_r=self.phi_r,
            h_hap=self.h_hap,
            h_oris=self.h_oris,
            d_lap=self.d_lap,
            R_E=self.R_E,
            h_lap=self.h_lap,
            d_n_threshold=self.d_n_threshold,
        )

    def at(self, phi_i: float) -> LinkState:
        """Resolve every quantity that depends on the incident angle only."""
        geom = self.geometry(phi_i)
        k = self.tx.k
        v = rms_wind(self.atm.v_g, geom.h_oris)
        s1 = rytov_variance(PathSegment(geom.h_oris, geom.h_hap, geom.phi_i), self.atm, k, v)
        s2 = rytov_variance(PathSegment(geom.h_oris, geom.h_lap, geom.phi_r), self.atm, k, v)
        return LinkState(
            scenario=self,
            geom=geom,
            boris=beam_at_oris(self.tx, geom, self.atm, self.oris_side),
            rho0=coherence_length_rho0(geom, self.atm, k),
            sigma_R1_sq=s1,
            sigma_R2_sq=s2,
            loss=atmospheric_loss(geom, self.atm),
        )


@dataclass(frozen=True)
class LinkState:
    scenario: Scenario
    geom: LinkGeometry
    boris: BeamAtOris
    rho0: float
    sigma_R1_sq: float
    sigma_R2_sq: float
    loss: AtmosphericLoss

    @property
    def sigma_R_sq(self) -> float:
        return self.sigma_R1_sq + self.sigma_R2_sq

    @property
    def scintillation(self) -> float:
        """Scintillation index of the HAP-ORIS leg."""
        return scintillation_index(self.sigma_R1_sq)

    def widths(self, profile: PhaseProfile) -> RxBeam:
        return rx_beam_widths(profile, self.boris, self.geom, self.rho0)

    def gml(self, profile: PhaseProfile, hover: HoverStats) -> float:
        return average_gml(self.widths(profile), hover, self.scenario.receiver.aperture_radius)

    def gml_deterministic(self, profile: PhaseProfile) -> float:
        return deterministic_gml(self.widths(profile), self.scenario.receiver.aperture_radius)

    def budget(self, profile: PhaseProfile, hover: HoverStats) -> ChannelBudget:
        return ChannelBudget(
            tau_eff=self.scenario.receiver.tau_eff,
            tau_l=self.loss.tau_l,
            tau_p=self.gml(profile, hover),
            sigma_R_sq=self.sigma_R_sq,
        )

    def skr(self, profile: PhaseProfile, hover: HoverStats) -> float:
        """Turbulence-averaged PLOB bound in bits per channel use."""
        rule = gauss_laguerre(self.scenario.laguerre_order)
        return plob_average_gl(self.budget(profile, hover), rule)

    def optimize_focus(
        self,
        hover: HoverStats,
        f_grid,
        *,
        refine: bool = True,
        workers: int | None = None,
    ) -> FocusOptimum:
        """Key-rate-optimal QPS focus distance over ``f_grid``."""
        return optimize_focus(
            lambda f: self.skr(PhaseProfile.qps(f), hover),
            f_grid,
            self.geom.f_min,
            refine=refine,
            workers=workers,
        )
