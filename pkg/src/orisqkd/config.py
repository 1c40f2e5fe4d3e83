"""Scenario configuration: flat ``key = value`` files with ``#`` comments.

Every key is optional; missing keys fall back to the reference scenario
(810 nm link from a 20 km HAP to an ORIS on a 50 m rooftop, LAP drone
250 m away at 45 degrees).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .atmosphere import AtmosphereSpec
from .beam import PhaseProfile, TxBeam
from .errors import ConfigError, InvalidConfig, InvalidFocus
from .gml import PE_PRESETS, HoverStats, ReceiverSpec
from .numerics import MAX_LAGUERRE_ORDER
from .scenario import Scenario

PE_CHOICES = ("none", "weak", "moderate", "strong", "custom")


def parse_profile(text: str) -> PhaseProfile:
    """Parse ``lps``, ``fps`` or ``qps:<focus in metres>``."""
    t = text.strip().lower()
    if t == "lps":
        return PhaseProfile.lps()
    if t == "fps":
        return PhaseProfile.fps()
    if t.startswith("qps:"):
        try:
            f = float(t[4:])
        except ValueError:
            raise ValueError(f"bad QPS focus distance in {text!r}") from None
        return PhaseProfile.qps(f)
    raise ValueError(f"profile must be lps, fps or qps:<f_m>, got {text!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    lambda_nm: float = 810.0
    tau_zen: float = 0.78
    beta_l_db_per_km: float = 0.43
    theta_div_urad: float = 16.5
    A: float = 3e-13
    v_g: float = 5.0
    h_oris_m: float = 50.0
    h_hap_m: float = 20000.0
    h_lap_m: float | None = None
    d_lap_m: float = 250.0
    phi_r_deg: float = 45.0
    aperture_radius_m: float = 0.045
    tau_eff: float = 0.5
    R_E_m: float = 6370e3
    oris_side_m: float = 1.0
    d_n_threshold_m: float | None = None
    pe_preset: str = "weak"
    pe_mu_x_m: float = 0.0
    pe_mu_y_m: float = 0.0
    pe_sigma_x_m: float = 0.0
    pe_sigma_y_m: float = 0.0
    profile: str = "lps"
    G: int = 180
    vacuum_mode: bool = False
    mc_n: int = 1_000_000
    mc_seed: int = 20240601

    @property
    def hover(self) -> HoverStats:
        if self.pe_preset == "custom":
            return HoverStats(self.pe_mu_x_m, self.pe_mu_y_m, self.pe_sigma_x_m, self.pe_sigma_y_m)
        return PE_PRESETS[self.pe_preset]

    @property
    def phase_profile(self) -> PhaseProfile:
        return parse_profile(self.profile)

    def scenario(self) -> Scenario:
        return Scenario(
            tx=TxBeam(wavelength=self.lambda_nm * 1e-9, theta_div=self.theta_div_urad * 1e-6),
            atm=AtmosphereSpec(
                A=self.A,
                v_g=self.v_g,
                tau_zen=self.tau_zen,
                beta_l_db_per_km=self.beta_l_db_per_km,
                vacuum_mode=self.vacuum_mode,
            ),
            receiver=ReceiverSpec(aperture_radius=self.aperture_radius_m, tau_eff=self.tau_eff),
            h_oris=self.h_oris_m,
            h_hap=self.h_hap_m,
            h_lap=self.h_lap_m,
            d_lap=self.d_lap_m,
            phi_r=math.radians(self.phi_r_deg),
            R_E=self.R_E_m,
            oris_side=(self.oris_side_m, self.oris_side_m),
            d_n_threshold=self.d_n_threshold_m,
            laguerre_order=self.G,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_KEYS = {"G", "mc_n", "mc_seed"}
_STR_KEYS = {"pe_preset", "profile"}
_OPTIONAL_KEYS = {"h_lap_m", "d_n_threshold_m"}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

# config key for each field name raised by the model constructors
_MODEL_FIELD_TO_KEY = {
    "A": "A",
    "v_g": "v_g",
    "tau_zen": "tau_zen",
    "beta_l_db_per_km": "beta_l_db_per_km",
    "aperture_radius": "aperture_radius_m",
    "tau_eff": "tau_eff",
    "h_hap": "h_hap_m",
    "h_lap": "h_lap_m",
    "d_lap": "d_lap_m",
    "phi_r": "phi_r_deg",
    "R_E": "R_E_m",
    "d_n_threshold": "d_n_threshold_m",
    "mu_x": "pe_mu_x_m",
    "mu_y": "pe_mu_y_m",
    "sigma_x": "pe_sigma_x_m",
    "sigma_y": "pe_sigma_y_m",
}


def _convert(key: str, raw: str):
    if key in _STR_KEYS:
        return raw.strip().lower()
    if key == "vacuum_mode":
        low = raw.strip().lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if key in _OPTIONAL_KEYS and raw.strip().lower() in {"", "none"}:
        return None
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(f"must be finite, got {raw!r}")
    if key in _INT_KEYS:
        if value != int(value):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    return value


def _range_checks(cfg: ScenarioConfig) -> list[tuple[str, str]]:
    """Single-field constraints as ``(key, message)`` pairs."""
    problems: list[tuple[str, str]] = []

    def need(ok: bool, key: str, msg: str) -> None:
        if not ok:
            problems.append((key, msg))

    need(cfg.lambda_nm > 0, "lambda_nm", "lambda must be > 0")
    need(0 < cfg.tau_zen <= 1, "tau_zen", "tau_zen must lie in (0, 1]")
    need(cfg.beta_l_db_per_km >= 0, "beta_l_db_per_km", "beta_l must be >= 0")
    need(cfg.theta_div_urad > 0, "theta_div_urad", "theta_div must be > 0")
    need(cfg.A >= 0, "A", "A must be >= 0")
    need(cfg.v_g >= 0, "v_g", "v_g must be >= 0")
    need(cfg.h_oris_m >= 0, "h_oris_m", "h_oris must be >= 0")
    need(cfg.h_hap_m > cfg.h_oris_m, "h_hap_m", "h_hap must exceed h_oris")
    need(cfg.d_lap_m >= 0, "d_lap_m", "d_lap must be >= 0")
    need(cfg.phi_r_deg >= 0, "phi_r_deg", "phi_r must be >= 0")
    need(cfg.phi_r_deg < 90, "phi_r_deg", "phi_r must be < 90")
    need(cfg.aperture_radius_m > 0, "aperture_radius_m", "aperture radius must be > 0")
    need(0 < cfg.tau_eff <= 1, "tau_eff", "tau_eff must lie in (0, 1]")
    need(cfg.R_E_m > 0, "R_E_m", "R_E must be > 0")
    need(cfg.oris_side_m > 0, "oris_side_m", "ORIS side must be > 0")
    if cfg.d_n_threshold_m is not None:
        need(cfg.d_n_threshold_m >= 0, "d_n_threshold_m", "d_n threshold must be >= 0")
    need(cfg.pe_preset in PE_CHOICES, "pe_preset", f"pe_preset must be one of {', '.join(PE_CHOICES)}")
    need(cfg.pe_sigma_x_m >= 0, "pe_sigma_x_m", "sigma_x must be >= 0")
    need(cfg.pe_sigma_y_m >= 0, "pe_sigma_y_m", "sigma_y must be >= 0")
    need(1 <= cfg.G <= MAX_LAGUERRE_ORDER, "G", f"G must lie in [1, {MAX_LAGUERRE_ORDER}]")
    need(cfg.mc_n >= 1000, "mc_n", "mc_n must be >= 1000")
    need(cfg.mc_seed >= 0, "mc_seed", "mc_seed must be >= 0")
    return problems


def validate_config(cfg: ScenarioConfig, *, path=None, lines: dict[str, int] | None = None) -> ScenarioConfig:
    """Re-check every constraint; raise :class:`ConfigError` on the first violation."""
    lines = lines or {}

    def fail(key: str, msg: str) -> ConfigError:
        return ConfigError(msg, path=None if path is None else str(path), line=lines.get(key), key=key)

    for key, msg in _range_checks(cfg):
        raise fail(key, msg)
    try:
        cfg.phase_profile
    except (ValueError, InvalidFocus) as exc:
        raise fail("profile", str(exc)) from None
    try:
        cfg.hover
        cfg.scenario().geometry(0.0)
    except InvalidConfig as exc:
        key = _MODEL_FIELD_TO_KEY.get(exc.field, exc.field)
        raise fail(key, str(exc)) from None
    return cfg


def parse_config_text(text: str, path=None) -> ScenarioConfig:
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    where = None if path is None else str(path)
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", path=where, line=lineno)
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError("unknown key", path=where, line=lineno, key=key)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", path=where, line=lineno, key=key)
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(str(exc), path=where, line=lineno, key=key) from None
        lines[key] = lineno
    return validate_config(ScenarioConfig(**values), path=path, lines=lines)


def parse_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path=str(p)) from None
    return parse_config_text(text, path=p)
