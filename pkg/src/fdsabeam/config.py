"""Scenario configuration: a flat key=value format with CLI overrides.

One file describes geometry, beamformer, link budget, grid and optimizer
settings; every run is reproducible from the file plus a seed. Values on
the right of `=` are plain literals; `#` starts a comment; booleans are
written on/off.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .bcdla import BcdlaConfig, bcdla_optimize
from .geometry import SidelobeSearch, sidelobe_fitness
from .patterns import ArrayGeometry, FieldPoint, FoiVector, beamformer_layout
from .secrecy import GridSpec, NoiseModel, dbm_to_mw
from .soa import SoaConfig, soa_optimize


class ConfigError(Exception):
    """Invalid or inconsistent scenario configuration."""


BEAMFORMERS = ("fab", "rab", "frb")
FOI_SOURCES = ("zero", "explicit", "soa", "bcdla")


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully describes one experiment; None fields are derived on resolve()."""

    carrier_hz: float = 73e9
    spacing_m: float | None = None  # default: half a wavelength
    subarrays: int = 15
    elements_per_subarray: int = 11
    beamformer: str = "frb"
    foi_source: str = "zero"
    foi_hz: tuple[float, ...] | None = None  # explicit offsets
    foi_max_hz: float | None = None  # default: 1e-5 * carrier
    rab_delta_f_hz: float | None = None
    target_theta_deg: float = 90.0
    target_range_m: float = 500.0
    eve_theta_deg: float | None = None
    eve_range_m: float | None = None
    tx_power_dbm: float = 40.0
    bob_noise_dbm: float = -100.0
    eve_noise_dbm: float = -100.0
    path_loss: bool = False
    theta_start_deg: float = 0.0
    theta_stop_deg: float = 179.0
    theta_step_deg: float = 0.5
    range_start_m: float = 50.0
    range_stop_m: float | None = None  # default: 2 * target range
    range_step_m: float = 5.0
    profile_range_m: float = 380.0
    profile_theta_deg: float | None = None  # default: target direction
    sidelobe_safety_theta_step_deg: float = 1.0
    sidelobe_safety_range_step_m: float | None = None  # default: target range / 100
    sidelobe_refine_top: int = 64
    soa_population: int = 40
    soa_iterations: int = 100
    bcdla_epsilon_hz: float = 1.0
    bcdla_max_iterations: int | None = None
    bcdla_half_cross_term: bool = True
    seed: int = 1

    def resolve(self) -> "ScenarioConfig":
        """Fill derived defaults and validate cross-field consistency."""
        if self.beamformer not in BEAMFORMERS:
            raise ConfigError(f"beamformer must be one of {BEAMFORMERS}")
        if self.foi_source not in FOI_SOURCES:
            raise ConfigError(f"foi_source must be one of {FOI_SOURCES}")
        out = self
        if out.spacing_m is None:
            wavelength = 2.99792458e8 / out.carrier_hz
            out = replace(out, spacing_m=0.5 * wavelength)
        if out.foi_max_hz is None:
            out = replace(out, foi_max_hz=1e-5 * out.carrier_hz)
        if out.range_stop_m is None:
            out = replace(out, range_stop_m=2.0 * out.target_range_m)
        if out.foi_max_hz > 1e-2 * out.carrier_hz:
            raise ConfigError("foi_max_hz must stay far below the carrier frequency")
        if out.foi_source == "explicit":
            if out.foi_hz is None:
                raise ConfigError("foi_source=explicit requires foi_hz")
            if len(out.foi_hz) != out.subarrays:
                raise ConfigError("foi_hz length must equal subarrays")
        if out.beamformer == "rab" and out.rab_delta_f_hz is None:
            raise ConfigError("beamformer=rab requires rab_delta_f_hz")
        return out

    # constructed pieces -------------------------------------------------

    def geometry(self) -> ArrayGeometry:
        try:
            return ArrayGeometry(
                self.carrier_hz, self.spacing_m, self.subarrays, self.elements_per_subarray
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def target(self) -> FieldPoint:
        return FieldPoint.from_degrees(self.target_theta_deg, self.target_range_m)

    def eve(self) -> FieldPoint | None:
        if self.eve_theta_deg is None or self.eve_range_m is None:
            return None
        return FieldPoint.from_degrees(self.eve_theta_deg, self.eve_range_m)

    def noise(self) -> NoiseModel:
        return NoiseModel.from_dbm(self.bob_noise_dbm, self.eve_noise_dbm)

    def tx_power_mw(self) -> float:
        return dbm_to_mw(self.tx_power_dbm)

    def grid(self) -> GridSpec:
        try:
            return GridSpec(
                self.theta_start_deg,
                self.theta_stop_deg,
                self.theta_step_deg,
                self.range_start_m,
                self.range_stop_m,
                self.range_step_m,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def sidelobe_search(self) -> SidelobeSearch:
        return SidelobeSearch(
            self.target(),
            self.range_start_m,
            self.range_stop_m,
            theta_min_deg=self.theta_start_deg,
            theta_max_deg=self.theta_stop_deg,
            safety_theta_step_deg=self.sidelobe_safety_theta_step_deg,
            safety_range_step_m=self.sidelobe_safety_range_step_m,
            refine_top=self.sidelobe_refine_top,
        )

    def soa_config(self, bound_hz: float | None = None) -> SoaConfig:
        return SoaConfig(
            bound_hz=self.foi_max_hz if bound_hz is None else bound_hz,
            population=self.soa_population,
            iterations=self.soa_iterations,
            rng_seed=self.seed,
        )

    def bcdla_config(self) -> BcdlaConfig:
        return BcdlaConfig(
            bound_hz=self.foi_max_hz,
            epsilon_hz=self.bcdla_epsilon_hz,
            max_iterations=self.bcdla_max_iterations,
            rng_seed=self.seed,
            half_cross_term=self.bcdla_half_cross_term,
        )

    def resolve_offsets(self):
        """Effective (geometry, offsets, trace) for the configured beamformer.

        Runs the requested optimizer when foi_source is soa or bcdla; the
        returned trace is None otherwise.
        """
        geom = self.geometry()
        trace = None
        if self.beamformer in ("fab", "rab"):
            eff, offs = beamformer_layout(
                geom, self.beamformer, rab_delta_f_hz=self.rab_delta_f_hz
            )
            return eff, offs, trace
        if self.foi_source == "zero":
            offsets = np.zeros(self.subarrays)
        elif self.foi_source == "explicit":
            try:
                offsets = FoiVector(self.foi_hz, self.foi_max_hz).as_array()
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        elif self.foi_source == "soa":
            fitness = sidelobe_fitness(geom, self.sidelobe_search())
            foi, trace = soa_optimize(geom, self.target(), self.soa_config(), fitness)
            offsets = foi.as_array()
        else:  # bcdla
            eve = self.eve()
            if eve is None:
                raise ConfigError(
                    "foi_source=bcdla needs the eavesdropper location "
                    "(eve_theta_deg, eve_range_m): the scheme nulls a known position"
                )
            foi, trace = bcdla_optimize(geom, self.target(), eve, self.bcdla_config())
            offsets = foi.as_array()
        eff, offs = beamformer_layout(geom, "frb", offsets_hz=offsets)
        return eff, offs, trace

    def dump(self) -> str:
        """Effective configuration as sorted key=value lines."""
        resolved = self.resolve()
        lines = []
        for f in sorted(fields(resolved), key=lambda f: f.name):
            value = getattr(resolved, f.name)
            lines.append(f"{f.name}={_format_value(value)}")
        return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(v)) for v in value)
    return str(value)


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("on", "true", "1", "yes"):
        return True
    if low in ("off", "false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected on/off, got {raw!r}")


def _parse_field(key: str, raw: str):
    raw = raw.strip()
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    if raw == "":
        return None
    try:
        if key in ("path_loss", "bcdla_half_cross_term"):
            return _parse_bool(raw, key)
        if key == "foi_hz":
            return tuple(float(part) for part in raw.split(",") if part.strip())
        if key in ("beamformer", "foi_source"):
            return raw
        if key in (
            "subarrays",
            "elements_per_subarray",
            "soa_population",
            "soa_iterations",
            "bcdla_max_iterations",
            "sidelobe_refine_top",
            "seed",
        ):
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def parse_assignments(pairs) -> dict:
    """key=value strings (file lines or --set arguments) into typed fields."""
    out = {}
    for pair in pairs:
        stripped = pair.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected key=value, got {pair!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        out[key] = _parse_field(key, raw)
    return out


def load_scenario(path: str | None, overrides=()) -> ScenarioConfig:
    """Build a scenario from an optional file plus override assignments."""
    mapping = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                mapping.update(parse_assignments(fh.readlines()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    mapping.update(parse_assignments(overrides))
    try:
        config = ScenarioConfig(**mapping)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return config.resolve()
