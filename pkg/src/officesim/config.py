"""Scenario configuration: dataclasses, INI-file loading and validation.

A scenario file is plain INI. Every section maps onto one settings dataclass and
every key onto one of its fields; unknown sections or keys are errors. Values
given on the command line override the file.
"""
from __future__ import annotations

import configparser
import dataclasses
import io
import typing
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .climate import get_zone
from .comfort import SetpointLevels
from .errors import ConfigError
from .measures import MeasureSet, OccupancyHvacParams, PurgeParams, SmartPlugParams, preset
from .occupancy import OccupancyParams, PlugProfile
from .thermal import NetworkSettings
from .timeline import check_dt

W_PER_FT2 = 10.7639  # W/m2


@dataclass(frozen=True)
class ScheduleSettings:
    occupied_start: float = 8.0
    occupied_end: float = 17.0
    cooling_setpoint: float = 22.2
    cooling_setback: float = 29.0
    heating_setpoint: float = 21.1
    heating_setback: float = 15.6
    deadband: float = 1.0

    def __post_init__(self):
        if self.deadband <= 0:
            raise ConfigError("deadband must be > 0")
        self.levels()

    def levels(self) -> SetpointLevels:
        return SetpointLevels(self.cooling_setpoint, self.cooling_setback, self.heating_setpoint, self.heating_setback)


@dataclass(frozen=True)
class LoadSettings:
    plug_density: float = W_PER_FT2
    plug_occupied_fraction: float = 0.9
    plug_standby_fraction: float = 0.3
    lighting_density: float = W_PER_FT2
    lighting_occupied_fraction: float = 0.9
    lighting_unoccupied_fraction: float = 0.3
    exterior_lighting_w: float = 1600.0
    people_per_1000ft2: float = 5.0
    people_gain_w: float = 120.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ConfigError(f"loads.{f.name} must be >= 0")
        for name in ("lighting_occupied_fraction", "lighting_unoccupied_fraction"):
            if getattr(self, name) > 1:
                raise ConfigError(f"loads.{name} must be <= 1")
        self.plug_profile()

    def plug_profile(self) -> PlugProfile:
        return PlugProfile(self.plug_occupied_fraction, self.plug_standby_fraction)


@dataclass(frozen=True)
class HvacSettings:
    rated_cop: float = 3.0
    cop_oat_slope: float = 0.01
    supply_fan_power: float = 1200.0  # W per m3/s
    latent_fraction: float | None = None  # None: by climate moisture regime
    sizing_factor: float = 1.15
    min_capacity: float = 1000.0
    heating_sizing_factor: float = 1.25
    flow_per_watt: float = 5.37e-5
    cooling_capacity_w: float | None = None  # fixed per-zone capacity instead of autosizing
    continuous_fan: bool = False

    def __post_init__(self):
        if self.cooling_capacity_w is not None and self.cooling_capacity_w < 0:
            raise ConfigError("hvac.cooling_capacity_w must be >= 0")
        if self.sizing_factor <= 0 or self.flow_per_watt <= 0:
            raise ConfigError("hvac sizing factor and flow_per_watt must be > 0")


@dataclass(frozen=True)
class ReportSettings:
    cooling_season_start_month: int = 5
    cooling_season_end_month: int = 9

    def __post_init__(self):
        if not 1 <= self.cooling_season_start_month <= self.cooling_season_end_month <= 12:
            raise ConfigError("cooling season months must satisfy 1 <= start <= end <= 12")


@dataclass(frozen=True)
class ScenarioConfig:
    climate_zone: str = "4A"
    name: str = ""
    weather_file: Path | None = None  # None: bundled file for the zone
    occupancy: str = "static"  # static | stochastic
    seed: int = 0
    dt: int = 600
    measures: MeasureSet = field(default_factory=MeasureSet)
    schedule: ScheduleSettings = field(default_factory=ScheduleSettings)
    loads: LoadSettings = field(default_factory=LoadSettings)
    thermal: NetworkSettings = field(default_factory=NetworkSettings)
    hvac: HvacSettings = field(default_factory=HvacSettings)
    occupancy_model: OccupancyParams = field(default_factory=OccupancyParams)
    report: ReportSettings = field(default_factory=ReportSettings)

    def __post_init__(self):
        validate(self)

    @property
    def weather_path(self) -> Path:
        return Path(self.weather_file) if self.weather_file else get_zone(self.climate_zone).weather_path

    @property
    def label(self) -> str:
        return self.name or f"{self.climate_zone}:{self.measures.label()}"


def validate(config: ScenarioConfig) -> ScenarioConfig:
    """Cross-field checks shared by ``simulate`` and ``validate``."""
    get_zone(config.climate_zone)
    check_dt(config.dt)
    if config.occupancy not in ("static", "stochastic"):
        raise ConfigError(f"occupancy must be 'static' or 'stochastic', got {config.occupancy!r}")
    if config.weather_file is not None and not Path(config.weather_file).is_file():
        raise ConfigError(f"weather file not found: {config.weather_file}")
    return config


# section name -> (path of attribute names into ScenarioConfig, dataclass)
SECTIONS = {
    "scenario": ((), None),
    "measures": (("measures",), MeasureSet),
    "occupancy_hvac": (("measures", "occupancy_hvac_params"), OccupancyHvacParams),
    "smart_plugs": (("measures", "smart_plug_params"), SmartPlugParams),
    "night_purge": (("measures", "purge_params"), PurgeParams),
    "schedule": (("schedule",), ScheduleSettings),
    "loads": (("loads",), LoadSettings),
    "thermal": (("thermal",), NetworkSettings),
    "hvac": (("hvac",), HvacSettings),
    "occupancy": (("occupancy_model",), OccupancyParams),
    "report": (("report",), ReportSettings),
}
SCENARIO_KEYS = ("climate_zone", "name", "weather_file", "occupancy", "seed", "dt")
_NESTED = {"occupancy_hvac_params", "smart_plug_params", "purge_params"}


def _scalar_fields(cls):
    hints = typing.get_type_hints(cls)
    return [(f, hints[f.name]) for f in fields(cls)
            if f.name not in _NESTED and not dataclasses.is_dataclass(hints[f.name])]


def _coerce(raw: str, hint, where: str):
    text = raw.strip()
    args = typing.get_args(hint)
    if type(None) in args:
        if text.lower() in ("", "none", "null", "off"):
            return None
        hint = next(a for a in args if a is not type(None))
    try:
        if hint is bool:
            return _parse_bool(text)
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        if hint is Path:
            return Path(text)
        return text
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {getattr(hint, '__name__', hint)}") from None


def _parse_bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _get(obj, path):
    for name in path:
        obj = getattr(obj, name)
    return obj


def _set(obj, path, value):
    if not path:
        return value
    head, rest = path[0], path[1:]
    return replace(obj, **{head: _set(getattr(obj, head), rest, value)})


def _apply_section(config, section, items, base_dir):
    path, cls = SECTIONS[section]
    if cls is None:
        hints = typing.get_type_hints(ScenarioConfig)
        changes = {}
        for key, raw in items.items():
            if key not in SCENARIO_KEYS:
                raise ConfigError(f"[scenario] unknown key {key!r}")
            value = _coerce(raw, hints[key], f"[scenario] {key}")
            if key == "weather_file" and value is not None and not value.is_absolute() and base_dir:
                value = Path(base_dir) / value
            changes[key] = value
        return replace(config, **changes)
    known = {f.name: hint for f, hint in _scalar_fields(cls)}
    changes = {}
    for key, raw in items.items():
        if key not in known:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        changes[key] = _coerce(raw, known[key], f"[{section}] {key}")
    try:
        return _set(config, path, replace(_get(config, path), **changes))
    except ConfigError as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config_text(text: str, base_dir=None, defaults: ScenarioConfig | None = None) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    config = defaults or ScenarioConfig()
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        config = _apply_section(config, section, dict(parser.items(section)), base_dir)
    return validate(config)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, base_dir=path.parent)


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return str(value)


def to_ini(config: ScenarioConfig) -> str:
    """Render a config back to INI text (every key, current values)."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["scenario"] = {k: _format(getattr(config, k)) for k in SCENARIO_KEYS}
    for section, (path, cls) in SECTIONS.items():
        if cls is None:
            continue
        obj = _get(config, path)
        parser[section] = {f.name: _format(getattr(obj, f.name)) for f, _ in _scalar_fields(cls)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def schema_text() -> str:
    """Human-readable listing of every section, key and default."""
    lines = ["[scenario]"]
    default = ScenarioConfig()
    hints = typing.get_type_hints(ScenarioConfig)
    for key in SCENARIO_KEYS:
        lines.append(f"  {key} ({_type_name(hints[key])}, default {_format(getattr(default, key))})")
    for section, (path, cls) in SECTIONS.items():
        if cls is None:
            continue
        lines.append(f"[{section}]")
        obj = _get(default, path)
        for f, hint in _scalar_fields(cls):
            lines.append(f"  {f.name} ({_type_name(hint)}, default {_format(getattr(obj, f.name))})")
    return "\n".join(lines)


def _type_name(hint):
    args = typing.get_args(hint)
    if args:
        return " or ".join("none" if a is type(None) else a.__name__ for a in args)
    return hint.__name__


def with_measures(config: ScenarioConfig, name: str, variant: str | None = None) -> ScenarioConfig:
    """Swap in a measure preset. Occupancy-driven measures need a measured trace,
    so they also switch the occupancy model to stochastic."""
    measures = preset(name, variant or config.measures.variant, base=config.measures)
    occupancy = "stochastic" if (measures.occupancy_hvac or measures.smart_plugs) else config.occupancy
    return replace(config, measures=measures, occupancy=occupancy)


def apply_overrides(config: ScenarioConfig, *, measures=None, variant=None, seed=None, dt=None) -> ScenarioConfig:
    """Command-line flags win over file values, which win over defaults."""
    if measures is not None:
        config = with_measures(config, measures, variant)
    elif variant is not None:
        config = replace(config, measures=replace(config.measures, variant=variant))
    if seed is not None:
        config = replace(config, seed=seed)
    if dt is not None:
        config = replace(config, dt=dt)
    return config
