"""Reduced-order thermal network of the single-story five-zone small office.

Each zone is a 2R2C network: an air node coupled to outdoors through the
envelope, infiltration and (night-purge) ventilation, and a lumped internal mass
node coupled only to the air. Zones do not exchange heat with one another.

Integration is backward Euler on the linear system, so all heat flows in a step
are evaluated at end-of-step temperatures and the scheme is unconditionally
stable.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

from .climate import data_path
from .errors import ConfigError, NumericError

RHO_CP_AIR = 1.2 * 1005.0  # J/(m3 K)
MAX_DT = 900.0

ZONE_IDS = ("core", "south", "east", "north", "west")


@dataclass(frozen=True)
class ZoneParams:
    zone_id: str
    floor_area: float  # m2
    volume: float  # m3
    air_capacitance: float  # J/K
    mass_capacitance: float  # J/K
    envelope_ua: float  # W/K, air <-> outdoor
    mass_coupling: float  # W/K, air <-> mass
    infiltration_ach: float  # 1/h
    window_solar_aperture: float  # m2, SHGC-weighted glazing area
    ventilation_max_ach: float  # 1/h with purge dampers open
    solar_factor: float = 0.4
    outdoor_air_ach: float = 0.0  # 1/h minimum outdoor air during scheduled occupancy

    def __post_init__(self):
        positive = ("floor_area", "volume", "air_capacitance", "mass_capacitance", "envelope_ua")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{self.zone_id}: {name} must be > 0")
        for name in ("mass_coupling", "infiltration_ach", "window_solar_aperture", "ventilation_max_ach", "solar_factor",
                     "outdoor_air_ach"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{self.zone_id}: {name} must be >= 0")

    def air_conductance(self, ventilation_ach: float = 0.0) -> float:
        """Total air-node conductance to outdoors (envelope + airflow), W/K."""
        return self.envelope_ua + RHO_CP_AIR * self.volume * (self.infiltration_ach + ventilation_ach) / 3600.0


@dataclass(frozen=True)
class ZoneState:
    air_temperature: float
    mass_temperature: float


@dataclass(frozen=True)
class Boundary:
    outdoor: float  # degC
    solar: float = 0.0  # W/m2 global horizontal
    internal_gains: float = 0.0  # W to the air node
    hvac_sensible: float = 0.0  # W to the air node, negative = cooling
    ventilation_ach: float = 0.0  # 1/h on top of infiltration


@dataclass(frozen=True)
class EnvelopeRow:
    wall_u: float
    roof_u: float
    window_u: float
    shgc: float


def load_envelope_table(path=None) -> dict[str, EnvelopeRow]:
    path = path or data_path("envelope_90_1_2004.csv")
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    table = {}
    for r in csv.DictReader(lines):
        row = EnvelopeRow(float(r["wall_u"]), float(r["roof_u"]), float(r["window_u"]), float(r["shgc"]))
        if min(row.wall_u, row.roof_u, row.window_u) <= 0 or not 0 < row.shgc < 1:
            raise ConfigError(f"invalid envelope row for zone {r['zone']}")
        table[r["zone"]] = row
    return table


@dataclass(frozen=True)
class PrototypeGeometry:
    """DOE small-office footprint: 1.5:1 rectangle, 4.57 m perimeter zones."""

    length: float = 27.69  # m, east-west
    width: float = 18.46  # m, north-south
    height: float = 3.05  # m floor to ceiling
    perimeter_depth: float = 4.57
    window_to_wall: float = 0.212


@dataclass(frozen=True)
class NetworkSettings:
    """Construction knobs shared by every zone; overridable from scenario config."""

    air_capacitance_multiplier: float = 3.0  # furnishings lumped with air
    mass_capacitance_wh_m2k: float = 60.0  # per m2 floor
    mass_coupling_w_m2k: float = 22.75  # per m2 floor
    perimeter_infiltration_ach: float = 0.3
    core_infiltration_ach: float = 0.05
    ventilation_max_ach: float = 2.0
    outdoor_air_ach: float = 1.0
    solar_factor: float = 0.4
    wall_u: float | None = None
    roof_u: float | None = None
    window_u: float | None = None
    shgc: float | None = None


def build_network(climate_zone, envelope_table=None, geometry=None, settings=None) -> list[ZoneParams]:
    """Five ZoneParams (core + four perimeter zones) for one climate zone.

    Envelope UA is the U-value of each surface times its prototype area; the core
    zone only loses heat through the roof.
    """
    envelope_table = envelope_table if envelope_table is not None else load_envelope_table()
    geometry = geometry or PrototypeGeometry()
    settings = settings or NetworkSettings()
    try:
        env = envelope_table[climate_zone]
    except KeyError:
        raise ConfigError(f"climate zone {climate_zone!r} not in envelope table") from None
    wall_u = settings.wall_u if settings.wall_u is not None else env.wall_u
    roof_u = settings.roof_u if settings.roof_u is not None else env.roof_u
    window_u = settings.window_u if settings.window_u is not None else env.window_u
    shgc = settings.shgc if settings.shgc is not None else env.shgc

    g = geometry
    d = g.perimeter_depth
    core_l, core_w = g.length - 2 * d, g.width - 2 * d
    if core_l <= 0 or core_w <= 0:
        raise ConfigError("perimeter depth leaves no core zone")
    # (floor area, exterior facade length)
    layout = {
        "core": (core_l * core_w, 0.0),
        "south": ((g.length + core_l) / 2 * d, g.length),
        "east": ((g.width + core_w) / 2 * d, g.width),
        "north": ((g.length + core_l) / 2 * d, g.length),
        "west": ((g.width + core_w) / 2 * d, g.width),
    }
    zones = []
    for zone_id in ZONE_IDS:
        area, facade = layout[zone_id]
        wall = facade * g.height
        window = wall * g.window_to_wall
        ua = wall_u * (wall - window) + window_u * window + roof_u * area
        volume = area * g.height
        zones.append(
            ZoneParams(
                zone_id=zone_id,
                floor_area=area,
                volume=volume,
                air_capacitance=RHO_CP_AIR * volume * settings.air_capacitance_multiplier,
                mass_capacitance=settings.mass_capacitance_wh_m2k * 3600.0 * area,
                envelope_ua=ua,
                mass_coupling=settings.mass_coupling_w_m2k * area,
                infiltration_ach=settings.core_infiltration_ach if facade == 0 else settings.perimeter_infiltration_ach,
                window_solar_aperture=window * shgc,
                ventilation_max_ach=settings.ventilation_max_ach,
                solar_factor=settings.solar_factor,
                outdoor_air_ach=settings.outdoor_air_ach,
            )
        )
    return zones


def solar_gain(params: ZoneParams, ghi: float) -> float:
    """Transmitted solar (W) delivered to the zone's mass node."""
    return ghi * params.window_solar_aperture * params.solar_factor


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise NumericError(f"non-finite boundary value {v}")


def solve_step(ta0, tm0, c_air, c_mass, g_out, h_mass, t_out, q_air, q_mass, dt):
    """Backward-Euler update of one 2R2C zone; returns (air, mass) end temperatures.

    ``q_air`` is every heat input to the air node (internal gains + HVAC),
    ``q_mass`` the input to the mass node (solar).
    """
    a = c_air / dt
    b = c_mass / dt
    a11 = a + g_out + h_mass
    a22 = b + h_mass
    r1 = a * ta0 + g_out * t_out + q_air
    r2 = b * tm0 + q_mass
    det = a11 * a22 - h_mass * h_mass
    ta = (r1 * a22 + h_mass * r2) / det
    tm = (a11 * r2 + h_mass * r1) / det
    return ta, tm


def step(state: ZoneState, params: ZoneParams, boundary: Boundary, dt: float) -> ZoneState:
    """Advance one zone by ``dt`` seconds (0 < dt <= 900)."""
    if not 0 < dt <= MAX_DT:
        raise ConfigError(f"dt must be in (0, {MAX_DT:g}] s, got {dt}")
    _check_finite(
        boundary.outdoor, boundary.solar, boundary.internal_gains, boundary.hvac_sensible,
        boundary.ventilation_ach, state.air_temperature, state.mass_temperature,
    )
    ta, tm = solve_step(
        state.air_temperature,
        state.mass_temperature,
        params.air_capacitance,
        params.mass_capacitance,
        params.air_conductance(boundary.ventilation_ach),
        params.mass_coupling,
        boundary.outdoor,
        boundary.internal_gains + boundary.hvac_sensible,
        solar_gain(params, boundary.solar),
        dt,
    )
    return ZoneState(ta, tm)


def step_heat_flows(before: ZoneState, after: ZoneState, params: ZoneParams, boundary: Boundary) -> float:
    """Net heat into the zone (W) over a step, flows taken at end-of-step temperatures."""
    g = params.air_conductance(boundary.ventilation_ach)
    return (
        g * (boundary.outdoor - after.air_temperature)
        + boundary.internal_gains
        + boundary.hvac_sensible
        + solar_gain(params, boundary.solar)
    )


def steady_state(params: ZoneParams, boundary: Boundary) -> ZoneState:
    """Exact equilibrium of the 2x2 system under a constant boundary."""
    _check_finite(boundary.outdoor, boundary.solar, boundary.internal_gains, boundary.hvac_sensible)
    g = params.air_conductance(boundary.ventilation_ach)
    q_air = boundary.internal_gains + boundary.hvac_sensible
    q_mass = solar_gain(params, boundary.solar)
    if g <= 0:
        raise NumericError("singular steady state: no conductance to outdoors")
    ta = boundary.outdoor + (q_air + q_mass) / g
    if params.mass_coupling <= 0:
        if q_mass != 0:
            raise NumericError("singular steady state: solar into a decoupled mass node")
        return ZoneState(ta, ta)
    return ZoneState(ta, ta + q_mass / params.mass_coupling)


def with_overrides(params: ZoneParams, **changes) -> ZoneParams:
    return replace(params, **changes)
