"""Packaged single-zone AC with electric-resistance heating and an on/off thermostat."""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, NumericError
from .thermal import ZoneParams, solve_step, solar_gain

RATING_OAT = 35.0
DEFAULT_LATENT_FRACTION = {"A": 0.30, "B": 0.10, "C": 0.20}


class Mode(enum.Enum):
    OFF = "off"
    COOLING = "cooling"
    HEATING = "heating"
    PURGE_ALLOWED = "purge-allowed"


@dataclass(frozen=True)
class PszAcParams:
    rated_total_capacity: float  # W
    rated_cop: float = 3.0
    cop_oat_slope: float = 0.01  # fractional COP loss per K above 35 degC
    supply_fan_power: float = 1200.0  # W per m3/s
    rated_flow: float = 0.0  # m3/s; 0 means derive from capacity
    latent_fraction: float = 0.30
    heating_capacity: float = 0.0  # W electric resistance
    heating_efficiency: float = 1.0

    def __post_init__(self):
        if self.rated_total_capacity < 0:
            raise ConfigError("capacity must be >= 0")
        if not 1 < self.rated_cop <= 6:
            raise ConfigError("rated COP must be in (1, 6]")
        if not 0 <= self.latent_fraction <= 0.5:
            raise ConfigError("latent fraction must be in [0, 0.5]")
        if self.cop_oat_slope < 0 or self.supply_fan_power < 0 or self.rated_flow < 0:
            raise ConfigError("fan power, flow and COP slope must be >= 0")
        if self.heating_capacity < 0 or not 0 < self.heating_efficiency <= 1:
            raise ConfigError("heating capacity must be >= 0 and efficiency in (0, 1]")

    @property
    def available_sensible(self) -> float:
        return self.rated_total_capacity * (1.0 - self.latent_fraction)

    def cop(self, oat: float) -> float:
        return self.rated_cop * (1.0 - self.cop_oat_slope * max(0.0, oat - RATING_OAT))

    @property
    def fan_power(self) -> float:
        """Fan electric power (W) at rated flow."""
        return self.supply_fan_power * self.rated_flow


@dataclass(frozen=True)
class HvacStepResult:
    sensible_cooling_delivered: float = 0.0
    compressor_electric: float = 0.0
    fan_electric: float = 0.0
    heating_electric: float = 0.0
    runtime_fraction: float = 0.0
    heating_delivered: float = 0.0


@dataclass(frozen=True)
class SizingRules:
    sizing_factor: float = 1.15
    min_capacity: float = 1000.0
    heating_sizing_factor: float = 1.25
    flow_per_watt: float = 5.37e-5  # m3/s per W total capacity (~400 cfm/ton)
    design_days: int = 7


def thermostat_step(zone_air, cooling_setpoint, heating_setpoint, deadband, previous=Mode.OFF, occupied=True):
    """On/off thermostat with a deadband centred on each setpoint.

    Cooling engages above ``cooling_setpoint + deadband/2`` and stays engaged until
    the air falls below ``cooling_setpoint - deadband/2``; heating mirrors this.
    An idle thermostat in an unoccupied period reports ``PURGE_ALLOWED``.
    """
    if deadband <= 0:
        raise ConfigError("deadband must be > 0")
    if cooling_setpoint <= heating_setpoint:
        raise ConfigError(
            f"cooling setpoint {cooling_setpoint} must exceed heating setpoint {heating_setpoint}"
        )
    half = deadband / 2.0
    mode = previous
    if mode is Mode.COOLING and zone_air < cooling_setpoint - half:
        mode = Mode.OFF
    elif mode is Mode.HEATING and zone_air > heating_setpoint + half:
        mode = Mode.OFF
    if mode not in (Mode.COOLING, Mode.HEATING):
        if zone_air > cooling_setpoint + half:
            mode = Mode.COOLING
        elif zone_air < heating_setpoint - half:
            mode = Mode.HEATING
        else:
            mode = Mode.OFF if occupied else Mode.PURGE_ALLOWED
    return mode


def cooling_step(required_sensible: float, oat: float, params: PszAcParams) -> HvacStepResult:
    """Single-stage cycling unit meeting ``required_sensible`` W (clipped at capacity)."""
    if required_sensible < 0:
        raise ConfigError("required sensible load must be >= 0")
    available = params.available_sensible
    if required_sensible == 0 or available <= 0:
        return HvacStepResult()
    runtime = min(1.0, required_sensible / available)
    return HvacStepResult(
        sensible_cooling_delivered=runtime * available,
        compressor_electric=runtime * params.rated_total_capacity / params.cop(oat),
        fan_electric=runtime * params.fan_power,
        runtime_fraction=runtime,
    )


def heating_step(required_heat: float, params: PszAcParams) -> HvacStepResult:
    if required_heat < 0:
        raise ConfigError("required heat must be >= 0")
    if required_heat == 0 or params.heating_capacity <= 0:
        return HvacStepResult()
    runtime = min(1.0, required_heat / params.heating_capacity)
    delivered = runtime * params.heating_capacity
    return HvacStepResult(
        heating_electric=delivered / params.heating_efficiency,
        fan_electric=runtime * params.fan_power,
        runtime_fraction=runtime,
        heating_delivered=delivered,
    )


def _design_window(daily_values, days, pick):
    idx = int(pick(daily_values))
    first = max(0, idx - days + 1)
    return first, idx + 1


def ideal_loads(zone: ZoneParams, t_out, ghi, gains, cooling_sp, heating_sp, dt, t_init, ventilation_ach=None):
    """Ideal (unlimited) loads holding the air at its setpoints; returns (cool W, heat W) per step.

    ``ventilation_ach`` optionally gives outdoor-air changes per step on top of infiltration.
    """
    n = len(t_out)
    cool = np.zeros(n)
    heat = np.zeros(n)
    ta = tm = t_init
    a = zone.air_capacitance / dt
    b = zone.mass_capacitance / dt
    g0 = zone.air_conductance()
    h = zone.mass_coupling
    for k in range(n):
        g = g0 if ventilation_ach is None else zone.air_conductance(ventilation_ach[k])
        qs = solar_gain(zone, ghi[k])
        ta_f, tm_f = solve_step(ta, tm, zone.air_capacitance, zone.mass_capacitance, g, h, t_out[k], gains[k], qs, dt)
        for target, sign in ((cooling_sp[k], 1), (heating_sp[k], -1)):
            if sign * (ta_f - target) > 0:
                tm_t = (b * tm + h * target + qs) / (b + h)
                q = a * (target - ta) - g * (t_out[k] - target) - h * (tm_t - target) - gains[k]
                if sign > 0:
                    cool[k] = -q
                else:
                    heat[k] = q
                ta_f, tm_f = solve_step(
                    ta, tm, zone.air_capacitance, zone.mass_capacitance, g, h, t_out[k], gains[k] + q, qs, dt
                )
                break
        ta, tm = ta_f, tm_f
        if not (-40.0 <= ta <= 60.0):
            raise NumericError(f"design-day run diverged at step {k} (T_air={ta:.1f})")
    return cool, heat


def autosize(template: PszAcParams, network, t_out, ghi, gains, cooling_sp, heating_sp, daily_mean_oat, dt,
             rules: SizingRules = SizingRules(), occupied=None) -> list[PszAcParams]:
    """Per-zone equipment sized from baseline-setpoint design-period runs.

    Cooling: the 7 days ending on the warmest day by daily mean OAT, capacity
    ``sizing_factor`` x the peak hourly-mean ideal sensible load, grossed up for
    the latent share. Heating: same over the coldest week. Arrays are per step of
    length ``dt``; ``gains`` is (zones, steps); ``occupied`` (per step) switches
    on each zone's minimum outdoor air.
    """
    steps_per_day = int(round(86400 / dt))
    steps_per_hour = int(round(3600 / dt))
    daily_mean_oat = np.asarray(daily_mean_oat)
    sized = []
    for z, zone in enumerate(network):
        peaks = {}
        for kind, pick in (("cool", np.argmax), ("heat", np.argmin)):
            d0, d1 = _design_window(daily_mean_oat, rules.design_days, pick)
            sl = slice(d0 * steps_per_day, d1 * steps_per_day)
            t_init = float(np.mean(t_out[sl][:steps_per_day]))
            t_init = min(max(t_init, heating_sp[sl][0]), cooling_sp[sl][0])
            vent = None if occupied is None else np.where(occupied[sl], zone.outdoor_air_ach, 0.0)
            cool, heat = ideal_loads(
                zone, t_out[sl], ghi[sl], gains[z][sl], cooling_sp[sl], heating_sp[sl], dt, t_init, vent
            )
            load = cool if kind == "cool" else heat
            hourly = load.reshape(-1, steps_per_hour).mean(axis=1)
            peaks[kind] = float(hourly.max())
        total = rules.sizing_factor * peaks["cool"] / (1.0 - template.latent_fraction)
        capacity = max(rules.min_capacity, total)
        heating = max(rules.min_capacity, rules.heating_sizing_factor * peaks["heat"])
        flow = template.rated_flow or capacity * rules.flow_per_watt
        sized.append(replace(template, rated_total_capacity=capacity, heating_capacity=heating, rated_flow=flow))
    return sized
