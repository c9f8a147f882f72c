"""Annual simulation loop, baseline/proposed pairing and multi-climate sweeps."""
from __future__ import annotations

import datetime as dt
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .climate import get_zone
from .comfort import build_schedule
from .config import ScenarioConfig
from .errors import ConfigError, DomainError, NumericError, StructuralError
from .hvac import DEFAULT_LATENT_FRACTION, PszAcParams, SizingRules, autosize
from .measures import ScenarioInputs, baseline_inputs, compose, night_purge_decide
from .occupancy import design_counts, static_trace, stochastic_trace
from .thermal import RHO_CP_AIR, ZoneParams, build_network, load_envelope_table
from .timeline import SLOT_SECONDS, SLOTS_PER_DAY, OfficeCalendar
from .weather import WeatherSeries, daily_stats, load_weather, prevailing_mean_series

log = logging.getLogger(__name__)

J_PER_KWH = 3.6e6
END_USES = ("cooling_compressor", "hvac_fan", "heating", "plug", "lighting")
UNMET_TOLERANCE = 1.0  # K above the active cooling setpoint
T_INIT = 21.0
T_MIN, T_MAX = -40.0, 60.0  # divergence guard on the air node


@dataclass(eq=False)
class EnergyAccount:
    """Annual electricity by end use (kWh) plus the hourly total-power series (kW)."""

    cooling_compressor: float
    hvac_fan: float
    heating: float
    plug: float
    lighting: float
    hourly_total_kw: np.ndarray
    floor_area: float

    def __post_init__(self):
        for name in END_USES:
            setattr(self, name, float(getattr(self, name)))
            if getattr(self, name) < 0:
                raise NumericError(f"negative {name} energy")
        self.hourly_total_kw = np.asarray(self.hourly_total_kw, dtype=float)
        self.floor_area = float(self.floor_area)

    @property
    def total(self) -> float:
        return self.cooling_compressor + self.hvac_fan + self.heating + self.plug + self.lighting

    @property
    def hvac(self) -> float:
        """Cooling-side HVAC electricity: compressor plus fan (heating excluded)."""
        return self.cooling_compressor + self.hvac_fan

    @property
    def total_ex_heating(self) -> float:
        return self.total - self.heating

    def end_uses(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in END_USES}

    def eui(self, end_use: str | None = None) -> float:
        value = self.total_ex_heating if end_use is None else getattr(self, end_use)
        return value / self.floor_area

    def to_dict(self, hourly: bool = True) -> dict:
        d = {**self.end_uses(), "total": self.total, "floor_area": self.floor_area}
        if hourly:
            d["hourly_total_kw"] = [float(x) for x in self.hourly_total_kw]
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "EnergyAccount":
        return cls(
            **{name: float(data[name]) for name in END_USES},
            hourly_total_kw=np.asarray(data.get("hourly_total_kw", ()), dtype=float),
            floor_area=float(data["floor_area"]),
        )

    def __eq__(self, other):
        if not isinstance(other, EnergyAccount):
            return NotImplemented
        return self.end_uses() == other.end_uses() and self.floor_area == other.floor_area and np.array_equal(
            self.hourly_total_kw, other.hourly_total_kw
        )


@dataclass(eq=False)
class DailySeries:
    """Per-day HVAC breakdown used for OAT-binned and cooling-season reporting."""

    dates: list[dt.date]
    mean_oat: np.ndarray
    compressor_kwh: np.ndarray
    fan_kwh: np.ndarray
    purge_fan_kwh: np.ndarray

    @property
    def hvac_kwh(self) -> np.ndarray:
        return self.compressor_kwh + self.fan_kwh

    def to_dict(self):
        return {
            "dates": [d.isoformat() for d in self.dates],
            "mean_oat": self.mean_oat.tolist(),
            "compressor_kwh": self.compressor_kwh.tolist(),
            "fan_kwh": self.fan_kwh.tolist(),
            "purge_fan_kwh": self.purge_fan_kwh.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            [dt.date.fromisoformat(d) for d in data["dates"]],
            np.asarray(data["mean_oat"]),
            np.asarray(data["compressor_kwh"]),
            np.asarray(data["fan_kwh"]),
            np.asarray(data["purge_fan_kwh"]),
        )


@dataclass(eq=False)
class ScenarioResult:
    label: str
    climate_zone: str
    measures: str
    account: EnergyAccount
    daily: DailySeries
    capacities_w: list[float]
    unmet_hours: dict[str, float]
    peak_air_temperature: dict[str, float]
    purge_hours: float
    cooling_season: tuple[int, int] = (5, 9)
    diagnostics: dict = field(default_factory=dict)

    @property
    def total_unmet_hours(self) -> float:
        return sum(self.unmet_hours.values())

    def cooling_season_hvac_kwh(self) -> float:
        lo, hi = self.cooling_season
        mask = np.array([lo <= d.month <= hi for d in self.daily.dates])
        return float(self.daily.hvac_kwh[mask].sum())

    def to_dict(self, hourly: bool = True) -> dict:
        return {
            "label": self.label,
            "climate_zone": self.climate_zone,
            "measures": self.measures,
            "account": self.account.to_dict(hourly),
            "daily": self.daily.to_dict(),
            "capacities_w": list(self.capacities_w),
            "unmet_hours": dict(self.unmet_hours),
            "peak_air_temperature": dict(self.peak_air_temperature),
            "purge_hours": self.purge_hours,
            "cooling_season": list(self.cooling_season),
            "diagnostics": dict(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, data) -> "ScenarioResult":
        return cls(
            label=data["label"],
            climate_zone=data["climate_zone"],
            measures=data["measures"],
            account=EnergyAccount.from_dict(data["account"]),
            daily=DailySeries.from_dict(data["daily"]),
            capacities_w=[float(c) for c in data["capacities_w"]],
            unmet_hours={k: float(v) for k, v in data["unmet_hours"].items()},
            peak_air_temperature={k: float(v) for k, v in data["peak_air_temperature"].items()},
            purge_hours=float(data["purge_hours"]),
            cooling_season=tuple(data["cooling_season"]),
            diagnostics=dict(data.get("diagnostics", {})),
        )


@lru_cache(maxsize=32)
def _cached_weather(path: str) -> WeatherSeries:
    return load_weather(path)


def _weather_for(config: ScenarioConfig) -> WeatherSeries:
    return _cached_weather(str(config.weather_path.resolve()))


def _hourly_to_steps(hourly: np.ndarray, dt_s: int) -> np.ndarray:
    """Linear interpolation of hourly values onto step starts; wraps at year end."""
    n = hourly.size
    t = np.arange(n * 3600 // dt_s) * (dt_s / 3600.0)
    ext = np.append(hourly, hourly[0])
    return np.interp(t, np.arange(n + 1), ext)


@dataclass(eq=False)
class _Prepared:
    config: ScenarioConfig
    weather: WeatherSeries
    calendar: OfficeCalendar
    network: list[ZoneParams]
    inputs: ScenarioInputs
    base_inputs: ScenarioInputs
    lighting_w_per_m2: np.ndarray  # per slot
    exterior_lighting_w: np.ndarray  # per slot
    latent_fraction: float


def prepare(config: ScenarioConfig, weather: WeatherSeries | None = None) -> _Prepared:
    weather = weather or _weather_for(config)
    zone = get_zone(config.climate_zone)
    calendar = OfficeCalendar(weather.year, config.schedule.occupied_start, config.schedule.occupied_end)
    network = build_network(config.climate_zone, load_envelope_table(), settings=config.thermal)
    counts = design_counts([z.floor_area for z in network], config.loads.people_per_1000ft2)
    zone_ids = tuple(z.zone_id for z in network)
    levels = config.schedule.levels()
    schedule = build_schedule(None, weather, calendar, levels)
    static = static_trace(calendar, zone_ids, counts)
    if config.occupancy == "stochastic":
        trace = stochastic_trace(replace(config.occupancy_model, random_seed=config.seed), calendar, zone_ids, counts)
    else:
        trace = static
    pma = prevailing_mean_series(daily_stats(weather))
    plug_profile = config.loads.plug_profile()
    base = baseline_inputs(schedule, static, config.loads.plug_density, pma, plug_profile)
    actual = replace(base, trace=trace) if trace is not static else base
    inputs = compose(config.measures, actual, config.loads.plug_density, plug_profile)

    occupied = calendar.occupied_slots()
    lights = config.loads.lighting_density * np.where(
        occupied, config.loads.lighting_occupied_fraction, config.loads.lighting_unoccupied_fraction
    )
    # exterior lights burn whenever there is no daylight
    ghi_slots = np.repeat(weather.ghi, 3600 // SLOT_SECONDS)
    exterior = np.where(ghi_slots <= 0, config.loads.exterior_lighting_w, 0.0)
    latent = config.hvac.latent_fraction
    if latent is None:
        latent = DEFAULT_LATENT_FRACTION[zone.moisture]
    return _Prepared(config, weather, calendar, network, inputs, base, lights, exterior, latent)


def _template(config: ScenarioConfig, latent: float) -> PszAcParams:
    h = config.hvac
    return PszAcParams(
        rated_total_capacity=0.0,
        rated_cop=h.rated_cop,
        cop_oat_slope=h.cop_oat_slope,
        supply_fan_power=h.supply_fan_power,
        latent_fraction=latent,
    )


def _zone_gains(prep: _Prepared, inputs: ScenarioInputs, z: int) -> np.ndarray:
    """Internal gains (W) per slot for zone ``z``: people + plugs + interior lights."""
    zone = prep.network[z]
    loads = prep.config.loads
    people = inputs.trace.fractions[z] * inputs.trace.design_counts[z] * loads.people_gain_w
    return people + (inputs.plug_density[z] + prep.lighting_w_per_m2) * zone.floor_area


def size_equipment(prep: _Prepared) -> list[PszAcParams]:
    """Autosize from the baseline schedule and static occupancy, whatever the measures."""
    config = prep.config
    template = _template(config, prep.latent_fraction)
    rules = SizingRules(
        sizing_factor=config.hvac.sizing_factor,
        min_capacity=config.hvac.min_capacity,
        heating_sizing_factor=config.hvac.heating_sizing_factor,
        flow_per_watt=config.hvac.flow_per_watt,
    )
    dt_s = config.dt
    per_slot = SLOT_SECONDS // dt_s
    t_out = _hourly_to_steps(prep.weather.dry_bulb, dt_s)
    ghi = _hourly_to_steps(prep.weather.ghi, dt_s)
    base = prep.base_inputs
    gains = np.vstack([np.repeat(_zone_gains(prep, base, z), per_slot) for z in range(len(prep.network))])
    sched = base.baseline_schedule
    means = np.array([s.mean_oat for s in daily_stats(prep.weather)])
    sized = autosize(
        template, prep.network, t_out, ghi, gains,
        np.repeat(sched.cooling, per_slot), np.repeat(sched.heating, per_slot), means, dt_s, rules,
        occupied=np.repeat(sched.occupied, per_slot),
    )
    fixed = config.hvac.cooling_capacity_w
    if fixed is not None:
        sized = [replace(p, rated_total_capacity=fixed, rated_flow=fixed * rules.flow_per_watt or p.rated_flow)
                 for p in sized]
    return sized


def _simulate_zone(
    zone: ZoneParams, hvac: PszAcParams, t_out, ghi, gains, csp, hsp, occupied_sched, present,
    purge_window, tomorrow_mean, next_sp, purge_params, deadband, dt_s, continuous_fan, out,
):
    """Sequential loop for one zone; writes per-step electric energy (J) into ``out``."""
    n = len(t_out)
    a = zone.air_capacitance / dt_s
    b = zone.mass_capacitance / dt_s
    h = zone.mass_coupling
    g0 = zone.air_conductance()
    g_occ = zone.air_conductance(zone.outdoor_air_ach)
    g_per_ach = RHO_CP_AIR * zone.volume / 3600.0
    sol_k = zone.window_solar_aperture * zone.solar_factor
    half = deadband / 2.0
    cap = hvac.rated_total_capacity
    avail = hvac.available_sensible
    fan_w = hvac.fan_power
    heat_cap = hvac.heating_capacity
    heat_eff = hvac.heating_efficiency
    rated_cop = hvac.rated_cop
    slope = hvac.cop_oat_slope
    vent_max = zone.ventilation_max_ach
    purge_fan_per_ach = hvac.supply_fan_power * zone.volume / 3600.0
    comp, fan, heat, pfan = out["compressor"], out["fan"], out["heating"], out["purge_fan"]

    # a zone with no cooling is a stable linear system that may legitimately
    # free-float hot; only the lower bound (and NaN) flags divergence there
    t_hi = T_MAX if avail > 0 else math.inf
    ta = tm = T_INIT
    mode = 0  # 0 off, 1 cooling, -1 heating
    unmet_steps = 0
    purge_steps = 0
    peak = -math.inf
    for k in range(n):
        to = t_out[k]
        c_sp = csp[k]
        h_sp = hsp[k]
        if mode == 1 and ta < c_sp - half:
            mode = 0
        elif mode == -1 and ta > h_sp + half:
            mode = 0
        if mode == 0:
            if ta > c_sp + half:
                mode = 1
            elif ta < h_sp - half:
                mode = -1

        g = g_occ if occupied_sched[k] else g0
        q_fan = 0.0
        if mode == 0 and purge_params is not None and purge_window[k]:
            decision = night_purge_decide(
                ta, to, tomorrow_mean[k], next_sp[k], present[k], purge_params, vent_max, purge_fan_per_ach
            )
            if decision.active:
                g = g0 + g_per_ach * decision.ventilation_ach
                pfan[k] += decision.fan_electric * dt_s
                # rated cooling capacity is net of fan heat; purge air is not
                q_fan = decision.fan_electric
                purge_steps += 1

        qi = gains[k] + q_fan
        qs = ghi[k] * sol_k
        q_hvac = 0.0
        if mode == 1:
            tm_t = (b * tm + h * c_sp + qs) / (b + h)
            required = -(a * (c_sp - ta) - g * (to - c_sp) - h * (tm_t - c_sp) - qi)
            if required > 0 and avail > 0:
                runtime = required / avail
                if runtime > 1.0:
                    runtime = 1.0
                q_hvac = -runtime * avail
                cop = rated_cop * (1.0 - slope * (to - 35.0)) if to > 35.0 else rated_cop
                comp[k] += runtime * cap / cop * dt_s
                fan[k] += runtime * fan_w * dt_s
            elif continuous_fan and occupied_sched[k]:
                fan[k] += fan_w * dt_s
        elif mode == -1:
            tm_t = (b * tm + h * h_sp + qs) / (b + h)
            required = a * (h_sp - ta) - g * (to - h_sp) - h * (tm_t - h_sp) - qi
            if required > 0 and heat_cap > 0:
                runtime = required / heat_cap
                if runtime > 1.0:
                    runtime = 1.0
                q_hvac = runtime * heat_cap
                heat[k] += (q_hvac / heat_eff + runtime * fan_w) * dt_s
        elif continuous_fan and occupied_sched[k]:
            fan[k] += fan_w * dt_s

        a11 = a + g + h
        a22 = b + h
        r1 = a * ta + g * to + qi + q_hvac
        r2 = b * tm + qs
        det = a11 * a22 - h * h
        ta, tm = (r1 * a22 + h * r2) / det, (a11 * r2 + h * r1) / det
        if not T_MIN <= ta <= t_hi:
            raise NumericError(f"zone {zone.zone_id} diverged at timestep {k} (T_air={ta:.2f} C)")
        if ta > peak:
            peak = ta
        if present[k] and ta > c_sp + UNMET_TOLERANCE:
            unmet_steps += 1
    return unmet_steps * dt_s / 3600.0, purge_steps * dt_s / 3600.0, peak


def simulate(prep: _Prepared, capacities: Sequence[PszAcParams]) -> ScenarioResult:
    config = prep.config
    dt_s = config.dt
    per_slot = SLOT_SECONDS // dt_s
    n_steps = prep.calendar.n_slots * per_slot
    steps_per_day = SLOTS_PER_DAY * per_slot
    t_out = _hourly_to_steps(prep.weather.dry_bulb, dt_s)
    ghi = _hourly_to_steps(prep.weather.ghi, dt_s)
    t_out_l, ghi_l = t_out.tolist(), ghi.tolist()
    stats = daily_stats(prep.weather)
    day_means = np.array([s.mean_oat for s in stats])
    inputs = prep.inputs

    purge = inputs.purge
    hours = (np.arange(n_steps) % steps_per_day) * (dt_s / 3600.0)
    day_index = np.arange(n_steps) // steps_per_day
    if purge is not None:
        window = np.array([purge.in_window(hr) for hr in hours[:steps_per_day]])
        window = np.tile(window, prep.calendar.n_days)
        # the night belongs to the coming working day
        target_day = np.where(hours >= 12, day_index + 1, day_index) % prep.calendar.n_days
        tomorrow_mean = day_means[target_day]
        workdays = prep.calendar.workdays()
    else:
        window = np.zeros(n_steps, dtype=bool)
        tomorrow_mean = np.zeros(n_steps)

    energy = {key: np.zeros(n_steps) for key in ("compressor", "fan", "heating", "purge_fan")}
    unmet, peaks = {}, {}
    purge_hours = 0.0
    for z, zone in enumerate(prep.network):
        sched = inputs.schedules[z]
        gains = np.repeat(_zone_gains(prep, inputs, z), per_slot)
        csp = np.repeat(sched.cooling, per_slot)
        hsp = np.repeat(sched.heating, per_slot)
        occ_sched = np.repeat(sched.occupied, per_slot)
        present = np.repeat(inputs.trace.fractions[z] > 0, per_slot)
        if purge is not None:
            occ_cool_daily = sched.occupied_cooling[::SLOTS_PER_DAY]
            next_sp = np.where(workdays[target_day], occ_cool_daily[target_day], sched.levels.cooling_setback)
        else:
            next_sp = np.zeros(n_steps)
        out = {key: [0.0] * n_steps for key in energy}
        z_unmet, z_purge, z_peak = _simulate_zone(
            zone, capacities[z], t_out_l, ghi_l, gains.tolist(), csp.tolist(), hsp.tolist(), occ_sched.tolist(),
            present.tolist(), window.tolist(), tomorrow_mean.tolist(), next_sp.tolist(), purge,
            config.schedule.deadband, dt_s, config.hvac.continuous_fan, out,
        )
        for key in energy:
            energy[key] += np.asarray(out[key])
        unmet[zone.zone_id] = z_unmet
        peaks[zone.zone_id] = z_peak
        purge_hours += z_purge

    floor_area = sum(z.floor_area for z in prep.network)
    plug_w = (inputs.plug_density * np.array([z.floor_area for z in prep.network])[:, None]).sum(axis=0)
    lights_w = prep.lighting_w_per_m2 * floor_area + prep.exterior_lighting_w
    plug_j = np.repeat(plug_w, per_slot) * dt_s
    lights_j = np.repeat(lights_w, per_slot) * dt_s

    fan_j = energy["fan"] + energy["purge_fan"]
    total_j = energy["compressor"] + fan_j + energy["heating"] + plug_j + lights_j
    steps_per_hour = 3600 // dt_s
    hourly_kw = total_j.reshape(-1, steps_per_hour).sum(axis=1) / J_PER_KWH

    account = EnergyAccount(
        cooling_compressor=energy["compressor"].sum() / J_PER_KWH,
        hvac_fan=fan_j.sum() / J_PER_KWH,
        heating=energy["heating"].sum() / J_PER_KWH,
        plug=plug_j.sum() / J_PER_KWH,
        lighting=lights_j.sum() / J_PER_KWH,
        hourly_total_kw=hourly_kw,
        floor_area=floor_area,
    )
    per_day = lambda arr: arr.reshape(-1, steps_per_day).sum(axis=1) / J_PER_KWH  # noqa: E731
    daily = DailySeries(
        dates=[s.date for s in stats],
        mean_oat=day_means,
        compressor_kwh=per_day(energy["compressor"]),
        fan_kwh=per_day(fan_j),
        purge_fan_kwh=per_day(energy["purge_fan"]),
    )
    return ScenarioResult(
        label=config.label,
        climate_zone=config.climate_zone,
        measures=config.measures.label(),
        account=account,
        daily=daily,
        capacities_w=[p.rated_total_capacity for p in capacities],
        unmet_hours=unmet,
        peak_air_temperature=peaks,
        purge_hours=purge_hours,
        cooling_season=(config.report.cooling_season_start_month, config.report.cooling_season_end_month),
        diagnostics={"latent_fraction": prep.latent_fraction, "occupancy": config.occupancy, "dt": dt_s},
    )


def run_scenario(config: ScenarioConfig, capacities: Sequence[PszAcParams] | None = None) -> ScenarioResult:
    """Simulate one configuration for a full year."""
    prep = prepare(config)
    if capacities is None:
        capacities = size_equipment(prep)
    elif len(capacities) != len(prep.network):
        raise ConfigError("one set of HVAC parameters per zone is required")
    return simulate(prep, capacities)


def _check_pair(baseline: ScenarioConfig, proposed: ScenarioConfig):
    if baseline.climate_zone != proposed.climate_zone:
        raise ConfigError(
            f"climate mismatch: baseline is {baseline.climate_zone}, proposed is {proposed.climate_zone}"
        )
    if baseline.weather_path.resolve() != proposed.weather_path.resolve():
        raise ConfigError("baseline and proposed use different weather files")
    if baseline.dt != proposed.dt:
        raise ConfigError("baseline and proposed use different timesteps")
    a, b = baseline.hvac.cooling_capacity_w, proposed.hvac.cooling_capacity_w
    if a != b:
        raise ConfigError(f"capacity mismatch: baseline {a} W vs proposed {b} W; equipment must be identical")


def run_pair(baseline: ScenarioConfig, proposed: ScenarioConfig) -> tuple[ScenarioResult, ScenarioResult]:
    """Simulate a baseline and a proposed case with identical (baseline-autosized) equipment."""
    _check_pair(baseline, proposed)
    base_prep = prepare(baseline)
    capacities = size_equipment(base_prep)
    base_result = simulate(base_prep, capacities)
    prop_result = simulate(prepare(proposed), capacities)
    return base_result, prop_result


@dataclass(eq=False)
class ClimateRun:
    climate_zone: str
    baseline: ScenarioResult | None = None
    proposed: dict[str, ScenarioResult] = field(default_factory=dict)
    error: str | None = None

    def to_dict(self, hourly: bool = False):
        return {
            "climate_zone": self.climate_zone,
            "baseline": self.baseline.to_dict(hourly) if self.baseline else None,
            "proposed": {k: v.to_dict(hourly) for k, v in self.proposed.items()},
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            climate_zone=data["climate_zone"],
            baseline=ScenarioResult.from_dict(data["baseline"]) if data.get("baseline") else None,
            proposed={k: ScenarioResult.from_dict(v) for k, v in data.get("proposed", {}).items()},
            error=data.get("error"),
        )


@dataclass(frozen=True)
class SweepTask:
    key: str
    baseline: ScenarioConfig
    proposed: tuple[tuple[str, ScenarioConfig], ...]


def run_task(task: SweepTask) -> ClimateRun:
    """One climate: baseline plus every proposed case on shared equipment; errors are captured."""
    run = ClimateRun(task.baseline.climate_zone)
    try:
        for _, cfg in task.proposed:
            _check_pair(task.baseline, cfg)
        base_prep = prepare(task.baseline)
        capacities = size_equipment(base_prep)
        run.baseline = simulate(base_prep, capacities)
        for label, cfg in task.proposed:
            run.proposed[label] = simulate(prepare(cfg), capacities)
    except (DomainError, NumericError, OSError) as exc:
        log.warning("scenario %s failed: %s", task.key, exc)
        run.error = f"{type(exc).__name__}: {exc}"
        run.baseline = None
        run.proposed = {}
    return run


def run_sweep(tasks: Sequence[SweepTask], jobs: int = 1) -> dict[str, ClimateRun]:
    """Run every task; results are keyed by task key and independent of ``jobs``."""
    if not tasks:
        raise StructuralError("sweep needs at least one configuration")
    keys = [t.key for t in tasks]
    if len(set(keys)) != len(keys):
        raise StructuralError("duplicate sweep keys")
    if jobs <= 1:
        results = [run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_task, tasks))
    return {t.key: r for t, r in zip(tasks, results)}
