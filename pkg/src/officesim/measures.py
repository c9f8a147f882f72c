"""The three control measures as transformers over baseline schedules and loads.

Composition order is fixed: adaptive setpoint, then occupancy-driven HVAC setback,
then smart plugs. Night purge is a runtime decision made inside the simulation
loop (see ``night_purge_decide``).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .comfort import SetpointSchedule, adaptive_setpoint, apply_adaptive, get_variant
from .errors import ConfigError, StructuralError
from .occupancy import OccupancyTrace, PlugProfile, plug_schedule, vacancy_minutes


@dataclass(frozen=True)
class OccupancyHvacParams:
    vacancy_timeout: float = 20.0  # minutes before the first setback step
    vacancy_offset: float = 2.8  # K added to the cooling setpoint
    deep_setback_after: float = 120.0  # minutes before the full setback

    def __post_init__(self):
        if self.vacancy_timeout <= 0 or self.deep_setback_after <= 0:
            raise ConfigError("vacancy timeouts must be > 0")
        if self.vacancy_offset < 0:
            raise ConfigError("vacancy_offset must be >= 0")


@dataclass(frozen=True)
class SmartPlugParams:
    vacancy_timeout: float = 20.0
    non_critical_share: float = 0.75

    def __post_init__(self):
        if self.vacancy_timeout <= 0:
            raise ConfigError("plug vacancy_timeout must be > 0")
        if not 0 <= self.non_critical_share <= 1:
            raise ConfigError("non_critical_share must be in [0, 1]")


@dataclass(frozen=True)
class PurgeParams:
    start_hour: int = 18
    end_hour: int = 8
    min_outdoor: float = 12.0
    min_delta: float = 2.0
    next_day_mean_limit: float | None = 25.0  # None disables the gate
    setpoint_margin: float = 1.0

    def __post_init__(self):
        if self.min_delta <= 0:
            raise ConfigError("purge min_delta must be > 0")
        if not (18 <= self.start_hour <= 23 or self.start_hour <= 9):
            raise ConfigError("purge window must lie within 18:00-09:00")
        if not (18 <= self.end_hour <= 23 or self.end_hour <= 9):
            raise ConfigError("purge window must lie within 18:00-09:00")
        if self.start_hour == self.end_hour:
            raise ConfigError("purge window is empty")
        if self.start_hour <= 9 and self.end_hour >= 18:
            raise ConfigError("purge window must not span the working day")

    def in_window(self, hour_of_day: float) -> bool:
        if self.start_hour > self.end_hour:
            return hour_of_day >= self.start_hour or hour_of_day < self.end_hour
        return self.start_hour <= hour_of_day < self.end_hour


@dataclass(frozen=True)
class MeasureSet:
    adaptive_setpoint: bool = False
    variant: str = "a55"
    occupancy_hvac: bool = False
    occupancy_hvac_params: OccupancyHvacParams = field(default_factory=OccupancyHvacParams)
    smart_plugs: bool = False
    smart_plug_params: SmartPlugParams = field(default_factory=SmartPlugParams)
    night_purge: bool = False
    purge_params: PurgeParams = field(default_factory=PurgeParams)

    def __post_init__(self):
        get_variant(self.variant)

    @property
    def empty(self) -> bool:
        return not (self.adaptive_setpoint or self.occupancy_hvac or self.smart_plugs or self.night_purge)

    def label(self) -> str:
        parts = []
        if self.adaptive_setpoint:
            parts.append(f"adaptive-{self.variant}")
        if self.occupancy_hvac:
            parts.append("occupancy-hvac")
        if self.smart_plugs:
            parts.append("smart-plugs")
        if self.night_purge:
            parts.append("purge")
        return "+".join(parts) or "baseline"


PRESETS = ("none", "adaptive", "occupancy", "purge", "all")


def preset(name: str, variant: str = "a55", base: MeasureSet | None = None) -> MeasureSet:
    """Named measure bundles used by the CLI; ``occupancy`` means HVAC + smart plugs."""
    base = base or MeasureSet()
    flags = {
        "none": (False, False, False),
        "adaptive": (True, False, False),
        "occupancy": (False, True, False),
        "purge": (False, False, True),
        "all": (True, True, True),
    }
    if name not in flags:
        raise ConfigError(f"unknown measure preset {name!r}; choose from {', '.join(PRESETS)}")
    adaptive, occupancy, purge = flags[name]
    return replace(base, adaptive_setpoint=adaptive, variant=variant, occupancy_hvac=occupancy,
                   smart_plugs=occupancy, night_purge=purge)


def occupancy_hvac_transform(
    schedule: SetpointSchedule, occupancy: np.ndarray, params: OccupancyHvacParams
) -> SetpointSchedule:
    """Follow measured occupancy of one zone instead of the programmed hours.

    Occupied slots get the occupied setpoints (even outside programmed hours).
    After ``vacancy_timeout`` minutes empty the cooling setpoint rises by
    ``vacancy_offset``; after ``deep_setback_after`` it goes to the full setback.
    Setpoints never drop below the programmed value of an empty slot, and the
    result depends only on ``occupied_cooling`` and the setback levels, so
    applying the transform twice changes nothing.
    """
    occ = np.asarray(occupancy, dtype=float)
    if occ.shape != (schedule.n_slots,):
        raise StructuralError(
            f"occupancy grid ({occ.size} slots) does not match schedule grid ({schedule.n_slots} slots)"
        )
    lv = schedule.levels
    present = occ > 0
    vacant_for = vacancy_minutes(occ)
    programmed = np.where(schedule.occupied, schedule.occupied_cooling, lv.cooling_setback)
    raised = np.minimum(np.maximum(schedule.occupied_cooling + params.vacancy_offset, programmed), lv.cooling_setback)
    cooling = np.where(vacant_for >= params.vacancy_timeout, raised, programmed)
    cooling = np.where(vacant_for >= params.deep_setback_after, lv.cooling_setback, cooling)
    cooling = np.where(present, schedule.occupied_cooling, cooling)
    programmed_heat = np.where(schedule.occupied, lv.heating_occupied, lv.heating_setback)
    heating = np.where(present, lv.heating_occupied, programmed_heat)
    heating = np.where(~present & (vacant_for >= params.deep_setback_after), lv.heating_setback, heating)
    return schedule.with_arrays(cooling=cooling, heating=heating)


@dataclass(frozen=True)
class PurgeDecision:
    active: bool
    ventilation_ach: float = 0.0
    fan_electric: float = 0.0


INACTIVE = PurgeDecision(False)


def night_purge_decide(
    zone_air: float,
    outdoor: float,
    tomorrow_mean_oat: float,
    next_setpoint: float,
    occupied: bool,
    params: PurgeParams,
    ventilation_max_ach: float,
    fan_power_per_ach: float,
) -> PurgeDecision:
    """Open the dampers and run the supply fan when the night air can usefully precool.

    All gates must pass: zone empty; outdoor air at least ``min_outdoor``; zone at
    least ``min_delta`` warmer than outdoors; zone still above the next occupied
    cooling setpoint minus ``setpoint_margin``; and (unless disabled) tomorrow's
    mean OAT at or below ``next_day_mean_limit``.
    """
    if occupied or ventilation_max_ach <= 0:
        return INACTIVE
    if outdoor < params.min_outdoor:
        return INACTIVE
    if zone_air - outdoor < params.min_delta:
        return INACTIVE
    if zone_air <= next_setpoint - params.setpoint_margin:
        return INACTIVE
    if params.next_day_mean_limit is not None and tomorrow_mean_oat > params.next_day_mean_limit:
        return INACTIVE
    return PurgeDecision(True, ventilation_max_ach, fan_power_per_ach * ventilation_max_ach)


@dataclass(frozen=True, eq=False)
class ScenarioInputs:
    """Everything the simulation loop needs besides physics parameters."""

    zone_ids: tuple[str, ...]
    baseline_schedule: SetpointSchedule
    schedules: tuple[SetpointSchedule, ...]  # one per zone
    trace: OccupancyTrace
    plug_density: np.ndarray  # (zones, slots) W/m2
    prevailing_mean: np.ndarray  # per-day prevailing mean OAT
    measures: MeasureSet
    purge: PurgeParams | None

    def __eq__(self, other):
        if not isinstance(other, ScenarioInputs):
            return NotImplemented
        return (
            self.zone_ids == other.zone_ids
            and self.baseline_schedule == other.baseline_schedule
            and self.schedules == other.schedules
            and self.trace == other.trace
            and np.array_equal(self.plug_density, other.plug_density)
            and self.measures == other.measures
            and self.purge == other.purge
        )


def baseline_inputs(
    schedule: SetpointSchedule,
    trace: OccupancyTrace,
    plug_base_density: float,
    prevailing_mean: np.ndarray,
    plug_profile: PlugProfile = PlugProfile(),
) -> ScenarioInputs:
    plug = plug_schedule(trace, plug_base_density, smart=False, profile=plug_profile)
    return ScenarioInputs(
        zone_ids=trace.zone_ids,
        baseline_schedule=schedule,
        schedules=tuple(schedule for _ in trace.zone_ids),
        trace=trace,
        plug_density=plug,
        prevailing_mean=np.asarray(prevailing_mean, dtype=float),
        measures=MeasureSet(),
        purge=None,
    )


def compose(
    measures: MeasureSet,
    inputs: ScenarioInputs,
    plug_base_density: float,
    plug_profile: PlugProfile = PlugProfile(),
) -> ScenarioInputs:
    """Apply ``measures`` on top of the baseline carried by ``inputs``.

    Every transform is recomputed from the baseline schedule and the occupancy
    trace, so composing the same measures onto an already-composed scenario gives
    the same scenario back.
    """
    schedule = inputs.baseline_schedule
    if measures.adaptive_setpoint:
        variant = get_variant(measures.variant)
        daily = np.array([adaptive_setpoint(variant, t) for t in inputs.prevailing_mean])
        schedule = apply_adaptive(schedule, daily)
    if measures.occupancy_hvac:
        schedules = tuple(
            occupancy_hvac_transform(schedule, inputs.trace.fractions[z], measures.occupancy_hvac_params)
            for z in range(len(inputs.zone_ids))
        )
    else:
        schedules = tuple(schedule for _ in inputs.zone_ids)
    sp = measures.smart_plug_params
    plug = plug_schedule(
        inputs.trace, plug_base_density, smart=measures.smart_plugs,
        vacancy_timeout=sp.vacancy_timeout, non_critical_share=sp.non_critical_share, profile=plug_profile,
    )
    return replace(
        inputs,
        schedules=schedules,
        plug_density=plug,
        measures=measures,
        purge=measures.purge_params if measures.night_purge else None,
    )
