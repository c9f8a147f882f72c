"""Adaptive-comfort cooling setpoints and annual thermostat schedules."""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, replace
from typing import TextIO

import numpy as np

from .errors import ConfigError, StructuralError
from .timeline import SLOT_SECONDS, SLOTS_PER_DAY, OfficeCalendar
from .weather import WeatherSeries, daily_stats, prevailing_mean_series

APPLICABLE_MIN = 10.0
APPLICABLE_MAX = 33.5
MIN_SETPOINT_GAP = 1.0


@dataclass(frozen=True)
class AdaptiveModelVariant:
    name: str
    intercept: float
    slope: float
    lower_clamp: float
    upper_clamp: float


ADAPTIVE_55 = AdaptiveModelVariant("Adaptive55Central", 17.8, 0.31, 20.9, 28.2)
ADAPTIVE_90 = AdaptiveModelVariant("Adaptive90Upper", 20.3, 0.31, 23.4, 30.6)
VARIANTS = {"a55": ADAPTIVE_55, "a90": ADAPTIVE_90}


def get_variant(key: str) -> AdaptiveModelVariant:
    try:
        return VARIANTS[key.lower()]
    except KeyError:
        raise ConfigError(f"unknown adaptive variant {key!r}; use a55 or a90") from None


def adaptive_setpoint(variant: AdaptiveModelVariant, t_pma: float) -> float:
    """Daily cooling setpoint from the prevailing mean outdoor temperature.

    Outside the 10.0-33.5 degC applicability window the variant's clamp bound is
    returned. At 10.0 degC both lines meet their lower bound, so the boundary
    itself also takes the bound (exact in floating point).
    """
    if t_pma <= APPLICABLE_MIN:
        return variant.lower_clamp
    if t_pma > APPLICABLE_MAX:
        return variant.upper_clamp
    return min(max(variant.slope * t_pma + variant.intercept, variant.lower_clamp), variant.upper_clamp)


@dataclass(frozen=True)
class SetpointLevels:
    cooling_occupied: float = 22.2
    cooling_setback: float = 29.0
    heating_occupied: float = 21.1
    heating_setback: float = 15.6

    def __post_init__(self):
        if self.cooling_occupied < self.heating_occupied + MIN_SETPOINT_GAP:
            raise ConfigError("occupied cooling setpoint must be >= heating setpoint + 1 K")
        if self.cooling_setback < self.heating_setback + MIN_SETPOINT_GAP:
            raise ConfigError("setback cooling setpoint must be >= heating setback + 1 K")


@dataclass(frozen=True, eq=False)
class SetpointSchedule:
    """Thermostat setpoints on the 10-minute grid for one simulation year.

    ``occupied`` is the schedule's assumed occupancy. ``occupied_cooling`` holds the
    cooling setpoint that applies whenever the zone counts as occupied (the daily
    adaptive value or the static one) at every slot, so occupancy-driven
    transforms can be recomputed from scratch.
    """

    start: dt.datetime
    cooling: np.ndarray
    heating: np.ndarray
    occupied: np.ndarray
    occupied_cooling: np.ndarray
    levels: SetpointLevels = SetpointLevels()

    def __post_init__(self):
        n = self.cooling.size
        for name in ("heating", "occupied", "occupied_cooling"):
            if getattr(self, name).size != n:
                raise StructuralError(f"schedule column {name} has the wrong length")
        for name in ("cooling", "heating", "occupied", "occupied_cooling"):
            getattr(self, name).setflags(write=False)

    @property
    def n_slots(self) -> int:
        return self.cooling.size

    def __eq__(self, other):
        if not isinstance(other, SetpointSchedule):
            return NotImplemented
        return (
            self.start == other.start
            and self.levels == other.levels
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("cooling", "heating", "occupied", "occupied_cooling")
            )
        )

    def with_arrays(self, **arrays) -> "SetpointSchedule":
        return replace(self, **arrays)


def _freeze(arr):
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def daily_adaptive_setpoints(variant: AdaptiveModelVariant, weather: WeatherSeries) -> np.ndarray:
    """One setpoint per day from the prevailing mean at that day's midnight."""
    pma = prevailing_mean_series(daily_stats(weather))
    return np.array([adaptive_setpoint(variant, t) for t in pma])


def assemble(
    calendar: OfficeCalendar,
    daily_cooling: np.ndarray,
    levels: SetpointLevels = SetpointLevels(),
) -> SetpointSchedule:
    occupied = calendar.occupied_slots()
    occ_cool = np.repeat(np.asarray(daily_cooling, dtype=float), SLOTS_PER_DAY)
    # a daily value below the occupied heating setpoint + 1 K would invert the deadband
    occ_cool = np.maximum(occ_cool, levels.heating_occupied + MIN_SETPOINT_GAP)
    cooling = np.where(occupied, occ_cool, levels.cooling_setback)
    heating = np.where(occupied, levels.heating_occupied, levels.heating_setback)
    return SetpointSchedule(
        start=dt.datetime(calendar.year, 1, 1),
        cooling=_freeze(cooling),
        heating=_freeze(heating),
        occupied=_freeze(occupied),
        occupied_cooling=_freeze(occ_cool),
        levels=levels,
    )


def build_schedule(
    variant: AdaptiveModelVariant | None,
    weather: WeatherSeries,
    calendar: OfficeCalendar,
    levels: SetpointLevels = SetpointLevels(),
) -> SetpointSchedule:
    """Annual setpoint schedule; ``variant=None`` gives the static baseline.

    Occupied slots get the static or daily adaptive cooling setpoint; everything
    else (nights, weekends, holidays) sits at the cooling/heating setbacks.
    """
    calendar.check_year(weather.year)
    if weather.n_days != calendar.n_days:
        raise StructuralError("weather and calendar cover different numbers of days")
    if variant is None:
        daily = np.full(calendar.n_days, levels.cooling_occupied)
    else:
        daily = daily_adaptive_setpoints(variant, weather)
    return assemble(calendar, daily, levels)


def apply_adaptive(schedule: SetpointSchedule, daily: np.ndarray) -> SetpointSchedule:
    """Replace the occupied cooling setpoint with per-day adaptive values."""
    occ_cool = np.repeat(np.asarray(daily, dtype=float), SLOTS_PER_DAY)
    if occ_cool.size != schedule.n_slots:
        raise StructuralError("adaptive daily setpoints do not cover the schedule")
    occ_cool = np.maximum(occ_cool, schedule.levels.heating_occupied + MIN_SETPOINT_GAP)
    cooling = np.where(schedule.occupied, occ_cool, schedule.levels.cooling_setback)
    return schedule.with_arrays(cooling=_freeze(cooling), occupied_cooling=_freeze(occ_cool))


def write_schedule_csv(schedule: SetpointSchedule, stream: TextIO) -> None:
    out = csv.writer(stream, lineterminator="\n")
    out.writerow(["timestamp", "cooling_setpoint_c", "heating_setpoint_c", "occupied_flag"])
    step = dt.timedelta(seconds=SLOT_SECONDS)
    for i in range(schedule.n_slots):
        out.writerow([
            (schedule.start + i * step).strftime("%Y-%m-%dT%H:%M"),
            repr(float(schedule.cooling[i])),
            repr(float(schedule.heating[i])),
            int(bool(schedule.occupied[i])),
        ])
