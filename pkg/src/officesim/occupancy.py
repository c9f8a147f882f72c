"""Static and stochastic office occupancy at 10-minute resolution, and plug-load schedules.

The stochastic generator is a per-occupant event model in the spirit of the
LBNL occupancy simulator: each workday an occupant arrives, may leave for lunch,
takes Poisson-distributed short absences and departs; weekends and holidays see
occasional short visits. A zone's fraction is present occupants / design count.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import ConfigError, StructuralError
from .timeline import SLOT_SECONDS, SLOTS_PER_DAY, OfficeCalendar

M2_PER_FT2 = 0.09290304
SLOT_MINUTES = SLOT_SECONDS // 60
# slot midpoints, minutes after midnight
_SLOT_MID = (np.arange(SLOTS_PER_DAY) + 0.5) * SLOT_MINUTES


@dataclass(frozen=True, eq=False)
class OccupancyTrace:
    zone_ids: tuple[str, ...]
    fractions: np.ndarray  # (n_zones, n_slots), each in [0, 1]
    design_counts: tuple[int, ...]
    start: dt.datetime

    def __post_init__(self):
        frac = np.array(self.fractions, dtype=float)
        if frac.ndim != 2 or frac.shape[0] != len(self.zone_ids) or len(self.design_counts) != len(self.zone_ids):
            raise StructuralError("occupancy trace shape does not match its zones")
        if frac.shape[1] not in (365 * SLOTS_PER_DAY, 366 * SLOTS_PER_DAY):
            raise StructuralError(f"occupancy trace must cover a full year, got {frac.shape[1]} slots")
        if np.any(frac < 0) or np.any(frac > 1) or not np.all(np.isfinite(frac)):
            raise StructuralError("occupancy fractions must lie in [0, 1]")
        frac.setflags(write=False)
        object.__setattr__(self, "fractions", frac)

    @property
    def n_slots(self) -> int:
        return self.fractions.shape[1]

    def zone(self, zone_id: str) -> np.ndarray:
        return self.fractions[self.zone_ids.index(zone_id)]

    def __eq__(self, other):
        if not isinstance(other, OccupancyTrace):
            return NotImplemented
        return (
            self.zone_ids == other.zone_ids
            and self.design_counts == other.design_counts
            and self.start == other.start
            and np.array_equal(self.fractions, other.fractions)
        )


@dataclass(frozen=True)
class OccupancyParams:
    """Generator knobs. Times are minutes after midnight, durations minutes."""

    arrival_mean: float = 490.0  # 08:10
    arrival_sd: float = 40.0
    departure_mean: float = 1050.0  # 17:30
    departure_sd: float = 50.0
    truncation_sd: float = 2.5
    lunch_probability: float = 0.6
    lunch_start_mean: float = 720.0
    lunch_start_sd: float = 30.0
    lunch_min: float = 30.0
    lunch_max: float = 60.0
    absence_rate: float = 0.3  # events per present hour
    absence_min: float = 10.0
    absence_max: float = 30.0
    weekend_probability: float = 0.05
    weekend_arrival_mean: float = 600.0
    weekend_stay_mean: float = 180.0
    random_seed: int = 0

    def __post_init__(self):
        for name in ("lunch_probability", "weekend_probability"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be in [0, 1]")
        for name in ("arrival_sd", "departure_sd", "lunch_start_sd", "absence_rate", "truncation_sd"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not 0 < self.lunch_min <= self.lunch_max:
            raise ConfigError("lunch durations must satisfy 0 < min <= max")
        if not 0 < self.absence_min <= self.absence_max:
            raise ConfigError("absence durations must satisfy 0 < min <= max")
        if self.weekend_stay_mean <= 0:
            raise ConfigError("weekend_stay_mean must be > 0")


def design_counts(floor_areas: Sequence[float], persons_per_1000ft2: float = 5.0) -> tuple[int, ...]:
    """Occupants per zone from floor area, at least one per zone."""
    return tuple(max(1, int(round(a / M2_PER_FT2 / 1000.0 * persons_per_1000ft2))) for a in floor_areas)


def static_trace(calendar: OfficeCalendar, zone_ids: Sequence[str], counts: Sequence[int]) -> OccupancyTrace:
    """Fully occupied during scheduled hours on workdays, empty otherwise."""
    occ = calendar.occupied_slots().astype(float)
    return OccupancyTrace(
        tuple(zone_ids), np.tile(occ, (len(zone_ids), 1)), tuple(counts), dt.datetime(calendar.year, 1, 1)
    )


def _truncnorm(rng, mean, sd, k, size):
    if sd == 0:
        return np.full(size, float(mean))
    draws = rng.normal(mean, sd, size)
    bad = np.abs(draws - mean) > k * sd
    while bad.any():
        draws[bad] = rng.normal(mean, sd, bad.sum())
        bad = np.abs(draws - mean) > k * sd
    return draws


def _workday_presence(rng, params: OccupancyParams, n: int) -> np.ndarray:
    """(n, SLOTS_PER_DAY) presence matrix for one workday."""
    arrive = _truncnorm(rng, params.arrival_mean, params.arrival_sd, params.truncation_sd, n)
    depart = _truncnorm(rng, params.departure_mean, params.departure_sd, params.truncation_sd, n)
    depart = np.maximum(depart, arrive + 60.0)
    present = (_SLOT_MID[None, :] >= arrive[:, None]) & (_SLOT_MID[None, :] < depart[:, None])

    takes_lunch = rng.random(n) < params.lunch_probability
    lunch_start = _truncnorm(rng, params.lunch_start_mean, params.lunch_start_sd, params.truncation_sd, n)
    lunch_len = rng.uniform(params.lunch_min, params.lunch_max, n)
    away = (_SLOT_MID[None, :] >= lunch_start[:, None]) & (_SLOT_MID[None, :] < (lunch_start + lunch_len)[:, None])
    present &= ~(away & takes_lunch[:, None])

    hours = np.maximum(depart - arrive, 0.0) / 60.0
    n_abs = rng.poisson(params.absence_rate * hours)
    for i in np.flatnonzero(n_abs):
        starts = rng.uniform(arrive[i], depart[i], n_abs[i])
        lengths = rng.uniform(params.absence_min, params.absence_max, n_abs[i])
        for s, length in zip(starts, lengths):
            present[i] &= ~((_SLOT_MID >= s) & (_SLOT_MID < s + length))
    return present


def _offday_presence(rng, params: OccupancyParams, n: int) -> np.ndarray:
    visits = rng.random(n) < params.weekend_probability
    present = np.zeros((n, SLOTS_PER_DAY), dtype=bool)
    for i in np.flatnonzero(visits):
        arrive = rng.normal(params.weekend_arrival_mean, 60.0)
        stay = rng.exponential(params.weekend_stay_mean)
        present[i] = (_SLOT_MID >= arrive) & (_SLOT_MID < arrive + stay)
    return present


def _zone_fractions(seed_seq, params, calendar, count) -> np.ndarray:
    rng = np.random.default_rng(seed_seq)
    days = []
    for date in calendar.dates():
        if calendar.is_workday(date):
            present = _workday_presence(rng, params, count)
        else:
            present = _offday_presence(rng, params, count)
        days.append(present.sum(axis=0) / count)
    return np.concatenate(days)


def stochastic_trace(
    params: OccupancyParams, calendar: OfficeCalendar, zone_ids: Sequence[str], counts: Sequence[int]
) -> OccupancyTrace:
    """Seed-deterministic event-model trace; each zone draws from its own child seed."""
    children = np.random.SeedSequence(params.random_seed).spawn(len(zone_ids))
    rows = [_zone_fractions(children[i], params, calendar, counts[i]) for i in range(len(zone_ids))]
    return OccupancyTrace(tuple(zone_ids), np.vstack(rows), tuple(counts), dt.datetime(calendar.year, 1, 1))


def vacancy_minutes(fractions: np.ndarray) -> np.ndarray:
    """Minutes a zone has already been empty at the start of each slot (0 when occupied).

    A slot that begins a vacancy reports 0; the next one 10, and so on. Works on
    1-D or (zones, slots) arrays.
    """
    frac = np.atleast_2d(fractions)
    out = np.zeros(frac.shape)
    for z in range(frac.shape[0]):
        run = 0
        row = frac[z]
        dest = out[z]
        for i in range(row.size):
            if row[i] > 0:
                run = 0
            else:
                dest[i] = run * SLOT_MINUTES
                run += 1
    return out if np.ndim(fractions) == 2 else out[0]


@dataclass(frozen=True)
class PlugProfile:
    occupied_fraction: float = 0.9
    standby_fraction: float = 0.3

    def __post_init__(self):
        if not 0 <= self.standby_fraction <= self.occupied_fraction <= 1:
            raise ConfigError("plug fractions must satisfy 0 <= standby <= occupied <= 1")


def plug_schedule(
    trace: OccupancyTrace,
    base_density: float,
    smart: bool,
    vacancy_timeout: float = 20.0,
    non_critical_share: float = 0.75,
    profile: PlugProfile = PlugProfile(),
) -> np.ndarray:
    """Plug power density (W/m2) per zone and slot.

    Without smart control: ``occupied_fraction`` of the density whenever anyone is
    present, ``standby_fraction`` otherwise. Smart plugs cut ``non_critical_share``
    of the standby load once a zone has been empty for ``vacancy_timeout`` minutes.
    """
    if vacancy_timeout <= 0:
        raise ConfigError("vacancy_timeout must be > 0")
    if not 0 <= non_critical_share <= 1:
        raise ConfigError("non_critical_share must be in [0, 1]")
    present = trace.fractions > 0
    power = np.where(present, profile.occupied_fraction, profile.standby_fraction) * base_density
    if smart:
        idle = ~present & (vacancy_minutes(trace.fractions) >= vacancy_timeout)
        power = np.where(idle, profile.standby_fraction * (1 - non_critical_share) * base_density, power)
    return power


def write_trace_csv(trace: OccupancyTrace, stream: TextIO) -> None:
    out = csv.writer(stream, lineterminator="\n")
    out.writerow(["timestamp", "zone_id", "occupancy_fraction"])
    step = dt.timedelta(seconds=SLOT_SECONDS)
    stamps = [(trace.start + i * step).strftime("%Y-%m-%dT%H:%M") for i in range(trace.n_slots)]
    for z, zone_id in enumerate(trace.zone_ids):
        row = trace.fractions[z]
        for i in range(trace.n_slots):
            out.writerow([stamps[i], zone_id, repr(float(row[i]))])


def read_trace_csv(stream: TextIO, design: dict[str, int] | None = None) -> OccupancyTrace:
    """Load a trace in the ``timestamp,zone_id,occupancy_fraction`` layout.

    Rows may come in any order but every zone must cover the same full year of
    10-minute slots. ``design`` supplies occupant counts (default 1 per zone).
    """
    reader = csv.reader(stream)
    header = [h.strip() for h in next(reader, [])]
    if header != ["timestamp", "zone_id", "occupancy_fraction"]:
        raise StructuralError("expected header timestamp,zone_id,occupancy_fraction")
    per_zone: dict[str, dict[dt.datetime, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise StructuralError(f"line {lineno}: expected 3 columns")
        try:
            stamp = dt.datetime.fromisoformat(row[0].strip())
            value = float(row[2])
        except ValueError:
            raise StructuralError(f"line {lineno}: bad timestamp or fraction") from None
        per_zone.setdefault(row[1].strip(), {})[stamp] = value
    if not per_zone:
        raise StructuralError("occupancy file has no rows")
    zone_ids = tuple(per_zone)
    stamps = sorted(per_zone[zone_ids[0]])
    start = stamps[0]
    rows = []
    for zone_id in zone_ids:
        series = per_zone[zone_id]
        if sorted(series) != stamps:
            raise StructuralError(f"zone {zone_id} does not share the common time grid")
        rows.append([series[s] for s in stamps])
    expected = [start + i * dt.timedelta(seconds=SLOT_SECONDS) for i in range(len(stamps))]
    if stamps != expected:
        raise StructuralError("occupancy timestamps are not a gap-free 10-minute grid")
    design = design or {}
    counts = tuple(int(design.get(z, 1)) for z in zone_ids)
    return OccupancyTrace(zone_ids, np.array(rows), counts, start)
