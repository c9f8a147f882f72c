"""Calendar and time-grid helpers shared by schedules, occupancy and the engine."""
from __future__ import annotations

import calendar as _cal
import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, StructuralError

SLOT_SECONDS = 600  # 10-minute schedule/occupancy grid
SLOTS_PER_DAY = 86400 // SLOT_SECONDS
SLOTS_PER_HOUR = 3600 // SLOT_SECONDS


def _nth_weekday(year, month, weekday, n):
    first = dt.date(year, month, 1)
    offset = (weekday - first.weekday()) % 7
    return first + dt.timedelta(days=offset + 7 * (n - 1))


def _last_weekday(year, month, weekday):
    last = dt.date(year, month, _cal.monthrange(year, month)[1])
    return last - dt.timedelta(days=(last.weekday() - weekday) % 7)


def us_holidays(year: int) -> frozenset[dt.date]:
    """Fixed-date office holidays: New Year, Memorial, Independence, Labor, Thanksgiving, Christmas."""
    return frozenset({
        dt.date(year, 1, 1),
        _last_weekday(year, 5, 0),
        dt.date(year, 7, 4),
        _nth_weekday(year, 9, 0, 1),
        _nth_weekday(year, 11, 3, 4),
        dt.date(year, 12, 25),
    })


@dataclass(frozen=True)
class OfficeCalendar:
    year: int
    occupied_start: float = 8.0  # hour of day
    occupied_end: float = 17.0
    holidays: frozenset = field(default=None)

    def __post_init__(self):
        if self.holidays is None:
            object.__setattr__(self, "holidays", us_holidays(self.year))
        if not 0 <= self.occupied_start < self.occupied_end <= 24:
            raise ConfigError("occupied hours must satisfy 0 <= start < end <= 24")
        for hour in (self.occupied_start, self.occupied_end):
            if (hour * 3600) % SLOT_SECONDS:
                raise ConfigError("occupied hours must fall on the 10-minute grid")

    @property
    def n_days(self) -> int:
        return 366 if _cal.isleap(self.year) else 365

    @property
    def n_slots(self) -> int:
        return self.n_days * SLOTS_PER_DAY

    def dates(self) -> list[dt.date]:
        first = dt.date(self.year, 1, 1)
        return [first + dt.timedelta(days=i) for i in range(self.n_days)]

    def is_workday(self, date: dt.date) -> bool:
        return date.weekday() < 5 and date not in self.holidays

    def workdays(self) -> np.ndarray:
        return np.array([self.is_workday(d) for d in self.dates()])

    def occupied_slots(self) -> np.ndarray:
        """Boolean mask over the 10-minute grid: scheduled occupied periods."""
        start = int(self.occupied_start * SLOTS_PER_HOUR)
        end = int(self.occupied_end * SLOTS_PER_HOUR)
        day = np.zeros(SLOTS_PER_DAY, dtype=bool)
        day[start:end] = True
        return (self.workdays()[:, None] & day[None, :]).ravel()

    def slot_timestamps(self) -> list[dt.datetime]:
        start = dt.datetime(self.year, 1, 1)
        step = dt.timedelta(seconds=SLOT_SECONDS)
        return [start + i * step for i in range(self.n_slots)]

    def check_year(self, year: int):
        if year != self.year:
            raise StructuralError(f"calendar year {self.year} does not match weather year {year}")


def check_dt(dt_seconds) -> int:
    """Simulation steps must tile the 10-minute grid exactly."""
    if dt_seconds != int(dt_seconds) or dt_seconds <= 0 or SLOT_SECONDS % int(dt_seconds):
        raise ConfigError(f"dt must be a whole divisor of {SLOT_SECONDS} s, got {dt_seconds}")
    return int(dt_seconds)
