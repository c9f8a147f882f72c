"""Hourly weather ingestion and the outdoor-temperature statistics built on it.

Two input layouts are accepted:

* EPW: 8 header lines, then comma-separated hourly rows. Only dry-bulb (field 7),
  relative humidity (field 9), global horizontal irradiance (field 14) and wind
  speed (field 22) are read, counting fields from 1.
* Simplified CSV: header ``timestamp,dry_bulb_c,rh_pct,ghi_wm2,wind_ms`` with
  ISO-8601 local timestamps.

Timestamps are local standard time; no DST handling is attempted.
"""
from __future__ import annotations

import calendar
import csv
import datetime as dt
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import ParseError, StructuralError

CSV_HEADER = ["timestamp", "dry_bulb_c", "rh_pct", "ghi_wm2", "wind_ms"]
EPW_HEADER_LINES = 8
# 0-based column indices into an EPW data row
EPW_DRY_BULB, EPW_RH, EPW_GHI, EPW_WIND = 6, 8, 13, 21
EPW_MIN_COLUMNS = 22

PREVAILING_WINDOW_DAYS = 30


@dataclass(frozen=True)
class WeatherRecord:
    timestamp: dt.datetime
    dry_bulb_temperature: float
    relative_humidity: float
    global_horizontal_irradiance: float
    wind_speed: float


@dataclass(frozen=True)
class DailyStats:
    date: dt.date
    mean_oat: float
    max_oat: float
    min_oat: float


class WeatherSeries:
    """One calendar year of gap-free hourly weather for one location.

    Columns are held as read-only numpy arrays so a series can be shared between
    concurrently running scenarios without copying.
    """

    def __init__(self, location_id, start, dry_bulb, relative_humidity, ghi, wind_speed):
        self.location_id = location_id
        self.start = start
        self.dry_bulb = _frozen(dry_bulb)
        self.relative_humidity = _frozen(relative_humidity)
        self.ghi = _frozen(ghi)
        self.wind_speed = _frozen(wind_speed)
        n = self.dry_bulb.size
        if not (self.relative_humidity.size == self.ghi.size == self.wind_speed.size == n):
            raise StructuralError("weather columns have different lengths")
        if n not in (8760, 8784):
            raise StructuralError(f"expected 8760 or 8784 hourly records, got {n}")
        if start.month != 1 or start.day != 1 or start.hour != 0:
            raise StructuralError("weather series must start at Jan 1 00:00")
        year_hours = (366 if calendar.isleap(start.year) else 365) * 24
        if n != year_hours:
            raise StructuralError(
                f"{n} records do not cover calendar year {start.year} ({year_hours} hours)"
            )
        _check_ranges(self.dry_bulb, self.relative_humidity, self.ghi, self.wind_speed)

    @property
    def year(self) -> int:
        return self.start.year

    @property
    def n_hours(self) -> int:
        return self.dry_bulb.size

    @property
    def n_days(self) -> int:
        return self.n_hours // 24

    def timestamps(self) -> list[dt.datetime]:
        step = dt.timedelta(hours=1)
        return [self.start + i * step for i in range(self.n_hours)]

    def dates(self) -> list[dt.date]:
        first = self.start.date()
        return [first + dt.timedelta(days=i) for i in range(self.n_days)]

    @property
    def records(self) -> list[WeatherRecord]:
        return [
            WeatherRecord(ts, float(t), float(rh), float(g), float(w))
            for ts, t, rh, g, w in zip(
                self.timestamps(), self.dry_bulb, self.relative_humidity, self.ghi, self.wind_speed
            )
        ]

    def __len__(self):
        return self.n_hours

    def __eq__(self, other):
        if not isinstance(other, WeatherSeries):
            return NotImplemented
        return (
            self.location_id == other.location_id
            and self.start == other.start
            and np.array_equal(self.dry_bulb, other.dry_bulb)
            and np.array_equal(self.relative_humidity, other.relative_humidity)
            and np.array_equal(self.ghi, other.ghi)
            and np.array_equal(self.wind_speed, other.wind_speed)
        )

    def __repr__(self):
        return f"WeatherSeries({self.location_id!r}, year={self.year}, hours={self.n_hours})"


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_ranges(t, rh, ghi, wind):
    if not np.all(np.isfinite(t)) or np.any((t < -70) | (t > 70)):
        raise StructuralError("dry-bulb temperature outside [-70, 70] degC")
    if np.any((rh < 0) | (rh > 100)):
        raise StructuralError("relative humidity outside [0, 100] %")
    if np.any(ghi < 0) or np.any(wind < 0):
        raise StructuralError("negative irradiance or wind speed")


def _field(raw: str, name: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"non-numeric {name} {raw.strip()!r}", line) from None
    if value != value:
        raise ParseError(f"NaN {name}", line)
    return value


def _check_record(t, rh, ghi, wind, line):
    # EPW missing-value sentinels, then physical ranges
    if t >= 99.9 or rh >= 999 or ghi >= 9999 or wind >= 999:
        raise ParseError("missing-value sentinel in a required field", line)
    if not -70 <= t <= 70:
        raise ParseError(f"dry-bulb {t} outside [-70, 70] degC", line)
    if not 0 <= rh <= 100:
        raise ParseError(f"relative humidity {rh} outside [0, 100] %", line)
    if ghi < 0 or wind < 0:
        raise ParseError("negative irradiance or wind speed", line)


def _parse_epw(lines: Sequence[str], location_id):
    if len(lines) < EPW_HEADER_LINES:
        raise StructuralError("EPW file shorter than its 8 header lines")
    if location_id is None:
        head = lines[0].split(",")
        location_id = head[1].strip() if len(head) > 1 else "unknown"
    cols = {k: [] for k in ("t", "rh", "ghi", "wind")}
    first = None
    for lineno, text in enumerate(lines[EPW_HEADER_LINES:], start=EPW_HEADER_LINES + 1):
        if not text.strip():
            continue
        row = text.rstrip("\r\n").split(",")
        if len(row) < EPW_MIN_COLUMNS:
            raise ParseError(f"expected at least {EPW_MIN_COLUMNS} columns, got {len(row)}", lineno)
        try:
            year, month, day, hour = (int(row[i]) for i in range(4))
        except ValueError:
            raise ParseError("non-integer date/time field", lineno) from None
        if first is None:
            first = (year, month, day, hour)
        if hour != len(cols["t"]) % 24 + 1:
            raise StructuralError(f"line {lineno}: hour {hour} breaks the hourly sequence")
        t = _field(row[EPW_DRY_BULB], "dry-bulb", lineno)
        rh = _field(row[EPW_RH], "relative humidity", lineno)
        ghi = _field(row[EPW_GHI], "irradiance", lineno)
        wind = _field(row[EPW_WIND], "wind speed", lineno)
        _check_record(t, rh, ghi, wind, lineno)
        cols["t"].append(t)
        cols["rh"].append(rh)
        cols["ghi"].append(ghi)
        cols["wind"].append(wind)
    n = len(cols["t"])
    if n not in (8760, 8784):
        raise StructuralError(f"expected 8760 or 8784 hourly records, got {n}")
    if first[1:] != (1, 1, 1):
        raise StructuralError("EPW data must start at Jan 1, hour 1")
    # TMY files mix source years; the calendar comes from the first row when it
    # fits the record count, otherwise from a fixed reference year.
    year = first[0]
    if (n == 8784) != calendar.isleap(year):
        year = 2020 if n == 8784 else 2019
    start = dt.datetime(year, 1, 1)
    return WeatherSeries(location_id, start, cols["t"], cols["rh"], cols["ghi"], cols["wind"])


def _parse_csv(lines: Sequence[str], location_id):
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    if header != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)}", 1)
    stamps, cols = [], {k: [] for k in ("t", "rh", "ghi", "wind")}
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"expected {len(CSV_HEADER)} columns, got {len(row)}", lineno)
        try:
            stamp = dt.datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise ParseError(f"bad timestamp {row[0]!r}", lineno) from None
        if stamp.tzinfo is not None:
            stamp = stamp.replace(tzinfo=None)
        if stamps and stamp - stamps[-1] != dt.timedelta(hours=1):
            raise StructuralError(f"line {lineno}: timestamps not strictly hourly")
        t = _field(row[1], "dry-bulb", lineno)
        rh = _field(row[2], "relative humidity", lineno)
        ghi = _field(row[3], "irradiance", lineno)
        wind = _field(row[4], "wind speed", lineno)
        _check_record(t, rh, ghi, wind, lineno)
        stamps.append(stamp)
        cols["t"].append(t)
        cols["rh"].append(rh)
        cols["ghi"].append(ghi)
        cols["wind"].append(wind)
    if not stamps:
        raise StructuralError("weather file has no data rows")
    return WeatherSeries(
        location_id or "unknown", stamps[0], cols["t"], cols["rh"], cols["ghi"], cols["wind"]
    )


def parse_weather(text_stream: TextIO | Iterable[str], location_id: str | None = None) -> WeatherSeries:
    """Parse an EPW or simplified-CSV weather stream into a ``WeatherSeries``.

    Raises ``ParseError`` (with the 1-based line number) for malformed rows and
    ``StructuralError`` for a wrong record count or broken hourly spacing.
    """
    lines = list(text_stream)
    if not lines:
        raise StructuralError("empty weather file")
    if lines[0].lstrip("﻿").startswith("timestamp"):
        lines[0] = lines[0].lstrip("﻿")
        return _parse_csv(lines, location_id)
    return _parse_epw(lines, location_id)


def load_weather(path, location_id: str | None = None) -> WeatherSeries:
    path = Path(path)
    with open(path, newline="") as fh:
        return parse_weather(fh, location_id or path.stem)


def write_weather_csv(series: WeatherSeries, stream: TextIO) -> None:
    """Serialize in the simplified CSV layout; floats use repr so parsing round-trips exactly."""
    out = csv.writer(stream, lineterminator="\n")
    out.writerow(CSV_HEADER)
    for ts, t, rh, g, w in zip(
        series.timestamps(), series.dry_bulb, series.relative_humidity, series.ghi, series.wind_speed
    ):
        out.writerow([ts.strftime("%Y-%m-%dT%H:%M"), repr(float(t)), repr(float(rh)), repr(float(g)), repr(float(w))])


def to_csv_text(series: WeatherSeries) -> str:
    buf = io.StringIO()
    write_weather_csv(series, buf)
    return buf.getvalue()


def daily_stats(series: WeatherSeries) -> list[DailyStats]:
    """Per-calendar-day mean, max and min of the 24 hourly dry-bulb values."""
    temps = series.dry_bulb.reshape(series.n_days, 24)
    means = temps.mean(axis=1)
    maxes = temps.max(axis=1)
    mins = temps.min(axis=1)
    return [
        DailyStats(d, float(m), float(hi), float(lo))
        for d, m, hi, lo in zip(series.dates(), means, maxes, mins)
    ]


def prevailing_mean_oat(stats: Sequence[DailyStats], date: dt.date) -> float:
    """Unweighted mean of the 30 daily mean OATs strictly before ``date``.

    Early-January dates borrow their history from the end of the same annual
    series.
    """
    n = len(stats)
    if n < PREVAILING_WINDOW_DAYS:
        raise StructuralError(f"need at least {PREVAILING_WINDOW_DAYS} days of statistics")
    index = (date - stats[0].date).days
    if not 0 <= index < n or stats[index].date != date:
        raise StructuralError(f"{date} is not covered by the daily statistics")
    total = 0.0
    for k in range(1, PREVAILING_WINDOW_DAYS + 1):
        total += stats[(index - k) % n].mean_oat
    return total / PREVAILING_WINDOW_DAYS


def prevailing_mean_series(stats: Sequence[DailyStats]) -> np.ndarray:
    """``prevailing_mean_oat`` for every day of the series, as an array."""
    return np.array([prevailing_mean_oat(stats, s.date) for s in stats])
