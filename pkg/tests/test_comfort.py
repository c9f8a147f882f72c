import datetime as dt
import io

import numpy as np
import pytest

from conftest import constant_series, make_series
from officesim.comfort import (
    ADAPTIVE_55,
    ADAPTIVE_90,
    SetpointLevels,
    adaptive_setpoint,
    apply_adaptive,
    build_schedule,
    write_schedule_csv,
)
from officesim.errors import ConfigError, StructuralError
from officesim.timeline import SLOTS_PER_DAY, OfficeCalendar


def slot(date, hour, minute=0):
    day = (date - dt.date(date.year, 1, 1)).days
    return day * SLOTS_PER_DAY + hour * 6 + minute // 10


@pytest.mark.parametrize(
    "variant,t,expected",
    [
        (ADAPTIVE_55, 10.0, 20.9),   # 0.31*10 + 17.8 = 20.9, at the lower clamp
        (ADAPTIVE_55, 20.0, 24.0),
        (ADAPTIVE_55, 5.0, 20.9),    # below the window -> lower bound
        (ADAPTIVE_55, 40.0, 28.2),   # above the window -> upper bound
        (ADAPTIVE_55, 33.5, 28.185),  # last in-window value, just under the bound
        (ADAPTIVE_90, 33.5, 30.6),   # 30.685 -> upper clamp
        (ADAPTIVE_90, 10.0, 23.4),
        (ADAPTIVE_90, 20.0, 26.5),
    ],
)
def test_adaptive_examples(variant, t, expected):
    assert adaptive_setpoint(variant, t) == pytest.approx(expected, abs=1e-9)


def test_window_endpoints_are_exact():
    assert adaptive_setpoint(ADAPTIVE_55, 10.0) == 20.9
    assert adaptive_setpoint(ADAPTIVE_55, 33.6) == 28.2
    assert adaptive_setpoint(ADAPTIVE_90, 10.0) == 23.4
    assert adaptive_setpoint(ADAPTIVE_90, 33.5) == 30.6


def _reference(intercept, lo, hi, t):
    # written out longhand, independent of the module
    if t <= 10.0:
        return lo
    if t > 33.5:
        return hi
    value = 0.31 * t + intercept
    return lo if value < lo else hi if value > hi else value


def test_adaptive_brute_force_reference():
    rng = np.random.default_rng(2024)
    for t in rng.uniform(-10.0, 45.0, 1000):
        assert abs(adaptive_setpoint(ADAPTIVE_55, t) - _reference(17.8, 20.9, 28.2, t)) <= 1e-9
        assert abs(adaptive_setpoint(ADAPTIVE_90, t) - _reference(20.3, 23.4, 30.6, t)) <= 1e-9


def test_adaptive_monotone_and_a90_dominates():
    grid = np.linspace(-20, 50, 2001)
    a55 = np.array([adaptive_setpoint(ADAPTIVE_55, t) for t in grid])
    a90 = np.array([adaptive_setpoint(ADAPTIVE_90, t) for t in grid])
    assert np.all(np.diff(a55) >= 0) and np.all(np.diff(a90) >= 0)
    assert np.all(a90 >= a55)
    assert a55.min() >= 20.9 and a55.max() <= 28.2
    assert a90.min() >= 23.4 and a90.max() <= 30.6


def test_static_schedule_levels():
    cal = OfficeCalendar(2019)
    sched = build_schedule(None, constant_series(20.0), cal)
    assert sched.n_slots == 365 * SLOTS_PER_DAY
    wed = dt.date(2019, 7, 10)
    sat = dt.date(2019, 7, 13)
    assert sched.cooling[slot(wed, 10)] == 22.2
    assert sched.heating[slot(wed, 10)] == 21.1
    assert sched.cooling[slot(sat, 14)] == 29.0
    assert sched.heating[slot(sat, 14)] == 15.6
    assert sched.cooling[slot(wed, 7, 50)] == 29.0
    assert sched.cooling[slot(wed, 8)] == 22.2
    assert sched.cooling[slot(wed, 16, 50)] == 22.2
    assert sched.cooling[slot(wed, 17)] == 29.0


def test_holidays_are_unoccupied():
    sched = build_schedule(None, constant_series(20.0), OfficeCalendar(2019))
    for holiday in (dt.date(2019, 7, 4), dt.date(2019, 12, 25), dt.date(2019, 11, 28)):
        assert not sched.occupied[slot(holiday, 10)]
        assert sched.cooling[slot(holiday, 10)] == 29.0


def test_adaptive_schedule_constant_weather():
    # prevailing mean 20 degC everywhere -> 24.0 degC occupied cooling setpoint
    sched = build_schedule(ADAPTIVE_55, constant_series(20.0), OfficeCalendar(2019))
    occ = sched.occupied
    assert np.allclose(sched.cooling[occ], 24.0)
    assert np.all(sched.cooling[~occ] == 29.0)


def test_cooling_always_above_heating():
    series = make_series(np.full(8760, -15.0))
    for variant in (None, ADAPTIVE_55, ADAPTIVE_90):
        sched = build_schedule(variant, series, OfficeCalendar(2019))
        assert np.all(sched.cooling >= sched.heating + 1.0 - 1e-12)


def test_year_mismatch_is_structural():
    with pytest.raises(StructuralError):
        build_schedule(None, constant_series(20.0, 2019), OfficeCalendar(2020))


def test_inverted_levels_rejected():
    with pytest.raises(ConfigError):
        SetpointLevels(cooling_occupied=21.5, heating_occupied=21.1)


def test_apply_adaptive_length_check():
    sched = build_schedule(None, constant_series(20.0), OfficeCalendar(2019))
    with pytest.raises(StructuralError):
        apply_adaptive(sched, np.full(10, 24.0))


def test_schedule_csv_layout():
    sched = build_schedule(None, constant_series(20.0), OfficeCalendar(2019))
    buf = io.StringIO()
    write_schedule_csv(sched, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "timestamp,cooling_setpoint_c,heating_setpoint_c,occupied_flag"
    assert len(lines) == 1 + sched.n_slots
    assert lines[1] == "2019-01-01T00:00,29.0,15.6,0"
    # Jan 2 2019 is a Wednesday; 08:00 is slot 48 of that day
    assert lines[1 + SLOTS_PER_DAY + 48] == "2019-01-02T08:00,22.2,21.1,1"
