import datetime as dt

import numpy as np
import pytest

from conftest import constant_series
from officesim.comfort import ADAPTIVE_55, build_schedule
from officesim.errors import ConfigError, StructuralError
from officesim.measures import (
    MeasureSet,
    OccupancyHvacParams,
    PurgeParams,
    baseline_inputs,
    compose,
    night_purge_decide,
    occupancy_hvac_transform,
    preset,
)
from officesim.occupancy import OccupancyParams, static_trace, stochastic_trace
from officesim.timeline import SLOTS_PER_DAY, OfficeCalendar
from officesim.weather import daily_stats, load_weather, prevailing_mean_series
from officesim.climate import get_zone

CAL = OfficeCalendar(2019)
WED = (dt.date(2019, 1, 2) - dt.date(2019, 1, 1)).days * SLOTS_PER_DAY
SAT = (dt.date(2019, 1, 5) - dt.date(2019, 1, 1)).days * SLOTS_PER_DAY


@pytest.fixture(scope="module")
def schedule():
    return build_schedule(None, constant_series(20.0), CAL)


def _decide(t_air=26.0, t_out=18.0, tomorrow=22.0, next_sp=22.2, occupied=False, params=PurgeParams()):
    return night_purge_decide(t_air, t_out, tomorrow, next_sp, occupied, params, 2.0, 150.0)


def test_purge_examples():
    d = _decide()
    assert d.active and d.ventilation_ach == 2.0 and d.fan_electric == pytest.approx(300.0)
    assert not _decide(tomorrow=27.0).active
    assert not _decide(t_air=25.0, t_out=24.0).active
    assert not _decide(occupied=True).active
    assert not _decide(t_out=11.0, t_air=20.0).active  # below min_outdoor
    assert not _decide(t_air=21.0, t_out=15.0).active  # already below next setpoint - 1 K
    assert _decide(tomorrow=27.0, params=PurgeParams(next_day_mean_limit=None)).active


def test_purge_window():
    p = PurgeParams()
    assert p.in_window(18.0) and p.in_window(23.9) and p.in_window(0.0) and p.in_window(7.9)
    assert not p.in_window(8.0) and not p.in_window(12.0) and not p.in_window(17.9)
    with pytest.raises(ConfigError):
        PurgeParams(start_hour=12)
    with pytest.raises(ConfigError):
        PurgeParams(min_delta=0)


def test_occupancy_transform_lunch_vacancy(schedule):
    occ = static_trace(CAL, ("z",), (1,)).fractions[0].copy()
    occ[WED + 72:WED + 81] = 0.0  # 12:00-13:30 empty
    params = OccupancyHvacParams(vacancy_timeout=20, vacancy_offset=2.0, deep_setback_after=120)
    out = occupancy_hvac_transform(schedule, occ, params)
    day = out.cooling[WED:WED + SLOTS_PER_DAY]
    assert day[72] == day[73] == 22.2          # 12:00, 12:10
    assert np.allclose(day[74:81], 24.2)        # 12:20 .. 13:20
    assert day[81] == 22.2                      # 13:30 back
    assert np.array_equal(out.heating, schedule.heating)


def test_occupancy_transform_deep_setback(schedule):
    occ = static_trace(CAL, ("z",), (1,)).fractions[0].copy()
    occ[WED + 60:WED + 90] = 0.0  # 10:00-15:00 empty
    out = occupancy_hvac_transform(schedule, occ, OccupancyHvacParams())
    day = out.cooling[WED:WED + SLOTS_PER_DAY]
    assert day[61] == 22.2
    assert day[62] == pytest.approx(25.0)   # +2.8 K after 20 min
    assert day[72] == 29.0                   # full setback after 120 min
    assert out.heating[WED + 72] == 15.6
    assert day[90] == 22.2


def test_occupancy_transform_evening_work_extends_conditioning(schedule):
    occ = static_trace(CAL, ("z",), (1,)).fractions[0].copy()
    occ[WED + 108:WED + 114] = 1.0  # 18:00-19:00 someone stays
    out = occupancy_hvac_transform(schedule, occ, OccupancyHvacParams())
    assert out.cooling[WED + 110] == 22.2
    assert out.heating[WED + 110] == 21.1


def test_occupancy_transform_identity_and_saturday(schedule):
    occ = static_trace(CAL, ("z",), (1,)).fractions[0]
    out = occupancy_hvac_transform(schedule, occ, OccupancyHvacParams())
    assert out == schedule
    assert np.all(out.cooling[SAT:SAT + SLOTS_PER_DAY] == 29.0)


def test_occupancy_transform_grid_mismatch(schedule):
    with pytest.raises(StructuralError):
        occupancy_hvac_transform(schedule, np.zeros(100), OccupancyHvacParams())


def _base_inputs(seed=4):
    weather = load_weather(get_zone("4A").weather_path)
    cal = OfficeCalendar(weather.year)
    sched = build_schedule(None, weather, cal)
    zones = ("core", "south")
    trace = stochastic_trace(OccupancyParams(random_seed=seed), cal, zones, (8, 4))
    pma = prevailing_mean_series(daily_stats(weather))
    return weather, cal, baseline_inputs(sched, trace, 10.0, pma)


@pytest.fixture(scope="module")
def inputs():
    return _base_inputs()


def test_empty_measure_set_is_identity(inputs):
    _, _, base = inputs
    assert compose(MeasureSet(), base, 10.0) == base


def test_adaptive_only_matches_manual_schedule(inputs):
    weather, cal, base = inputs
    out = compose(preset("adaptive"), base, 10.0)
    manual = build_schedule(ADAPTIVE_55, weather, cal)
    assert all(s == manual for s in out.schedules)


def test_compose_idempotent(inputs):
    _, _, base = inputs
    once = compose(preset("all"), base, 10.0)
    assert compose(preset("all"), once, 10.0) == once


def test_compose_never_lowers_cooling_setpoint(inputs):
    _, _, base = inputs
    out = compose(preset("all"), base, 10.0)
    adaptive = compose(preset("adaptive"), base, 10.0).schedules[0]
    for s in out.schedules:
        assert np.all(s.cooling >= adaptive.occupied_cooling - 1e-12)
    assert np.all(out.plug_density <= base.plug_density)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("everything")
