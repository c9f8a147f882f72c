import datetime as dt
from dataclasses import replace
from functools import lru_cache

import numpy as np
import pytest

from officesim.config import ScenarioConfig, with_measures
from officesim.engine import prepare, simulate, size_equipment
from officesim.weather import WeatherSeries

ACCEPTANCE_LINES = []


def make_series(dry_bulb, year=2019, ghi=None, location="TEST"):
    t = np.asarray(dry_bulb, dtype=float)
    n = t.size
    return WeatherSeries(
        location,
        dt.datetime(year, 1, 1),
        t,
        np.full(n, 50.0),
        np.zeros(n) if ghi is None else np.asarray(ghi, dtype=float),
        np.full(n, 2.0),
    )


def constant_series(value=20.0, year=2019):
    hours = (366 if year % 4 == 0 else 365) * 24
    return make_series(np.full(hours, value), year)


@lru_cache(maxsize=None)
def annual_runs(zone="4A"):
    """Baseline plus every measure case for one climate, on shared equipment."""
    base = ScenarioConfig(climate_zone=zone)
    prep = prepare(base)
    caps = size_equipment(prep)
    out = {"baseline": simulate(prep, caps), "capacities": caps}
    cases = {
        "a55": with_measures(base, "adaptive", "a55"),
        "a90": with_measures(base, "adaptive", "a90"),
        "occupancy": with_measures(base, "occupancy"),
        "purge": with_measures(base, "purge"),
        "combined": with_measures(base, "all"),
    }
    nogate = with_measures(base, "purge")
    cases["purge_nogate"] = replace(
        nogate, measures=replace(nogate.measures, purge_params=replace(nogate.measures.purge_params,
                                                                       next_day_mean_limit=None))
    )
    for name, cfg in cases.items():
        out[name] = simulate(prepare(cfg), caps)
    return out


@pytest.fixture(scope="session")
def runs_4a():
    return annual_runs("4A")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
