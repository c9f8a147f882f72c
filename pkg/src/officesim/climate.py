"""Climate-zone registry: representative cities, bundled weather, stock counts."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class ClimateZone:
    zone: str
    city: str
    latitude: float
    moisture: str  # A humid, B dry, C marine
    small_office_count: int
    weather_file: str
    in_savings_table: bool

    @property
    def temperature_band(self) -> int:
        return int(self.zone[0])

    @property
    def weather_path(self) -> Path:
        return data_path("weather", self.weather_file)


def data_path(*parts) -> Path:
    return Path(str(resources.files("officesim").joinpath("data", *parts)))


@lru_cache(maxsize=None)
def climate_zones() -> dict[str, ClimateZone]:
    with open(data_path("climate_zones.csv"), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        r["zone"]: ClimateZone(
            zone=r["zone"],
            city=r["city"],
            latitude=float(r["latitude"]),
            moisture=r["moisture"],
            small_office_count=int(r["small_office_count"]),
            weather_file=r["weather_file"],
            in_savings_table=r["in_savings_table"] == "1",
        )
        for r in rows
    }


def get_zone(zone: str) -> ClimateZone:
    try:
        return climate_zones()[zone]
    except KeyError:
        known = ", ".join(climate_zones())
        raise ConfigError(f"unknown climate zone {zone!r} (known: {known})") from None


def all_zone_ids() -> list[str]:
    return list(climate_zones())


def savings_table_zone_ids() -> list[str]:
    """The 13 zones 1A-6B; zone 7 is simulated but footnoted in reports."""
    return [z for z, c in climate_zones().items() if c.in_savings_table]
