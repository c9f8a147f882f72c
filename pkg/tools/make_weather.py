"""Generate the bundled synthetic typical-year weather files.

Each representative city gets one 8760-hour year built from approximate
1991-2020 monthly climate normals (mean daily high/low, mean RH, mean daily
global horizontal irradiation). Day-to-day weather is an AR(1) temperature
anomaly plus a cloudiness anomaly; hours follow a two-piece cosine diurnal
curve and a clear-sky cosine-zenith irradiance profile. Seeds are fixed, so
re-running this script reproduces the shipped files byte for byte.

Usage:
    python tools/make_weather.py [output_dir]
"""
import csv
import datetime as dt
import math
import sys
from pathlib import Path

import numpy as np

YEAR = 2019

# monthly normals: high degC, low degC, RH %, GHI kWh/m2/day
NORMALS = {
    "1A": dict(
        hi=[24.8, 25.8, 26.9, 28.6, 30.4, 31.9, 32.6, 32.6, 31.9, 30.1, 27.7, 25.7],
        lo=[16.3, 17.2, 18.8, 21.1, 23.4, 24.9, 25.4, 25.5, 25.0, 23.3, 20.3, 17.9],
        rh=[72, 70, 69, 67, 71, 76, 75, 76, 78, 75, 74, 73],
        ghi=[3.9, 4.7, 5.6, 6.4, 6.4, 5.9, 6.1, 5.8, 5.1, 4.6, 4.0, 3.6],
        sigma=1.2, wind=4.2),
    "2A": dict(
        hi=[17.6, 19.7, 23.3, 26.7, 30.4, 33.2, 34.3, 34.6, 32.1, 27.9, 22.3, 18.4],
        lo=[7.3, 9.2, 12.8, 16.4, 20.9, 23.9, 24.7, 24.6, 22.0, 17.1, 11.7, 8.1],
        rh=[75, 73, 73, 74, 75, 75, 74, 74, 75, 74, 75, 76],
        ghi=[3.0, 3.8, 4.6, 5.4, 5.9, 6.3, 6.3, 5.9, 5.1, 4.4, 3.4, 2.8],
        sigma=2.5, wind=3.6),
    "2B": dict(
        hi=[19.6, 21.8, 25.7, 30.2, 35.4, 40.6, 41.3, 40.6, 37.7, 31.7, 24.5, 19.1],
        lo=[8.1, 9.7, 12.8, 16.8, 21.9, 26.9, 29.6, 29.1, 25.9, 19.6, 12.4, 7.7],
        rh=[50, 44, 37, 25, 19, 16, 28, 32, 31, 34, 43, 51],
        ghi=[3.4, 4.4, 5.8, 7.3, 8.1, 8.3, 7.5, 6.9, 6.2, 5.0, 3.8, 3.2],
        sigma=1.8, wind=2.8),
    "3A": dict(
        hi=[11.6, 14.2, 18.6, 23.1, 27.1, 30.4, 32.0, 31.4, 28.6, 23.4, 17.6, 12.8],
        lo=[1.4, 3.1, 6.6, 10.8, 15.6, 19.6, 21.4, 21.2, 18.3, 12.1, 6.2, 2.8],
        rh=[67, 63, 62, 61, 67, 70, 73, 74, 73, 69, 68, 69],
        ghi=[2.8, 3.6, 4.7, 5.9, 6.3, 6.5, 6.3, 5.9, 5.0, 4.2, 3.1, 2.6],
        sigma=2.6, wind=3.8),
    "3B": dict(
        hi=[14.6, 17.3, 21.6, 25.8, 31.8, 37.6, 40.6, 39.5, 34.9, 27.7, 19.4, 13.6],
        lo=[3.6, 5.9, 9.4, 13.1, 18.8, 24.2, 27.7, 26.7, 21.9, 14.8, 7.7, 3.0],
        rh=[45, 40, 33, 25, 20, 15, 17, 21, 22, 27, 36, 45],
        ghi=[3.0, 4.0, 5.5, 7.0, 7.9, 8.4, 7.9, 7.2, 6.2, 4.8, 3.5, 2.8],
        sigma=2.0, wind=4.0),
    "3C": dict(
        hi=[14.2, 15.8, 17.3, 18.8, 20.3, 22.3, 22.6, 23.0, 23.7, 21.8, 17.7, 14.4],
        lo=[6.2, 7.2, 8.0, 8.7, 10.3, 11.8, 12.9, 13.5, 13.0, 11.3, 8.6, 6.5],
        rh=[75, 73, 71, 69, 69, 69, 72, 73, 71, 70, 72, 75],
        ghi=[2.3, 3.1, 4.4, 5.8, 6.8, 7.3, 7.2, 6.4, 5.3, 3.9, 2.7, 2.1],
        sigma=1.6, wind=4.8),
    "4A": dict(
        hi=[3.9, 5.3, 9.8, 16.2, 21.6, 26.6, 29.4, 28.6, 24.8, 18.4, 12.3, 6.6],
        lo=[-2.6, -1.6, 2.1, 7.4, 12.9, 18.3, 21.5, 21.0, 17.3, 11.1, 5.5, 0.6],
        rh=[62, 60, 58, 56, 62, 64, 65, 67, 68, 66, 64, 64],
        ghi=[1.9, 2.7, 3.8, 4.8, 5.6, 6.0, 6.0, 5.3, 4.3, 3.1, 2.0, 1.6],
        sigma=2.8, wind=4.6),
    "4B": dict(
        hi=[9.4, 12.6, 17.2, 21.4, 27.0, 32.4, 33.3, 31.8, 28.3, 21.9, 14.4, 8.9],
        lo=[-4.7, -2.2, 1.3, 5.4, 10.8, 16.4, 19.4, 18.6, 14.6, 7.7, 0.6, -4.3],
        rh=[55, 48, 38, 30, 28, 26, 38, 44, 43, 42, 48, 56],
        ghi=[3.3, 4.3, 5.6, 7.0, 7.9, 8.3, 7.7, 7.0, 6.1, 4.9, 3.6, 3.0],
        sigma=2.4, wind=3.7),
    "4C": dict(
        hi=[8.3, 9.6, 11.9, 14.8, 18.6, 21.4, 24.9, 25.0, 21.7, 15.9, 10.9, 8.1],
        lo=[2.6, 2.6, 4.2, 5.9, 8.8, 11.4, 13.4, 13.6, 11.3, 7.9, 4.6, 2.6],
        rh=[80, 76, 73, 70, 67, 65, 64, 66, 70, 77, 80, 81],
        ghi=[0.9, 1.6, 2.8, 4.2, 5.4, 5.9, 6.4, 5.4, 3.9, 2.2, 1.1, 0.8],
        sigma=1.8, wind=3.9),
    "5A": dict(
        hi=[0.0, 2.1, 8.2, 14.8, 21.1, 26.6, 28.9, 28.0, 24.1, 17.2, 9.3, 2.6],
        lo=[-8.3, -6.6, -1.5, 3.7, 9.4, 15.0, 18.4, 17.9, 13.5, 6.9, 0.6, -5.2],
        rh=[73, 72, 70, 66, 66, 68, 70, 73, 72, 70, 74, 77],
        ghi=[1.8, 2.6, 3.6, 4.6, 5.6, 6.2, 6.1, 5.4, 4.4, 3.1, 1.9, 1.5],
        sigma=3.2, wind=4.6),
    "5B": dict(
        hi=[7.2, 8.0, 12.4, 16.0, 21.4, 27.7, 31.1, 29.6, 25.2, 18.4, 11.4, 6.9],
        lo=[-6.6, -5.7, -1.6, 1.8, 7.1, 12.3, 15.7, 14.8, 10.0, 3.7, -2.2, -6.6],
        rh=[52, 53, 50, 46, 48, 44, 42, 44, 44, 44, 52, 53],
        ghi=[2.6, 3.4, 4.7, 5.8, 6.4, 7.0, 6.9, 6.2, 5.4, 4.2, 2.9, 2.4],
        sigma=3.2, wind=3.8),
    "6A": dict(
        hi=[-4.8, -2.0, 4.6, 13.1, 20.0, 25.6, 28.3, 26.7, 22.1, 14.3, 5.2, -2.6],
        lo=[-14.3, -11.7, -4.9, 1.8, 8.6, 14.4, 17.6, 16.4, 11.3, 4.1, -3.3, -10.7],
        rh=[72, 71, 69, 61, 61, 64, 66, 69, 71, 69, 74, 76],
        ghi=[1.8, 2.8, 4.0, 5.0, 5.9, 6.4, 6.5, 5.6, 4.3, 2.9, 1.8, 1.4],
        sigma=3.5, wind=4.5),
    "6B": dict(
        hi=[1.7, 3.7, 9.0, 14.0, 19.2, 24.5, 30.3, 29.4, 22.9, 14.9, 6.7, 1.1],
        lo=[-10.7, -9.3, -4.5, -0.1, 5.0, 9.6, 13.4, 12.6, 7.2, 1.2, -5.5, -10.7],
        rh=[68, 64, 56, 47, 47, 45, 37, 37, 45, 52, 63, 69],
        ghi=[1.7, 2.6, 3.9, 5.2, 6.0, 6.8, 7.1, 6.1, 4.6, 3.1, 1.9, 1.4],
        sigma=3.5, wind=3.6),
    "7": dict(
        hi=[-7.3, -4.5, 1.3, 8.6, 16.0, 21.3, 24.6, 23.6, 18.6, 10.8, 2.2, -4.7],
        lo=[-17.3, -15.3, -8.9, -1.6, 4.3, 9.4, 13.7, 13.1, 8.3, 1.7, -5.7, -13.4],
        rh=[73, 72, 71, 66, 65, 72, 74, 77, 77, 74, 77, 77],
        ghi=[1.6, 2.6, 3.8, 4.9, 5.6, 6.0, 6.1, 5.2, 3.7, 2.4, 1.4, 1.2],
        sigma=3.6, wind=4.8),
}

SEEDS = {zone: 1000 + i for i, zone in enumerate(NORMALS)}


def _daily_climatology(monthly, n_days):
    """Periodic linear interpolation of mid-month values onto each day."""
    mids = np.array([
        (dt.date(YEAR, m, 15) - dt.date(YEAR, 1, 1)).days + 0.5 for m in range(1, 13)
    ])
    values = np.asarray(monthly, dtype=float)
    x = np.concatenate([mids - 365, mids, mids + 365])
    y = np.concatenate([values, values, values])
    return np.interp(np.arange(n_days) + 0.5, x, y)


def _ar1(rng, n, rho, sigma):
    out = np.empty(n)
    out[0] = rng.normal(0.0, sigma)
    innov = sigma * math.sqrt(1 - rho**2)
    for i in range(1, n):
        out[i] = rho * out[i - 1] + rng.normal(0.0, innov)
    return out


def synthesize(zone, latitude):
    norms = NORMALS[zone]
    rng = np.random.default_rng(SEEDS[zone])
    n_days = 365
    doy = np.arange(n_days)

    hi = _daily_climatology(norms["hi"], n_days)
    lo = _daily_climatology(norms["lo"], n_days)
    rh = _daily_climatology(norms["rh"], n_days)
    ghi_day = _daily_climatology(norms["ghi"], n_days)

    # anomalies are larger in winter
    sigma = norms["sigma"] * (1 + 0.3 * np.cos(2 * np.pi * (doy - 15) / 365))
    temp_anom = _ar1(rng, n_days, 0.7, 1.0) * sigma
    cloud = _ar1(rng, n_days, 0.4, 1.0)
    clearness = np.clip(1 + 0.22 * cloud, 0.35, 1.3)
    clearness /= clearness.mean()

    tmax = hi + temp_anom + 2.0 * (clearness - 1)
    tmin = lo + temp_anom - 1.0 * (clearness - 1)
    tmin = np.minimum(tmin, tmax - 1.0)

    # two-piece cosine: min at 06:00, max at 15:00
    hours = np.arange(n_days * 24)
    temp = np.empty(hours.size)
    for d in range(n_days):
        t_lo_next = tmin[(d + 1) % n_days]
        t_hi_prev = tmax[d - 1]
        for h in range(24):
            if h < 6:
                frac = (h + 9) / 15
                val = t_hi_prev - (t_hi_prev - tmin[d]) * (1 - math.cos(math.pi * frac)) / 2
            elif h <= 15:
                frac = (h - 6) / 9
                val = tmin[d] + (tmax[d] - tmin[d]) * (1 - math.cos(math.pi * frac)) / 2
            else:
                frac = (h - 15) / 15
                val = tmax[d] - (tmax[d] - t_lo_next) * (1 - math.cos(math.pi * frac)) / 2
            temp[d * 24 + h] = val

    daily_mean = temp.reshape(n_days, 24).mean(axis=1)
    rh_day = np.clip(rh + rng.normal(0, 5, n_days) - 6 * (clearness - 1), 5, 98)
    swing = (temp.reshape(n_days, 24) - daily_mean[:, None])
    span = np.maximum(tmax - tmin, 1.0)[:, None]
    rh_hour = rh_day[:, None] * (1 - 0.9 * swing / span)
    rh_hour = np.clip(rh_hour, 3, 100).ravel()

    phi = math.radians(latitude)
    ghi = np.zeros(hours.size)
    for d in range(n_days):
        decl = math.radians(23.45 * math.sin(2 * math.pi * (284 + d + 1) / 365))
        weights = []
        for h in range(24):
            omega = math.radians(15 * (h + 0.5 - 12))
            cosz = math.sin(phi) * math.sin(decl) + math.cos(phi) * math.cos(decl) * math.cos(omega)
            weights.append(max(cosz, 0.0) ** 1.2)
        weights = np.array(weights)
        total_wh = ghi_day[d] * clearness[d] * 1000
        ghi[d * 24:(d + 1) * 24] = np.minimum(total_wh * weights / weights.sum(), 1100)

    wind = np.abs(norms["wind"] + _ar1(rng, hours.size, 0.9, 1.5))
    return temp, rh_hour, ghi, wind


def write(zone, latitude, path):
    temp, rh, ghi, wind = synthesize(zone, latitude)
    start = dt.datetime(YEAR, 1, 1)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["timestamp", "dry_bulb_c", "rh_pct", "ghi_wm2", "wind_ms"])
        for i in range(temp.size):
            stamp = (start + dt.timedelta(hours=i)).strftime("%Y-%m-%dT%H:%M")
            out.writerow([stamp, f"{temp[i]:.1f}", f"{rh[i]:.0f}", f"{ghi[i]:.0f}", f"{wind[i]:.1f}"])


def main(argv):
    root = Path(__file__).resolve().parents[1]
    out_dir = Path(argv[0]) if argv else root / "src" / "officesim" / "data" / "weather"
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(root / "src" / "officesim" / "data" / "climate_zones.csv") as fh:
        for row in csv.DictReader(fh):
            write(row["zone"], float(row["latitude"]), out_dir / row["weather_file"])
            print("wrote", row["weather_file"])


if __name__ == "__main__":
    main(sys.argv[1:])
