from fractions import Fraction

import numpy as np
import pytest

from officesim.engine import ClimateRun, EnergyAccount
from officesim.errors import StructuralError
from officesim.reporting import (
    MEASURE_CASES,
    SavingsReport,
    StockWeights,
    build_reports,
    dumps,
    emit,
    load_json,
    oat_bin_rows,
    savings,
    stock_weighted_savings,
    sweep_from_json,
)

AREA = 511.0


def account(hvac_split=(20.0, 13.3), plug=40.0, lighting=63.4, heating=5.0, area=AREA):
    comp, fan = hvac_split
    return EnergyAccount(comp * area, fan * area, heating * area, plug * area, lighting * area, np.zeros(0), area)


def test_identical_accounts_give_zero_report():
    r = savings(account(), account())
    assert r.total_kwh_m2_saved == 0.0 and r.hvac_kwh_m2_saved == 0.0
    assert r.total_pct == 0.0 and r.hvac_pct == 0.0
    assert all(v == 0.0 for v in r.end_use_kwh_m2_saved.values())


def test_hvac_row_for_4a():
    base = account((20.0, 13.3))   # 33.3 kWh/m2 HVAC
    prop = account((12.0, 11.3))   # 23.3 kWh/m2 HVAC
    r = savings(base, prop)
    assert r.hvac_kwh_m2_saved == pytest.approx(10.0, abs=1e-9)
    assert r.hvac_pct == pytest.approx(30.03, abs=0.01)
    assert round(r.hvac_pct) == 30


def test_total_row_for_4a():
    # 136.7 -> 120.3 kWh/m2 of total electricity; the change sits in plug load
    base = account((20.0, 13.3), plug=40.0, lighting=63.4)
    prop = account((20.0, 13.3), plug=23.6, lighting=63.4)
    r = savings(base, prop)
    assert r.baseline_total_kwh_m2 == pytest.approx(136.7)
    assert r.total_kwh_m2_saved == pytest.approx(16.4)
    assert round(r.total_pct) == 12


def test_savings_is_antisymmetric():
    a = account((20.0, 13.3), plug=40.0)
    b = account((15.0, 10.0), plug=30.0, heating=7.0)
    ab, ba = savings(a, b), savings(b, a)
    assert ab.total_kwh_m2_saved == pytest.approx(-ba.total_kwh_m2_saved, abs=1e-12)
    assert ab.hvac_kwh_m2_saved == pytest.approx(-ba.hvac_kwh_m2_saved, abs=1e-12)
    for k in ab.end_use_kwh_m2_saved:
        assert ab.end_use_kwh_m2_saved[k] == pytest.approx(-ba.end_use_kwh_m2_saved[k], abs=1e-12)


def test_zero_baseline_end_use_is_flagged():
    r = savings(account(heating=0.0), account(heating=2.0))
    assert r.end_use_pct["heating"] is None
    assert "heating" in r.undefined
    assert r.total_pct is not None


def test_floor_area_mismatch():
    with pytest.raises(StructuralError):
        savings(account(), account(area=500.0))


def _report(zone, saved, pct_total, hvac_saved=1.0, pct_hvac=10.0):
    return SavingsReport(
        climate_zone=zone, measures="combined", floor_area=AREA,
        baseline_total_kwh_m2=100.0 * saved / pct_total, baseline_hvac_kwh_m2=100.0 * hvac_saved / pct_hvac,
        total_kwh_m2_saved=saved, hvac_kwh_m2_saved=hvac_saved, total_pct=pct_total, hvac_pct=pct_hvac,
        end_use_kwh_m2_saved={}, end_use_pct={},
    )


# combined-measure savings per zone and small-office counts, as published
TABLE = {
    "1A": (29.5, 21.4, 19, 33, 28000), "2A": (26.6, 18.6, 18, 32, 354930), "2B": (30.4, 22.6, 20, 39, 96470),
    "3A": (22.3, 15.0, 16, 36, 321170), "3B": (25.1, 17.6, 18, 37, 158390), "3C": (18.3, 10.5, 15, 30, 25930),
    "4A": (16.4, 10.0, 12, 30, 312150), "4B": (21.1, 13.9, 16, 35, 15790), "4C": (12.4, 6.6, 10, 25, 40880),
    "5A": (14.3, 7.7, 11, 29, 306880), "5B": (16.9, 10.2, 13, 30, 107340), "6A": (12.2, 6.5, 9, 23, 80460),
    "6B": (13.4, 7.2, 10, 26, 10080),
}


def test_bundled_counts_match_published_table():
    w = StockWeights.from_table()
    assert {z: int(n) for z, n in w.counts.items()} == {z: row[4] for z, row in TABLE.items()}


def test_national_mean_against_spreadsheet_oracle():
    reports = {z: _report(z, r[0], r[2], r[1], r[3]) for z, r in TABLE.items()}
    agg = stock_weighted_savings(reports, StockWeights.from_table())
    # exact rational arithmetic: sum(n * s) / sum(n), same floor area everywhere
    num = sum(Fraction(str(r[0])) * r[4] for r in TABLE.values())
    den = sum(r[4] for r in TABLE.values())
    assert agg.total_kwh_m2_saved == pytest.approx(float(num / den), rel=1e-12)
    num_h = sum(Fraction(str(r[1])) * r[4] for r in TABLE.values())
    assert agg.hvac_kwh_m2_saved == pytest.approx(float(num_h / den), rel=1e-12)
    assert agg.buildings == den == 1858470
    assert not agg.subset


def test_weighting_invariances():
    one = _report("4A", 16.4, 12.0)
    same = {z: _report(z, 16.4, 12.0) for z in TABLE}
    w = StockWeights.from_table()
    agg = stock_weighted_savings(same, w)
    assert agg.total_kwh_m2_saved == pytest.approx(16.4)
    assert agg.total_pct == pytest.approx(12.0)
    reports = {z: _report(z, r[0], r[2], r[1], r[3]) for z, r in TABLE.items()}
    scaled = StockWeights({z: 7.5 * n for z, n in w.counts.items()})
    a, b = stock_weighted_savings(reports, w), stock_weighted_savings(reports, scaled)
    assert a.total_pct == pytest.approx(b.total_pct, rel=1e-12)
    assert a.hvac_pct == pytest.approx(b.hvac_pct, rel=1e-12)
    single = stock_weighted_savings({"4A": one}, w, subset=True)
    assert single.total_kwh_m2_saved == pytest.approx(16.4)
    assert single.total_pct == pytest.approx(12.0)
    assert single.subset


def test_missing_zone_needs_subset_flag():
    with pytest.raises(StructuralError):
        stock_weighted_savings({"4A": _report("4A", 16.4, 12.0)}, StockWeights.from_table())


@pytest.fixture(scope="module")
def sweep(runs_4a):
    run = ClimateRun("4A", baseline=runs_4a["baseline"], proposed={
        "adaptive": runs_4a["a55"], "occupancy": runs_4a["occupancy"],
        "purge": runs_4a["purge"], "combined": runs_4a["combined"],
    })
    return build_reports({"4A": run})


def test_json_round_trip(sweep, tmp_path):
    emit(sweep, tmp_path)
    data = load_json(tmp_path / "results.json")
    again = sweep_from_json(data)
    assert again.reports == sweep.reports
    assert again.national == sweep.national
    assert dumps({"runs": {k: r.to_dict() for k, r in again.runs.items()}}) == \
        dumps({"runs": {k: r.to_dict() for k, r in sweep.runs.items()}})


def test_oat_bins_one_row_per_bin_present(runs_4a):
    base = runs_4a["baseline"]
    rows = oat_bin_rows(base, runs_4a["purge"])
    bins = {int(np.floor(t / 2.5)) for t in base.daily.mean_oat}
    assert len(rows) == len(bins)
    assert sum(r["n_days"] for r in rows) == 365
    assert all(r["bin_high_c"] - r["bin_low_c"] == 2.5 for r in rows)


def test_measure_bar_file_has_four_cases(sweep, tmp_path):
    emit(sweep, tmp_path)
    lines = (tmp_path / "measure_bars_4A.csv").read_text().splitlines()
    cases = [ln.split(",")[1] for ln in lines[1:]]
    assert cases == list(MEASURE_CASES)
    assert (tmp_path / "climate_bars_combined.csv").exists()
    assert (tmp_path / "oat_bins_4A_purge.csv").exists()
    assert (tmp_path / "cooling_season_4A.csv").exists()


def test_schema_version_is_checked(tmp_path):
    path = tmp_path / "results.json"
    path.write_text('{"schema_version": 99}')
    with pytest.raises(StructuralError):
        load_json(path)
