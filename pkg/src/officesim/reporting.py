"""EUI metrics, savings reports, stock weighting and plot-ready data files.

Savings are on an electricity basis that leaves out space heating: the small
office prototype heats with a furnace, so "total electricity" here is compressor,
HVAC fan, plug and lighting. Heating deltas are still reported per end use.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .climate import climate_zones, get_zone
from .engine import END_USES, ClimateRun, EnergyAccount, ScenarioResult
from .errors import ConfigError, StructuralError

SCHEMA_VERSION = 1
OAT_BIN_WIDTH = 2.5
MEASURE_CASES = ("adaptive", "occupancy", "purge", "combined")
_AREA_TOL = 1e-9


@dataclass(frozen=True)
class SavingsReport:
    """Baseline-minus-proposed savings; positive numbers are savings.

    Percentages are 100 x delta / baseline. A ``None`` percentage means the
    baseline quantity was zero while the proposed one was not; the name is then
    listed in ``undefined``.
    """

    climate_zone: str
    measures: str
    floor_area: float
    baseline_total_kwh_m2: float
    baseline_hvac_kwh_m2: float
    total_kwh_m2_saved: float
    hvac_kwh_m2_saved: float
    total_pct: float | None
    hvac_pct: float | None
    end_use_kwh_m2_saved: dict
    end_use_pct: dict
    unmet_hours_delta: float = 0.0
    undefined: tuple = ()
    footnote: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["undefined"] = list(self.undefined)
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "SavingsReport":
        data = dict(data)
        data["undefined"] = tuple(data.get("undefined", ()))
        return cls(**data)


def _pct(delta, base):
    if base == 0:
        return (0.0, False) if delta == 0 else (None, True)
    return 100.0 * delta / base, False


def savings(
    baseline: EnergyAccount,
    proposed: EnergyAccount,
    floor_area: float | None = None,
    *,
    climate_zone: str = "",
    measures: str = "",
    unmet_hours_delta: float = 0.0,
    footnote: str = "",
) -> SavingsReport:
    area = baseline.floor_area if floor_area is None else floor_area
    for acc in (baseline, proposed):
        if abs(acc.floor_area - area) > _AREA_TOL * max(1.0, area):
            raise StructuralError(f"floor areas differ: {acc.floor_area} vs {area}")
    if area <= 0:
        raise StructuralError("floor area must be > 0")
    undefined = []
    end_saved, end_pct = {}, {}
    for name in END_USES:
        b, p = getattr(baseline, name), getattr(proposed, name)
        end_saved[name] = (b - p) / area
        end_pct[name], bad = _pct(b - p, b)
        if bad:
            undefined.append(name)
    tb, tp = baseline.total_ex_heating, proposed.total_ex_heating
    hb, hp = baseline.hvac, proposed.hvac
    total_pct, bad = _pct(tb - tp, tb)
    if bad:
        undefined.append("total")
    hvac_pct, bad = _pct(hb - hp, hb)
    if bad:
        undefined.append("hvac")
    return SavingsReport(
        climate_zone=climate_zone,
        measures=measures,
        floor_area=area,
        baseline_total_kwh_m2=tb / area,
        baseline_hvac_kwh_m2=hb / area,
        total_kwh_m2_saved=(tb - tp) / area,
        hvac_kwh_m2_saved=(hb - hp) / area,
        total_pct=total_pct,
        hvac_pct=hvac_pct,
        end_use_kwh_m2_saved=end_saved,
        end_use_pct=end_pct,
        unmet_hours_delta=unmet_hours_delta,
        undefined=tuple(undefined),
        footnote=footnote,
    )


def result_savings(baseline: ScenarioResult, proposed: ScenarioResult, case: str | None = None) -> SavingsReport:
    zone = get_zone(baseline.climate_zone)
    note = "" if zone.in_savings_table else "not in the published savings table"
    return savings(
        baseline.account,
        proposed.account,
        climate_zone=baseline.climate_zone,
        measures=case or proposed.measures,
        unmet_hours_delta=proposed.total_unmet_hours - baseline.total_unmet_hours,
        footnote=note,
    )


@dataclass(frozen=True)
class StockWeights:
    """Small-office building counts per climate zone."""

    counts: Mapping[str, float]

    def __post_init__(self):
        if not self.counts:
            raise StructuralError("stock weights are empty")
        for zone, n in self.counts.items():
            if not n > 0:
                raise ConfigError(f"building count for {zone} must be > 0")

    @classmethod
    def from_table(cls, savings_table_only: bool = True) -> "StockWeights":
        return cls({z.zone: z.small_office_count for z in climate_zones().values()
                    if z.in_savings_table or not savings_table_only})


@dataclass(frozen=True)
class NationalAggregate:
    zones: tuple
    buildings: float
    total_kwh_m2_saved: float  # building-count weighted mean
    hvac_kwh_m2_saved: float
    total_pct: float
    hvac_pct: float
    annual_kwh_saved: float  # summed over the stock
    subset: bool

    def to_dict(self):
        d = asdict(self)
        d["zones"] = list(self.zones)
        return d


def stock_weighted_savings(
    reports: Mapping[str, SavingsReport], weights: StockWeights, subset: bool = False
) -> NationalAggregate:
    """Weighted by building count x prototype floor area.

    Without ``subset`` every weighted zone must have a report. Percentages are
    ratios of weighted sums, so uniform rescaling of the counts changes nothing.
    """
    missing = sorted(set(weights.counts) - set(reports))
    if missing and not subset:
        raise StructuralError(f"missing climate zones: {', '.join(missing)} (pass subset=True to allow)")
    zones = [z for z in weights.counts if z in reports]
    if not zones:
        raise StructuralError("no weighted climate zone has a report")
    n = np.array([weights.counts[z] for z in zones], dtype=float)
    area = np.array([reports[z].floor_area for z in zones])
    w = n * area

    def col(attr):
        return np.array([getattr(reports[z], attr) for z in zones])

    saved_t, saved_h = col("total_kwh_m2_saved"), col("hvac_kwh_m2_saved")
    base_t, base_h = col("baseline_total_kwh_m2"), col("baseline_hvac_kwh_m2")
    return NationalAggregate(
        zones=tuple(zones),
        buildings=float(n.sum()),
        total_kwh_m2_saved=float((w * saved_t).sum() / w.sum()),
        hvac_kwh_m2_saved=float((w * saved_h).sum() / w.sum()),
        total_pct=float(100.0 * (w * saved_t).sum() / (w * base_t).sum()),
        hvac_pct=float(100.0 * (w * saved_h).sum() / (w * base_h).sum()),
        annual_kwh_saved=float((w * saved_t).sum()),
        subset=bool(missing),
    )


# ---------------------------------------------------------------- plot data


def oat_bin_rows(baseline: ScenarioResult, proposed: ScenarioResult, width: float = OAT_BIN_WIDTH) -> list[dict]:
    """Mean daily HVAC savings per daily-mean-OAT bin; one row per bin with days."""
    oat = baseline.daily.mean_oat
    saved = baseline.daily.hvac_kwh - proposed.daily.hvac_kwh
    idx = np.floor(oat / width).astype(int)
    rows = []
    for k in sorted(set(idx.tolist())):
        sel = idx == k
        rows.append({
            "bin_low_c": k * width,
            "bin_high_c": (k + 1) * width,
            "n_days": int(sel.sum()),
            "baseline_hvac_kwh_per_day": float(baseline.daily.hvac_kwh[sel].mean()),
            "proposed_hvac_kwh_per_day": float(proposed.daily.hvac_kwh[sel].mean()),
            "savings_kwh_per_day": float(saved[sel].mean()),
        })
    return rows


def _write_csv(path: Path, rows: Sequence[Mapping], columns: Sequence[str]):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: _cell(row.get(c)) for c in columns})


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return value


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps(payload: Mapping) -> str:
    """Deterministic JSON text (sorted keys, shortest float repr)."""
    return json.dumps(_json_safe({"schema_version": SCHEMA_VERSION, **payload}), sort_keys=True, indent=1)


def load_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read results file {path}: {exc}") from None
    if data.get("schema_version") != SCHEMA_VERSION:
        raise StructuralError(f"{path}: unsupported schema_version {data.get('schema_version')!r}")
    return data


SAVINGS_COLUMNS = (
    "climate_zone", "measures", "baseline_total_kwh_m2", "baseline_hvac_kwh_m2", "total_kwh_m2_saved",
    "hvac_kwh_m2_saved", "total_pct", "hvac_pct", "unmet_hours_delta", "footnote",
)
END_USE_COLUMNS = ("climate_zone", "case", "end_use", "kwh", "kwh_m2")
OAT_COLUMNS = (
    "bin_low_c", "bin_high_c", "n_days", "baseline_hvac_kwh_per_day", "proposed_hvac_kwh_per_day",
    "savings_kwh_per_day",
)
BAR_COLUMNS = ("climate_zone", "case", "total_pct", "hvac_pct", "total_kwh_m2_saved", "hvac_kwh_m2_saved", "footnote")
SEASON_COLUMNS = ("climate_zone", "case", "months", "cooling_season_hvac_kwh_m2", "savings_pct")


@dataclass
class SweepReport:
    """Reports for every (climate, case) plus the national aggregate of the combined case."""

    runs: dict
    reports: dict = field(default_factory=dict)  # (key, case) -> SavingsReport
    national: dict = field(default_factory=dict)  # case -> NationalAggregate
    errors: dict = field(default_factory=dict)


def build_reports(runs: Mapping[str, ClimateRun], weights: StockWeights | None = None) -> SweepReport:
    out = SweepReport(dict(runs))
    for key, run in runs.items():
        if run.error:
            out.errors[key] = run.error
            continue
        for case, result in run.proposed.items():
            out.reports[(key, case)] = result_savings(run.baseline, result, case)
    weights = weights or StockWeights.from_table()
    cases = sorted({case for _, case in out.reports})
    for case in cases:
        by_zone = {out.runs[k].climate_zone: r for (k, c), r in out.reports.items() if c == case}
        if any(z in weights.counts for z in by_zone):
            out.national[case] = stock_weighted_savings(by_zone, weights, subset=True)
    return out


def emit(sweep: SweepReport, out_dir, formats: Sequence[str] = ("json", "csv")) -> list[Path]:
    """Write JSON/CSV reports and plot-data files; returns the paths written."""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc.strerror}") from None
    written = []
    reports = sweep.reports
    try:
        if "json" in formats:
            payload = {
                "runs": {k: r.to_dict() for k, r in sweep.runs.items()},
                "reports": [dict(key=k, case=c, **r.to_dict()) for (k, c), r in reports.items()],
                "national": {c: a.to_dict() for c, a in sweep.national.items()},
                "errors": dict(sweep.errors),
            }
            path = out_dir / "results.json"
            path.write_text(dumps(payload))
            written.append(path)
        if "csv" in formats:
            written += _emit_csv(sweep, out_dir)
    except OSError as exc:
        raise ConfigError(f"cannot write to {out_dir}: {exc.strerror}") from None
    return written


def _emit_csv(sweep: SweepReport, out_dir: Path) -> list[Path]:
    written = []
    rows = [r.to_dict() for r in sweep.reports.values()]
    path = out_dir / "savings.csv"
    _write_csv(path, rows, SAVINGS_COLUMNS)
    written.append(path)

    eu_rows = []
    for key, run in sweep.runs.items():
        if run.baseline is None:
            continue
        for case, res in {"baseline": run.baseline, **run.proposed}.items():
            acc = res.account
            for name, kwh in acc.end_uses().items():
                eu_rows.append(dict(climate_zone=run.climate_zone, case=case, end_use=name, kwh=kwh,
                                    kwh_m2=kwh / acc.floor_area))
    path = out_dir / "end_uses.csv"
    _write_csv(path, eu_rows, END_USE_COLUMNS)
    written.append(path)

    if sweep.national:
        path = out_dir / "national.csv"
        cols = ("case", "buildings", "total_kwh_m2_saved", "hvac_kwh_m2_saved", "total_pct", "hvac_pct",
                "annual_kwh_saved", "subset", "zones")
        _write_csv(path, [dict(case=c, **{**a.to_dict(), "zones": " ".join(a.zones)})
                          for c, a in sweep.national.items()], cols)
        written.append(path)
    written += emit_plot_data(sweep, out_dir)
    return written


def emit_plot_data(sweep: SweepReport, out_dir) -> list[Path]:
    """Plot-ready CSVs: OAT-binned daily savings, per-measure bars, per-climate bars, cooling season."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    by_case: dict[str, list] = {}
    for (key, case), rep in sweep.reports.items():
        by_case.setdefault(case, []).append(dict(rep.to_dict(), case=case))
    for key, run in sweep.runs.items():
        if run.baseline is None:
            continue
        zone = run.climate_zone
        for case, res in run.proposed.items():
            path = out_dir / f"oat_bins_{key}_{case}.csv"
            _write_csv(path, oat_bin_rows(run.baseline, res), OAT_COLUMNS)
            written.append(path)
        bars = [dict(sweep.reports[(key, c)].to_dict(), case=c) for c in MEASURE_CASES if (key, c) in sweep.reports]
        bars += [dict(sweep.reports[(key, c)].to_dict(), case=c) for c in run.proposed
                 if c not in MEASURE_CASES]
        path = out_dir / f"measure_bars_{key}.csv"
        _write_csv(path, bars, BAR_COLUMNS)
        written.append(path)
        lo, hi = run.baseline.cooling_season
        base_cs = run.baseline.cooling_season_hvac_kwh()
        season = [dict(climate_zone=zone, case="baseline", months=f"{lo}-{hi}",
                       cooling_season_hvac_kwh_m2=base_cs / run.baseline.account.floor_area, savings_pct=0.0)]
        for case, res in run.proposed.items():
            cs = res.cooling_season_hvac_kwh()
            season.append(dict(climate_zone=zone, case=case, months=f"{lo}-{hi}",
                               cooling_season_hvac_kwh_m2=cs / res.account.floor_area,
                               savings_pct=100.0 * (base_cs - cs) / base_cs if base_cs else None))
        path = out_dir / f"cooling_season_{key}.csv"
        _write_csv(path, season, SEASON_COLUMNS)
        written.append(path)
    for case, rows in sorted(by_case.items()):
        path = out_dir / f"climate_bars_{case}.csv"
        _write_csv(path, sorted(rows, key=lambda r: r["climate_zone"]), BAR_COLUMNS)
        written.append(path)
    return written


def sweep_from_json(data: Mapping) -> SweepReport:
    runs = {k: ClimateRun.from_dict(v) for k, v in data["runs"].items()}
    out = SweepReport(runs)
    for row in data["reports"]:
        row = dict(row)
        key, case = row.pop("key"), row.pop("case")
        out.reports[(key, case)] = SavingsReport.from_dict(row)
    for case, agg in data.get("national", {}).items():
        agg = dict(agg)
        agg["zones"] = tuple(agg["zones"])
        out.national[case] = NationalAggregate(**agg)
    out.errors = dict(data.get("errors", {}))
    return out
