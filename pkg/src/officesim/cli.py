"""Command-line entry point.

Exit codes: 0 success, 1 bad input (config, parse, structure, I/O), 2 numeric or
simulation failure. Flags override config-file values, which override defaults.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .climate import all_zone_ids, savings_table_zone_ids
from .config import ScenarioConfig, apply_overrides, load_config, schema_text, with_measures
from .engine import ClimateRun, SweepTask, run_pair, run_scenario, run_sweep
from .errors import ConfigError, DomainError, NumericError
from .measures import PRESETS
from .reporting import SweepReport, build_reports, dumps, emit, emit_plot_data, load_json, sweep_from_json

log = logging.getLogger("officesim")

CASE_PRESETS = {"adaptive": "adaptive", "occupancy": "occupancy", "purge": "purge", "combined": "all"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _common(p, measures=True):
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--seed", type=int, help="random seed for stochastic occupancy")
    p.add_argument("--dt", type=int, help="timestep in seconds (must divide 600)")
    if measures:
        p.add_argument("--measures", choices=PRESETS, help="measure preset")
        p.add_argument("--variant", choices=("a55", "a90"), help="adaptive comfort variant")


def build_parser() -> argparse.ArgumentParser:
    epilog = (
        "precedence: command-line flags > config file > built-in defaults\n"
        "exit codes: 0 ok, 1 input/config error, 2 numeric/simulation error\n\n"
        "config file schema (INI sections and keys):\n" + schema_text()
    )
    parser = _Parser(
        prog="officesim",
        description="Annual small-office energy simulation with smart-control measures.",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one scenario for a year")
    p.add_argument("config", type=Path)
    _common(p)

    p = sub.add_parser("compare", help="baseline vs proposed on shared equipment")
    p.add_argument("baseline", type=Path)
    p.add_argument("proposed", type=Path)
    _common(p)

    p = sub.add_parser("sweep", help="baseline and measure cases across climates")
    p.add_argument("config_dir", type=Path, nargs="?", help="directory of baseline .cfg/.ini files")
    p.add_argument("--all-climates", action="store_true", help="every bundled climate zone")
    p.add_argument("--table-zones-only", action="store_true", help="with --all-climates, skip zone 7")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)

    p = sub.add_parser("emit-plots", help="write plot-data CSVs from a results directory")
    p.add_argument("results_dir", type=Path)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("validate", help="check a config file without simulating")
    p.add_argument("config", type=Path)
    _common(p)
    return parser


def _load(path, args, allow_measures=True) -> ScenarioConfig:
    cfg = load_config(path)
    return apply_overrides(
        cfg,
        measures=args.measures if allow_measures else None,
        variant=args.variant if allow_measures else None,
        seed=args.seed,
        dt=args.dt,
    )


def _fmt(x, digits=2):
    return "n/a" if x is None else f"{x:.{digits}f}"


def _summary(result) -> str:
    acc = result.account
    a = acc.floor_area
    parts = [f"{name} {acc.eui(name):.2f}" for name in acc.end_uses()]
    return (f"{result.label}: electricity EUI {acc.eui():.2f} kWh/m2 (excl. heating); "
            + ", ".join(parts) + f"; unmet {result.total_unmet_hours:.1f} h; floor {a:.1f} m2")


def cmd_simulate(args) -> int:
    cfg = _load(args.config, args)
    result = run_scenario(cfg)
    print(_summary(result))
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "result.json").write_text(dumps({"result": result.to_dict()}))
        print(f"wrote {args.out / 'result.json'}")
    return 0


def _single_run_report(base, prop, case) -> SweepReport:
    run = ClimateRun(base.climate_zone, baseline=base, proposed={case: prop})
    return build_reports({base.climate_zone: run})


def cmd_compare(args) -> int:
    base = _load(args.baseline, args, allow_measures=False)
    prop = _load(args.proposed, args)
    b, p = run_pair(base, prop)
    rep = _single_run_report(b, p, p.measures)
    r = next(iter(rep.reports.values()))
    print(_summary(b))
    print(_summary(p))
    print(f"savings: total {r.total_kwh_m2_saved:.2f} kWh/m2 ({_fmt(r.total_pct)}%), "
          f"HVAC {r.hvac_kwh_m2_saved:.2f} kWh/m2 ({_fmt(r.hvac_pct)}%)")
    if args.out:
        for path in emit(rep, args.out):
            log.info("wrote %s", path)
        print(f"wrote reports to {args.out}")
    return 0


def _sweep_tasks(args) -> list[SweepTask]:
    if bool(args.all_climates) == bool(args.config_dir):
        raise ConfigError("sweep needs exactly one of a config directory or --all-climates")
    if args.all_climates:
        zones = savings_table_zone_ids() if args.table_zones_only else all_zone_ids()
        bases = [(z, ScenarioConfig(climate_zone=z)) for z in zones]
        bases = [(k, apply_overrides(c, seed=args.seed, dt=args.dt)) for k, c in bases]
    else:
        if not args.config_dir.is_dir():
            raise ConfigError(f"not a directory: {args.config_dir}")
        files = sorted(p for p in args.config_dir.iterdir() if p.suffix in (".cfg", ".ini"))
        if not files:
            raise ConfigError(f"no .cfg or .ini files in {args.config_dir}")
        bases = [(p.stem, _load(p, args, allow_measures=False)) for p in files]
    name = args.measures or "all"
    cases = dict(CASE_PRESETS) if name == "all" else {name: name}
    tasks = []
    for key, cfg in bases:
        if args.variant:
            cfg = replace(cfg, measures=replace(cfg.measures, variant=args.variant))
        baseline = with_measures(cfg, "none")
        proposed = tuple((case, with_measures(cfg, p)) for case, p in cases.items())
        tasks.append(SweepTask(key, baseline, proposed))
    return tasks


def cmd_sweep(args) -> int:
    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    tasks = _sweep_tasks(args)
    runs = run_sweep(tasks, jobs=args.jobs)
    rep = build_reports(runs)
    for (key, case), r in sorted(rep.reports.items()):
        note = f"  [{r.footnote}]" if r.footnote else ""
        print(f"{key:>4} {case:<10} total {_fmt(r.total_pct)}%  HVAC {_fmt(r.hvac_pct)}%  "
              f"({r.total_kwh_m2_saved:.2f} kWh/m2){note}")
    for case, agg in sorted(rep.national.items()):
        print(f"national {case:<10} total {agg.total_pct:.2f}%  HVAC {agg.hvac_pct:.2f}%  "
              f"{agg.total_kwh_m2_saved:.2f} kWh/m2 over {agg.buildings:.0f} buildings")
    for key, err in rep.errors.items():
        print(f"error in {key}: {err}", file=sys.stderr)
    if args.out:
        emit(rep, args.out)
        print(f"wrote reports to {args.out}")
    if rep.errors and not rep.reports:
        return 2 if all(e.startswith("NumericError") for e in rep.errors.values()) else 1
    return 0


def cmd_emit_plots(args) -> int:
    data = load_json(args.results_dir / "results.json")
    rep = sweep_from_json(data)
    out = args.out or args.results_dir / "plots"
    paths = emit_plot_data(rep, out)
    print(f"wrote {len(paths)} plot-data files to {out}")
    return 0


def cmd_validate(args) -> int:
    cfg = _load(args.config, args)
    print(f"ok: {cfg.label} (climate {cfg.climate_zone}, dt {cfg.dt} s, occupancy {cfg.occupancy})")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "emit-plots": cmd_emit_plots,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
