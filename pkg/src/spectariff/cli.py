"""Command-line interface: decompose curves, settle scenarios, dump plot data.

Commands
--------
``spectariff decompose``
    Fourier-decompose one curve (from a scenario id or a meter CSV) into a
    ``n,a_n,b_n`` spectrum file.
``spectariff settle``
    Settle a scenario file and write bills, incomes, the equivalent price
    schedule (when one exists) and ``audit.txt`` into an output directory;
    ``--figures`` additionally renders PNG charts next to the data files.
``spectariff plot-data``
    Sample a declared curve onto a uniform grid as ``t,p`` rows, optionally
    rendering a PNG alongside.

All data goes to files; stderr carries diagnostics only. Outputs are
byte-deterministic for a given input. Exit codes: 0 success, 2 unreadable
or malformed input, 3 aliasing bound violated, 4 bus imbalance, 5 audit
failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .curve import read_meter_csv
from .errors import (
    AliasingBoundError,
    AllocationError,
    BusImbalanceError,
    ScenarioFormatError,
    SpectariffError,
    ZeroEnergyBusError,
)
from .report import write_curve_csv, write_settlement
from .scenario import find_curve, load_scenario
from .settlement import run_scenario
from .spectrum import decompose, write_spectrum_csv

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_ALIASING = 3
EXIT_IMBALANCE = 4
EXIT_AUDIT = 5


def _err(message: str) -> None:
    print(f"spectariff: {message}", file=sys.stderr)


def _load_scenario_with_order(path: str, order: "int | None"):
    scenario = load_scenario(path)
    if order is not None:
        scenario = replace(scenario, order=order)
    return scenario


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_decompose(args: argparse.Namespace) -> int:
    if (args.scenario is None) == (args.meter is None):
        _err("decompose needs exactly one of --scenario/--id or --meter")
        return EXIT_PARSE
    if args.scenario is not None:
        if args.id is None:
            _err("--scenario needs --id to select a curve")
            return EXIT_PARSE
        scenario = _load_scenario_with_order(args.scenario, args.order)
        curve = find_curve(scenario, args.id)
        order = scenario.order
    else:
        curve = read_meter_csv(args.meter)
        order = args.order if args.order is not None else 128
    spectrum = decompose(curve, order)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(spectrum, out)
    _err(f"wrote {out}")
    return EXIT_OK


def _cmd_settle(args: argparse.Namespace) -> int:
    scenario = _load_scenario_with_order(args.scenario, args.order)
    result = run_scenario(scenario)
    paths = write_settlement(result, args.out, args.format)
    if args.figures:
        paths.extend(_render_figures(scenario, result, Path(args.out)))
    _err(f"wrote {len(paths)} files to {args.out}")
    if not result.audit.passed:
        _err("audit FAILED; see audit.txt")
        return EXIT_AUDIT
    return EXIT_OK


def _render_figures(scenario, result, out_dir: Path) -> list[Path]:
    from . import figures

    curves = {s.id: s.curve for s in scenario.subscribers}
    curves.update({s.id: s.curve for s in scenario.sources if s.curve is not None})
    spectra = {name: decompose(c, scenario.order) for name, c in curves.items()}
    plans = {s.plan.name: s.plan for s in scenario.sources}
    f0 = scenario.interval.fundamental
    top = max((line.n for s in spectra.values() for line in s.lines), default=1)
    written = [
        figures.save_curves_figure(curves, out_dir / "curves.png"),
        figures.save_spectra_figure(spectra, out_dir / "spectra.png"),
        figures.save_plans_figure(plans, 1.2 * top * f0, out_dir / "plans.png"),
        figures.save_bills_figure(result.bills, out_dir / "bills.png"),
    ]
    return written


def _cmd_plot_data(args: argparse.Namespace) -> int:
    if args.samples < 2:
        _err(f"--samples must be at least 2, got {args.samples}")
        return EXIT_PARSE
    scenario = load_scenario(args.scenario)
    curve = find_curve(scenario, args.id)
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    write_curve_csv(curve, args.samples, out)
    written = [out]
    if args.figure is not None:
        from . import figures

        written.append(
            figures.save_curves_figure({args.id: curve}, Path(args.figure), args.samples)
        )
    _err(f"wrote {', '.join(str(p) for p in written)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectariff",
        description="Price electricity by the harmonic content of load curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dec = sub.add_parser("decompose", help="Fourier-decompose one curve to a spectrum CSV")
    p_dec.add_argument("--scenario", help="scenario file declaring the curve")
    p_dec.add_argument("--id", help="curve id inside the scenario")
    p_dec.add_argument("--meter", help="meter CSV (t,p rows) to decompose instead")
    p_dec.add_argument("--order", type=int, help="truncation order (default: scenario's, or 128)")
    p_dec.add_argument("--out", required=True, help="output spectrum CSV path")
    p_dec.set_defaults(handler=_cmd_decompose)

    p_set = sub.add_parser("settle", help="settle a scenario into bills, incomes and an audit")
    p_set.add_argument("--scenario", required=True, help="scenario file to settle")
    p_set.add_argument("--out", required=True, help="output directory")
    p_set.add_argument("--order", type=int, help="override the scenario's truncation order")
    p_set.add_argument("--format", choices=("csv", "table"), default="csv", help="bill file format")
    p_set.add_argument(
        "--figures", action="store_true", help="render PNG charts alongside the data files"
    )
    p_set.set_defaults(handler=_cmd_settle)

    p_plot = sub.add_parser("plot-data", help="sample a curve to t,p rows for plotting")
    p_plot.add_argument("--scenario", required=True, help="scenario file declaring the curve")
    p_plot.add_argument("--id", required=True, help="curve id inside the scenario")
    p_plot.add_argument("--samples", type=int, default=512, help="grid points (default 512)")
    p_plot.add_argument("--out", required=True, help="output CSV path")
    p_plot.add_argument("--figure", help="also render the curve to this PNG path")
    p_plot.set_defaults(handler=_cmd_plot_data)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except AliasingBoundError as exc:
        _err(str(exc))
        return EXIT_ALIASING
    except (BusImbalanceError, ZeroEnergyBusError, AllocationError) as exc:
        _err(str(exc))
        return EXIT_IMBALANCE
    except ScenarioFormatError as exc:
        _err(str(exc))
        return EXIT_PARSE
    except SpectariffError as exc:
        # remaining domain errors are configuration problems
        _err(str(exc))
        return EXIT_PARSE
    except (OSError, ValueError) as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
