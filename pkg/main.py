"""
idsbench command line.

    idsbench run --scenario <id> --data <path> [--seed N] [--test-fraction F] [--k N] [--out DIR] [--dry-run]
    idsbench inspect-data --data <path> --scenario <id> [--expect-paper-counts]
    idsbench plot --in DIR
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from idsbench import __version__
from idsbench.bench.config import resolve_config
from idsbench.bench.pipeline import run_scenario
from idsbench.bench.report import load_results, render_plots
from idsbench.errors import ExpectationFailure, IdsBenchError, InvalidConfig
from idsbench.ingest.csv_loader import DatasetSummary, load_csv, summarize
from idsbench.ingest.schema import SCENARIO_IDS, ScenarioSchema, load_scenario_schema
from idsbench.metrics.roc_export import read_roc_csv

logger = logging.getLogger("idsbench")


def configure_logging(level: str = "INFO") -> None:
    # Configure root logger
    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.setLevel(level)
    formatter = logging.Formatter(
        '%(asctime)s | %(levelname)-8s | %(name)s:%(funcName)s:%(lineno)d - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(formatter)

    # Remove any existing handlers and add our console handler
    root_logger.handlers = []
    root_logger.addHandler(console_handler)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="idsbench", description="Intrusion detection classifier benchmark")
    parser.add_argument("--version", action="version", version=f"idsbench {__version__}")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a scenario end to end")
    run.add_argument("--scenario", choices=SCENARIO_IDS)
    run.add_argument("--data", type=Path)
    run.add_argument("--config", type=Path, help="JSON config file; flags override its values")
    run.add_argument("--schema", type=Path, dest="schema_file", help="Schema document replacing the shipped one")
    run.add_argument("--seed", type=int)
    run.add_argument("--test-fraction", type=float, dest="test_fraction")
    run.add_argument("--k", type=int)
    run.add_argument("--out", type=Path)
    run.add_argument("--workers", type=int)
    run.add_argument("--dry-run", action="store_true", dest="dry_run")

    inspect = sub.add_parser("inspect-data", help="Summarize a dataset file")
    inspect.add_argument("--data", type=Path, required=True)
    inspect.add_argument("--scenario", choices=SCENARIO_IDS, required=True)
    inspect.add_argument("--schema", type=Path, dest="schema_file")
    inspect.add_argument("--expect-paper-counts", action="store_true", dest="expect_counts")

    plot = sub.add_parser("plot", help="Re-render ROC plots from stored ROC CSV files")
    plot.add_argument("--in", type=Path, dest="in_dir", required=True)
    return parser


def count_differences(schema: ScenarioSchema, summary: DatasetSummary) -> Dict[str, Dict[str, int]]:
    """Expected-vs-observed for every count the schema declares."""
    if schema.expected is None:
        raise InvalidConfig(f"Schema {schema.name!r} declares no expected counts")
    observed = {
        "n_rows": summary.n_rows,
        "count_y0": summary.count_y0,
        "count_y1": summary.count_y1,
        "n_features": summary.n_features,
        "balanced": summary.balanced,
    }
    diffs = {}
    for key, expected in schema.expected.model_dump().items():
        if expected is not None and observed[key] != expected:
            diffs[key] = {"expected": expected, "observed": observed[key]}
    return diffs


def cmd_run(args: argparse.Namespace) -> int:
    flags = {
        "scenario": args.scenario,
        "data": args.data,
        "schema_file": args.schema_file,
        "seed": args.seed,
        "test_fraction": args.test_fraction,
        "k": args.k,
        "out": args.out,
        "workers": args.workers,
    }
    config = resolve_config(flags, args.config)
    table, manifest = run_scenario(config, dry_run=args.dry_run)
    if table is None:
        print(f"Dry run: manifest written to {Path(config.out) / 'manifest.json'}")
    else:
        print(table.render(), end="")
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    schema = ScenarioSchema.from_file(args.schema_file) if args.schema_file else load_scenario_schema(args.scenario)
    summary = summarize(load_csv(args.data, schema))
    print(summary.as_table_row(schema.name or args.scenario))
    missing = {k: v for k, v in summary.missing_counts.items() if v}
    print(f"missing cells: {missing if missing else 'none'}")
    if args.expect_counts:
        diffs = count_differences(schema, summary)
        if diffs:
            for key, d in diffs.items():
                print(f"count mismatch {key}: expected {d['expected']}, observed {d['observed']}")
            raise ExpectationFailure(diffs)
        print("counts match the expected values")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    table = load_results(args.in_dir / "results.json")
    curves = {}
    for row in table.rows:
        path = args.in_dir / f"roc_{row.model_id.lower()}.csv"
        if path.exists():
            curves[row.model_id] = read_roc_csv(path)
    render_plots(table, curves, args.in_dir)
    print(f"Rendered {len(curves)} curves into {args.in_dir}")
    return 0


COMMANDS = {"run": cmd_run, "inspect-data": cmd_inspect, "plot": cmd_plot}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except IdsBenchError as e:
        logger.error(str(e))
        logger.debug("Traceback", exc_info=True)
        return e.exit_code
    except OSError as e:
        logger.error(str(e))
        logger.debug("Traceback", exc_info=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
