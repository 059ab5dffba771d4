"""
Command-line entry point for the clone-detection simulator.

    clonesim run      --scenario FILE --out DIR [--trials N] [--seed S] [--jobs K]
    clonesim sweep    --scenario FILE --vary KEY=v1,v2,... --out DIR [--jobs K]
    clonesim validate --scenario FILE

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""
import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from core import METRIC_COLUMNS, ExperimentEngine, ExperimentError, ExperimentResult, Scenario, ScenarioError, load_scenario
from instrumentation import ResultStore

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

logger = logging.getLogger("clonesim")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="clonesim", description="Node clone detection simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    run = sub.add_parser("run", help="Run all trials of one scenario")
    run.add_argument("--scenario", required=True, help="Scenario file (key=value lines)")
    run.add_argument("--out", default=None, help="Output directory (default: $CLONESIM_OUT_DIR or results)")
    run.add_argument("--trials", type=int, default=None, help="Override the scenario's trial count")
    run.add_argument("--seed", type=int, default=None, help="Override the scenario's base_seed")
    run.add_argument("--jobs", type=int, default=None, help="Worker processes (default: $CLONESIM_JOBS or 1)")

    sweep = sub.add_parser("sweep", help="Run a scenario once per value of one key")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--vary", required=True, help="KEY=v1,v2,...")
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--jobs", type=int, default=None)

    validate = sub.add_parser("validate", help="Parse and check a scenario without running it")
    validate.add_argument("--scenario", required=True)
    return parser


def _jobs(value: Optional[int]) -> int:
    if value is not None:
        return value
    try:
        return int(os.getenv("CLONESIM_JOBS", "1"))
    except ValueError:
        raise ScenarioError(f"CLONESIM_JOBS must be an integer, got {os.getenv('CLONESIM_JOBS')!r}")


def _out_dir(value: Optional[str]) -> str:
    return value or os.getenv("CLONESIM_OUT_DIR", "results")


def _parse_vary(text: str):
    key, sep, values = text.partition("=")
    key = key.strip()
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not sep or not key or not items:
        raise ScenarioError(f"--vary expects KEY=v1,v2,..., got {text!r}")
    return key, items


def _print_summary(results: List[ExperimentResult]):
    print("\n" + "=" * 72)
    print(f"{'scenario':<22}{'msgs/node':>12}{'cache':>10}{'witnesses':>11}{'detected':>10}{'reach':>8}")
    print("-" * 72)
    for result in results:
        stats = result.report.stats
        print(
            f"{result.scenario_id:<22}"
            f"{stats['messages_per_node'].mean:>12.3f}"
            f"{stats['cache_mean'].mean:>10.3f}"
            f"{stats['witnesses'].mean:>11.3f}"
            f"{stats['detected'].mean:>10.3f}"
            f"{stats['reach_h'].mean:>8.1f}"
        )
        for name, err in result.report.relative_errors.items():
            predicted = result.report.predictions[name]
            print(f"    {name:<24} predicted {predicted:>10.3f}   relative error {err:>7.3f}")
    print("=" * 72)


def _store(out_dir: str, scenario: Scenario, results: List[ExperimentResult], x_key: Optional[str] = None) -> Path:
    store = ResultStore(out_dir)
    rows = [trial.row() for result in results for trial in result.trials]
    store.write_metrics(METRIC_COLUMNS, rows)
    store.write_summary([result.report.summary_row() for result in results])
    points = []
    for result in results:
        x = getattr(result.scenario, x_key) if x_key else result.scenario.n
        if hasattr(x, "name"):
            x = x.name
        for name, stat in result.report.stats.items():
            points.append((x, stat.mean, name))
    store.write_curves(points)
    traces = [
        {"scenario_id": result.scenario_id, "trial": trial.trial, **trace}
        for result in results for trial in result.trials for trace in trial.traces
    ]
    if traces:
        store.write_traces(traces)
    extra = {"sweep": x_key} if x_key else None
    store.write_config(scenario.to_lines(), extra)
    return store.out_dir


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.trials is not None:
        scenario = replace(scenario, trials=args.trials)
    if args.seed is not None:
        scenario = replace(scenario, base_seed=args.seed)
    scenario.validate()
    engine = ExperimentEngine(jobs=_jobs(args.jobs))
    result = engine.run_experiment(scenario, Path(args.scenario).stem)
    out = _store(_out_dir(args.out), scenario, [result])
    _print_summary([result])
    print(f"Results written to {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    key, values = _parse_vary(args.vary)
    engine = ExperimentEngine(jobs=_jobs(args.jobs))
    results = engine.sweep(scenario, key, values)
    out = _store(_out_dir(args.out), scenario, results, x_key=key)
    _print_summary(results)
    print(f"Results written to {out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    print(f"{args.scenario}: OK")
    for line in scenario.to_lines():
        print(f"  {line}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    try:
        logging.basicConfig(
            level=os.getenv("CLONESIM_LOG_LEVEL", "WARNING").upper(),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("run failed")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
