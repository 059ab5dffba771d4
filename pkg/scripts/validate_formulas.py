"""
Formula validation for the DHT protocol.
Runs the forced-m grid and compares measured cache size and witness count
with the ideal-case and general closed forms.
"""
import sys
import argparse
from pathlib import Path

# Add parent directory to path so we can import the simulator packages
sys.path.insert(0, str(Path(__file__).parent.parent))

from core import ExperimentEngine, Scenario
from instrumentation import ResultStore

G_VALUES = (10, 20)
M_VALUES = (5, 10, 20)


def run_grid(n: int, trials: int, base_seed: int, jobs: int, g_values=G_VALUES, m_values=M_VALUES):
    """
    Run one forced-m DHT experiment per (g, m) pair.

    Returns:
        List of ExperimentResult in grid order
    """
    engine = ExperimentEngine(jobs=jobs)
    results = []
    for g in g_values:
        for m in m_values:
            scenario = Scenario(
                protocol="DHT",
                n=n,
                g=g,
                forced_m=m,
                clones=1,
                replicas=2,
                trials=trials,
                base_seed=base_seed,
            ).validate()
            print(f"Running g={g}, m={m} ({trials} trials)...")
            results.append(engine.run_experiment(scenario, f"g={g},m={m}"))
    return results


def print_table(results):
    print("\n" + "=" * 86)
    print(f"{'case':<12}{'cache':>9}{'ideal':>9}{'err':>8}{'general':>9}"
          f"{'witness':>10}{'ideal':>9}{'err':>8}{'p_r':>8}")
    print("-" * 86)
    for result in results:
        report = result.report
        pred = report.predictions
        errs = report.relative_errors
        print(
            f"{result.scenario_id:<12}"
            f"{report.stats['cache_mean'].mean:>9.3f}"
            f"{pred.get('cache_ideal', float('nan')):>9.3f}"
            f"{errs.get('cache_ideal', float('nan')):>8.3f}"
            f"{pred.get('cache_general', float('nan')):>9.3f}"
            f"{report.stats['witnesses'].mean:>10.3f}"
            f"{pred.get('witness_ideal', float('nan')):>9.3f}"
            f"{errs.get('witness_ideal', float('nan')):>8.3f}"
            f"{report.measured.get('p_r', float('nan')):>8.3f}"
        )
    print("=" * 86)


def main():
    parser = argparse.ArgumentParser(description="Validate the DHT cache-size and witness formulas")
    parser.add_argument("--n", type=int, default=1000, help="Nodes per deployment")
    parser.add_argument("--trials", type=int, default=10, help="Trials per grid point")
    parser.add_argument("--seed", type=int, default=1, help="Base seed")
    parser.add_argument("--jobs", type=int, default=1, help="Worker processes")
    parser.add_argument("--out", type=str, default=None, help="Optional directory for summary.csv")

    args = parser.parse_args()

    results = run_grid(args.n, args.trials, args.seed, args.jobs)
    print_table(results)

    if args.out:
        store = ResultStore(args.out)
        store.write_summary([r.report.summary_row() for r in results])
        print(f"\nSummary written to {store.out_dir / 'summary.csv'}")


if __name__ == "__main__":
    main()
