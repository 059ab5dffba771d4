import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from adversary import inject_clones
from network import deploy_network
from protocols import DetectionProtocol, default_registry

from .metrics import MetricsReport, TrialResult, aggregate, trial_result
from .scenario import Scenario, ScenarioError

logger = logging.getLogger(__name__)

ADVERSARY_STREAM = 1
PROTOCOL_STREAM = 2


class ExperimentError(RuntimeError):
    """A trial failed; the message names the trial index and its seed."""


@dataclass
class ExperimentResult:
    scenario: Scenario
    scenario_id: str
    trials: List[TrialResult]
    report: MetricsReport


def _trial_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


def run_trial(scenario: Scenario, trial: int, scenario_id: str = "scenario",
              registry: Optional[Dict[str, DetectionProtocol]] = None) -> TrialResult:
    """Deploy, inject the adversary and run one detection round. Pure in (scenario, trial)."""
    registry = registry if registry is not None else default_registry()
    protocol = registry.get(scenario.protocol)
    if protocol is None:
        raise ScenarioError(f"unknown protocol {scenario.protocol!r}")
    seed = scenario.trial_seed(trial)
    net = deploy_network(scenario.deployment_config(trial))
    net = inject_clones(net, scenario.adversary_config(), _trial_rng(seed, ADVERSARY_STREAM))
    report = protocol.run_round(net, protocol.build_config(scenario), _trial_rng(seed, PROTOCOL_STREAM))
    return trial_result(scenario_id, trial, seed, net, report)


def _run_trial_checked(args: Tuple[Scenario, int, str], registry=None) -> TrialResult:
    scenario, trial, scenario_id = args
    try:
        return run_trial(scenario, trial, scenario_id, registry)
    except Exception as e:
        raise ExperimentError(
            f"trial {trial} (seed {scenario.trial_seed(trial)}) failed: {type(e).__name__}: {e}"
        ) from e


class ExperimentEngine:
    """
    Runs a scenario's trials, sequentially or over a process pool, and aggregates them.
    """

    def __init__(self, protocol_registry: Optional[Dict[str, DetectionProtocol]] = None, jobs: int = 1):
        if jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {jobs}")
        self.protocol_registry = protocol_registry
        self.jobs = jobs

    def run_trials(self, scenario: Scenario, scenario_id: str = "scenario") -> List[TrialResult]:
        registry = self.protocol_registry if self.protocol_registry is not None else default_registry()
        if scenario.protocol not in registry:
            raise ScenarioError(f"unknown protocol {scenario.protocol!r}")
        work = [(scenario, i, scenario_id) for i in range(scenario.trials)]
        if self.jobs == 1 or self.protocol_registry is not None:
            results = [_run_trial_checked(args, registry) for args in work]
        else:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                results = list(pool.map(_run_trial_checked, work))
        results.sort(key=lambda t: t.trial)
        logger.info("%s: %d trials of %s done", scenario_id, len(results), scenario.protocol)
        return results

    def run_experiment(self, scenario: Scenario, scenario_id: str = "scenario") -> ExperimentResult:
        scenario.validate()
        trials = self.run_trials(scenario, scenario_id)
        return ExperimentResult(scenario, scenario_id, trials, aggregate(scenario, scenario_id, trials))

    def sweep(self, scenario: Scenario, key: str, values: Sequence[str]) -> List[ExperimentResult]:
        """One experiment per value of a scenario key; scenario ids are KEY=value."""
        if not values:
            raise ScenarioError(f"sweep over {key} needs at least one value")
        variants = [(f"{key}={value}", scenario.with_value(key, value)) for value in values]
        return [self.run_experiment(variant, sid) for sid, variant in variants]
