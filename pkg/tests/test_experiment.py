from dataclasses import replace

import numpy as np
import pytest

from core import (
    METRIC_COLUMNS,
    ExperimentEngine,
    ExperimentError,
    Scenario,
    ScenarioError,
    aggregate,
    run_trial,
)
from protocols import DetectionProtocol, default_registry

SMALL_DHT = Scenario(protocol="DHT", n=150, side=600.0, target_degree=10, b=32, g=5, p_c=0.5, trials=3, base_seed=4)
SMALL_RDE = Scenario(protocol="RDE", n=150, side=600.0, target_degree=10, trials=2, base_seed=4)


class ExplodingProtocol(DetectionProtocol):
    """Delegates to the DHT protocol but fails on its second round."""

    def __init__(self):
        super().__init__(name="DHT", description="fails on its second round")
        self.inner = default_registry()["DHT"]
        self.rounds = 0

    def build_config(self, scenario):
        return self.inner.build_config(scenario)

    def run_round(self, network, config, rng):
        self.rounds += 1
        if self.rounds == 2:
            raise RuntimeError("boom")
        return self.inner.run_round(network, config, rng)


def test_trial_is_reproducible():
    first = run_trial(SMALL_DHT, 0, "x")
    second = run_trial(SMALL_DHT, 0, "x")
    assert first == second
    assert first.seed == 4 and first.trial == 0
    assert list(first.row()) == METRIC_COLUMNS
    assert first.n == 150 and first.protocol == "DHT"


def test_single_trial_aggregates_to_itself():
    engine = ExperimentEngine()
    result = engine.run_experiment(replace(SMALL_DHT, trials=1), "one")
    trial = result.trials[0]
    for name, stat in result.report.stats.items():
        assert stat.mean == pytest.approx(getattr(trial, name))
        assert stat.std == 0.0


def test_aggregation_ignores_trial_order():
    trials = ExperimentEngine().run_trials(SMALL_DHT, "order")
    forward = aggregate(SMALL_DHT, "order", trials)
    backward = aggregate(SMALL_DHT, "order", list(reversed(trials)))
    assert forward.summary_row() == backward.summary_row()


def test_dht_report_has_predictions():
    report = ExperimentEngine().run_experiment(SMALL_DHT, "dht").report
    assert report.trials == 3
    for key in ("mean_degree", "m", "c", "l", "p_r"):
        assert key in report.measured
    assert report.measured["c"] > 0 and report.measured["l"] >= 1.0
    for key in ("messages_per_node", "cache_general", "witness_general", "cache_ideal", "witness_ideal"):
        assert key in report.predictions
    assert "messages_per_node" in report.relative_errors
    row = report.summary_row()
    assert row["messages_per_node_mean"] == report.stats["messages_per_node"].mean
    assert row["false_detections"] == 0


def test_rde_report_has_reach_prediction():
    result = ExperimentEngine().run_experiment(SMALL_RDE, "rde")
    assert all(t.reach_h > 0 for t in result.trials)
    assert 0 < result.report.predictions["line_probability"] <= 1
    assert result.report.measured["max_line_messages"] <= 13
    assert all(t.clone_lines > 0 for t in result.trials)
    assert all(0 <= t.clone_line_detections <= t.clone_lines for t in result.trials)
    assert 0 <= result.report.measured["line_detection_rate"] <= 1
    assert result.report.measured["buffered_claims_peak"] == 0
    row = result.report.summary_row()
    assert row["relerr_line_probability"] == result.report.relative_errors["line_probability"]


def test_parallel_run_matches_sequential():
    sequential = ExperimentEngine(jobs=1).run_trials(SMALL_RDE, "p")
    parallel = ExperimentEngine(jobs=2).run_trials(SMALL_RDE, "p")
    assert [t.row() for t in sequential] == [t.row() for t in parallel]


def test_sweep_over_clone_count():
    results = ExperimentEngine().sweep(replace(SMALL_DHT, trials=1), "clones", ["0", "2"])
    assert [r.scenario_id for r in results] == ["clones=0", "clones=2"]
    assert [r.scenario.clones for r in results] == [0, 2]
    assert results[0].report.stats["witnesses"].mean == 0.0
    with pytest.raises(ScenarioError):
        ExperimentEngine().sweep(SMALL_DHT, "clones", [])


def test_failing_trial_names_its_seed():
    engine = ExperimentEngine(protocol_registry={"DHT": ExplodingProtocol()})
    with pytest.raises(ExperimentError, match=r"trial 1 \(seed 5\)"):
        engine.run_experiment(SMALL_DHT, "boom")


def test_unknown_protocol_is_a_config_error():
    engine = ExperimentEngine(protocol_registry={})
    with pytest.raises(ScenarioError):
        engine.run_experiment(SMALL_DHT)


def test_invalid_job_count():
    with pytest.raises(ValueError):
        ExperimentEngine(jobs=0)


def test_clone_free_trials_are_sound():
    for scenario in (SMALL_DHT, SMALL_RDE):
        clean = replace(scenario, clones=0, trials=2)
        for trial in ExperimentEngine().run_trials(clean, "clean"):
            assert trial.witnesses == 0.0 and trial.detected == 0.0
            assert trial.evidence_msgs == 0 and trial.false_detections == 0
            assert np.isfinite(trial.messages_per_node)
