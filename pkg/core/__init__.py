from .experiment_engine import ExperimentEngine, ExperimentError, ExperimentResult, run_trial
from .metrics import METRIC_COLUMNS, MetricStat, MetricsReport, TrialResult, aggregate, trial_result
from .scenario import PROTOCOLS, Scenario, ScenarioError, load_scenario, parse_scenario_text

__all__ = [
    'ExperimentEngine',
    'ExperimentError',
    'ExperimentResult',
    'run_trial',
    'METRIC_COLUMNS',
    'MetricStat',
    'MetricsReport',
    'TrialResult',
    'aggregate',
    'trial_result',
    'PROTOCOLS',
    'Scenario',
    'ScenarioError',
    'load_scenario',
    'parse_scenario_text',
]
