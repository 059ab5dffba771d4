"""
Per-trial measurements and their aggregation against the analytic predictions.
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from instrumentation.analytic import (
    analytic_dht_cache_size_general,
    analytic_dht_comm_cost,
    analytic_dht_ideal,
    analytic_dht_witness_general,
    rde_detection_probability,
    relative_error,
)
from network import Network
from protocols import RoundReport

METRIC_COLUMNS = [
    "scenario_id",
    "protocol",
    "n",
    "trial",
    "messages_per_node",
    "cache_mean",
    "witnesses",
    "detected",
    "evidence_msgs",
    "transport_failures",
    "reach_h",
]


@dataclass
class TrialResult:
    """One metrics.csv row plus the transport statistics the summary needs."""
    scenario_id: str
    protocol: str
    n: int
    trial: int
    seed: int
    messages_per_node: float
    cache_mean: float
    witnesses: float
    detected: float
    evidence_msgs: int
    transport_failures: int
    reach_h: float
    mean_degree: float = 0.0
    participants: int = 0
    claims_sent: int = 0
    overlay_hops: int = 0
    physical_hops: int = 0
    routed_claims: int = 0
    predecessor_inspections: int = 0
    destination_arrivals: int = 0
    max_line_messages: int = 0
    border_discards: int = 0
    ttl_discards: int = 0
    false_detections: int = 0
    revoking_nodes: float = 0.0
    buffered_claims_peak: int = 0
    clone_lines: int = 0
    clone_line_detections: int = 0
    traces: List[Dict[str, Any]] = field(default_factory=list)

    def row(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in METRIC_COLUMNS}


def trial_result(scenario_id: str, trial: int, seed: int, net: Network, report: RoundReport) -> TrialResult:
    cloned = net.cloned_identities()
    witness_counts = [report.witness_count(identity) for identity in cloned]
    detected = [identity in report.detected_identities for identity in cloned]
    revocations = [report.revocations.get(identity, 0) for identity in cloned]
    return TrialResult(
        scenario_id=scenario_id,
        protocol=report.protocol,
        n=len(net.identities()),
        trial=trial,
        seed=seed,
        messages_per_node=report.messages_per_node,
        cache_mean=report.cache_mean,
        witnesses=float(np.mean(witness_counts)) if cloned else 0.0,
        detected=float(np.mean(detected)) if cloned else 0.0,
        evidence_msgs=report.evidence_flood_messages,
        transport_failures=report.transport_failures,
        reach_h=float(np.mean(report.exploration_reach)) if report.exploration_reach else 0.0,
        mean_degree=net.mean_degree(),
        participants=report.participants,
        claims_sent=report.claims_sent,
        overlay_hops=int(sum(report.overlay_hops)),
        physical_hops=int(sum(report.physical_hops)),
        routed_claims=len(report.overlay_hops),
        predecessor_inspections=report.predecessor_inspections,
        destination_arrivals=report.destination_arrivals,
        max_line_messages=max(report.line_messages, default=0),
        border_discards=report.border_discards,
        ttl_discards=report.ttl_discards,
        false_detections=len(report.detected_identities - set(cloned)),
        revoking_nodes=float(np.mean(revocations)) if cloned else 0.0,
        buffered_claims_peak=report.buffered_claims_peak,
        clone_lines=report.clone_lines,
        clone_line_detections=report.clone_line_detections,
        traces=[trace.to_dict() for trace in report.traces],
    )


@dataclass(frozen=True)
class MetricStat:
    mean: float
    std: float

    @classmethod
    def of(cls, values: List[float]) -> "MetricStat":
        arr = np.asarray(values, dtype=float)
        return cls(float(arr.mean()), float(arr.std(ddof=0)))


@dataclass
class MetricsReport:
    scenario_id: str
    protocol: str
    n: int
    trials: int
    stats: Dict[str, MetricStat]
    measured: Dict[str, float] = field(default_factory=dict)
    predictions: Dict[str, float] = field(default_factory=dict)
    relative_errors: Dict[str, float] = field(default_factory=dict)
    false_detections: int = 0

    def summary_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {
            "scenario_id": self.scenario_id,
            "protocol": self.protocol,
            "n": self.n,
            "trials": self.trials,
        }
        for name, stat in self.stats.items():
            row[f"{name}_mean"] = stat.mean
            row[f"{name}_std"] = stat.std
        for name, value in self.measured.items():
            row[f"measured_{name}"] = value
        for name, value in self.predictions.items():
            row[f"predicted_{name}"] = value
        for name, value in self.relative_errors.items():
            row[f"relerr_{name}"] = value
        row["false_detections"] = self.false_detections
        return row


STAT_FIELDS = ("messages_per_node", "cache_mean", "witnesses", "detected",
               "evidence_msgs", "transport_failures", "reach_h")


def _ratio(num: float, den: float) -> Optional[float]:
    return num / den if den else None


def aggregate(scenario, scenario_id: str, trials: List[TrialResult]) -> MetricsReport:
    """Mean/stddev per metric plus analytic predictions from the measured transport parameters."""
    if not trials:
        raise ValueError("cannot aggregate an empty trial list")
    trials = sorted(trials, key=lambda t: t.trial)
    stats = {name: MetricStat.of([getattr(t, name) for t in trials]) for name in STAT_FIELDS}
    report = MetricsReport(
        scenario_id=scenario_id,
        protocol=scenario.protocol,
        n=scenario.n,
        trials=len(trials),
        stats=stats,
        false_detections=sum(t.false_detections for t in trials),
    )
    report.measured["mean_degree"] = float(np.mean([t.mean_degree for t in trials]))
    report.measured["revoking_nodes"] = float(np.mean([t.revoking_nodes for t in trials]))
    if scenario.protocol == "DHT":
        _dht_predictions(scenario, trials, report)
    else:
        _rde_predictions(scenario, trials, report)
    return report


def _dht_predictions(scenario, trials: List[TrialResult], report: MetricsReport):
    n = scenario.n
    overlay = sum(t.overlay_hops for t in trials)
    physical = sum(t.physical_hops for t in trials)
    routed = sum(t.routed_claims for t in trials)
    arrivals = sum(t.destination_arrivals for t in trials)
    inspections = sum(t.predecessor_inspections for t in trials)
    claims = sum(t.claims_sent for t in trials)

    m = float(scenario.forced_m) if scenario.forced_m is not None else claims / (n * len(trials))
    c = _ratio(overlay / routed, math.log2(n)) if routed else None
    l = _ratio(physical, overlay)
    p_r = _ratio(inspections, scenario.g * arrivals)
    measured = report.measured
    measured["m"] = m
    if c is not None:
        measured["c"] = c
    if l is not None:
        measured["l"] = l
    if p_r is not None:
        measured["p_r"] = min(p_r, 1.0)

    predictions = report.predictions
    if c is not None and l is not None and c > 0 and m > 0:
        # p_c * d collapses to the measured claims per node
        predictions["messages_per_node"] = analytic_dht_comm_cost(1.0, m, c, l, n)
    if p_r is not None:
        predictions["cache_general"] = analytic_dht_cache_size_general(scenario.g, measured["p_r"], m)
        predictions["witness_general"] = analytic_dht_witness_general(scenario.g, measured["p_r"], m)
    if m >= 1:
        predictions["cache_ideal"], predictions["witness_ideal"] = analytic_dht_ideal(scenario.g, m)

    pairs = {
        "messages_per_node": "messages_per_node",
        "cache_general": "cache_mean",
        "cache_ideal": "cache_mean",
    }
    if scenario.clones > 0 and scenario.replicas == 2:
        pairs["witness_general"] = "witnesses"
        pairs["witness_ideal"] = "witnesses"
    for predicted, stat in pairs.items():
        if predicted in predictions:
            report.relative_errors[predicted] = relative_error(report.stats[stat].mean, predictions[predicted])


def _rde_predictions(scenario, trials: List[TrialResult], report: MetricsReport):
    h = report.stats["reach_h"].mean
    report.measured["max_line_messages"] = float(max(t.max_line_messages for t in trials))
    report.measured["border_discards"] = float(np.mean([t.border_discards for t in trials]))
    report.measured["ttl_discards"] = float(np.mean([t.ttl_discards for t in trials]))
    report.predictions["line_probability"] = rde_detection_probability(min(h, scenario.n), scenario.n)
    report.measured["buffered_claims_peak"] = float(max(t.buffered_claims_peak for t in trials))
    lines = sum(t.clone_lines for t in trials)
    if lines:
        rate = sum(t.clone_line_detections for t in trials) / lines
        report.measured["line_detection_rate"] = rate
        report.relative_errors["line_probability"] = relative_error(rate, report.predictions["line_probability"])
