"""
Instrumentation package: delivery tracing, analytic oracles and result files.
"""
from .analytic import (
    analytic_dht_cache_size_general,
    analytic_dht_comm_cost,
    analytic_dht_ideal,
    analytic_dht_witness_general,
    rde_detection_probability,
    relative_error,
)
from .delivery_tracing import DeliveryTrace, DeliveryTracer
from .result_store import ResultStore, format_value

__all__ = [
    "DeliveryTrace",
    "DeliveryTracer",
    "ResultStore",
    "format_value",
    "analytic_dht_cache_size_general",
    "analytic_dht_comm_cost",
    "analytic_dht_ideal",
    "analytic_dht_witness_general",
    "rde_detection_probability",
    "relative_error",
]
