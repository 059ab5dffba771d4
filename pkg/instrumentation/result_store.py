"""
Result storage for experiment runs.
Writes metrics.csv, summary.csv, curves.csv and config.txt into one output directory,
plus traces.jsonl when delivery tracing was on.
"""
import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from security.identity import HASH_NAME

CURVE_COLUMNS = ["x", "y", "series"]


def format_value(value: Any) -> str:
    """Deterministic text form of one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    return str(value)


class ResultStore:
    """
    Stores experiment output files in a directory, one file per table.
    """

    def __init__(self, out_dir: str = "results"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _write_table(self, name: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        path = self.out_dir / name
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(column)) for column in columns])
        return path

    def write_metrics(self, columns: Sequence[str], rows: List[Dict[str, Any]]) -> Path:
        return self._write_table("metrics.csv", columns, rows)

    def write_summary(self, rows: List[Dict[str, Any]]) -> Path:
        # sweeps can add columns part way through; keep first-seen order
        columns: List[str] = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
        return self._write_table("summary.csv", columns, rows)

    def write_curves(self, points: List[Tuple[Any, float, str]]) -> Path:
        rows = [dict(zip(CURVE_COLUMNS, point)) for point in points]
        return self._write_table("curves.csv", CURVE_COLUMNS, rows)

    def write_config(self, lines: List[str], extra: Dict[str, Any] = None) -> Path:
        path = self.out_dir / "config.txt"
        body = list(lines)
        for key, value in (extra or {}).items():
            body.append(f"{key}={format_value(value)}")
        body.append(f"hash={HASH_NAME}")
        path.write_text("\n".join(body) + "\n", encoding="utf-8")
        return path

    def write_traces(self, traces: Iterable[Dict[str, Any]]) -> Path:
        """One JSON object per line, in trial order."""
        path = self.out_dir / "traces.jsonl"
        with open(path, "w", encoding="utf-8") as f:
            for trace in traces:
                f.write(json.dumps(trace, sort_keys=True) + "\n")
        return path

    def load_traces(self) -> List[Dict[str, Any]]:
        with open(self.out_dir / "traces.jsonl", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]

    def load_table(self, name: str) -> List[Dict[str, str]]:
        with open(self.out_dir / name, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))
