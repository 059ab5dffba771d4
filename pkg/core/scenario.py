"""
Scenario files: flat UTF-8 key=value lines, `#` comments, unknown keys rejected.
"""
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from adversary import AdversaryConfig, CloneBehavior
from network import DeploymentConfig

PROTOCOLS = ("DHT", "RDE")
MIN_SCENARIO_BITS = 16
MAX_SCENARIO_BITS = 64


class ScenarioError(ValueError):
    """Raised for malformed scenario files and invalid scenario values."""


def _parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("true", "1", "yes", "on"):
        return True
    if value in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_protocol(raw: str) -> str:
    value = raw.strip().upper()
    if value not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {', '.join(PROTOCOLS)}")
    return value


def _parse_clone_behavior(raw: str) -> CloneBehavior:
    try:
        return CloneBehavior[raw.strip().upper()]
    except KeyError:
        raise ValueError(f"clone_behavior must be PARTICIPATING or NON_PARTICIPATING, got {raw!r}")


# key -> parser; the file format's vocabulary
KEY_PARSERS: Dict[str, Callable[[str], Any]] = {
    "protocol": _parse_protocol,
    "n": int,
    "side": float,
    "radio_range": float,
    "target_degree": float,
    "b": int,
    "g": int,
    "p_c": float,
    "theta_t": float,
    "theta_p": float,
    "ttl": int,
    "r": int,
    "clones": int,
    "replicas": int,
    "clone_behavior": _parse_clone_behavior,
    "dropper_fraction": float,
    "modify_enabled": _parse_bool,
    "trials": int,
    "base_seed": int,
    "forced_m": int,
}


@dataclass(frozen=True)
class Scenario:
    protocol: str = "DHT"
    n: int = 1000
    side: float = 1000.0
    radio_range: Optional[float] = None
    target_degree: Optional[float] = 10.0
    b: int = 64
    g: int = 10
    p_c: float = 0.3
    theta_t: float = math.pi / 2
    theta_p: float = math.pi / 6
    ttl: int = 0
    r: int = 1
    clones: int = 1
    replicas: int = 2
    clone_behavior: CloneBehavior = CloneBehavior.NON_PARTICIPATING
    dropper_fraction: float = 0.0
    modify_enabled: bool = False
    trials: int = 10
    base_seed: int = 1
    forced_m: Optional[int] = None

    def validate(self) -> "Scenario":
        problems: List[str] = []
        if self.protocol not in PROTOCOLS:
            problems.append(f"protocol must be one of {PROTOCOLS}")
        if self.n < 2:
            problems.append("n must be >= 2")
        if self.side <= 0:
            problems.append("side must be > 0")
        if (self.radio_range is None) == (self.target_degree is None):
            problems.append("exactly one of radio_range and target_degree must be set")
        if self.radio_range is not None and self.radio_range <= 0:
            problems.append("radio_range must be > 0")
        if self.target_degree is not None and self.target_degree < 1:
            problems.append("target_degree must be >= 1")
        if not MIN_SCENARIO_BITS <= self.b <= MAX_SCENARIO_BITS:
            problems.append(f"b must be in [{MIN_SCENARIO_BITS}, {MAX_SCENARIO_BITS}]")
        if self.g < 1:
            problems.append("g must be >= 1")
        if self.protocol == "DHT" and self.g >= self.n - self.clones:
            problems.append("g must be smaller than the number of overlay participants")
        if not 0.0 < self.p_c <= 1.0:
            problems.append("p_c must be in (0, 1]")
        if not 0.0 < self.theta_p < self.theta_t <= math.pi:
            problems.append("need 0 < theta_p < theta_t <= pi")
        if self.ttl < 0:
            problems.append("ttl must be >= 0 (0 selects ceil(sqrt(n)))")
        if self.r < 1:
            problems.append("r must be >= 1")
        if not 0 <= self.clones <= self.n:
            problems.append("clones must be in [0, n]")
        if self.replicas < 2:
            problems.append("replicas must be >= 2")
        if not 0.0 <= self.dropper_fraction <= 1.0:
            problems.append("dropper_fraction must be in [0, 1]")
        if self.trials < 1:
            problems.append("trials must be >= 1")
        if self.base_seed < 0:
            problems.append("base_seed must be >= 0")
        if self.forced_m is not None:
            if self.protocol != "DHT":
                problems.append("forced_m applies to the DHT protocol only")
            elif self.forced_m < 1:
                problems.append("forced_m must be >= 1")
        if problems:
            raise ScenarioError("; ".join(problems))
        return self

    def trial_seed(self, trial: int) -> int:
        return self.base_seed + trial

    def deployment_config(self, trial: int) -> DeploymentConfig:
        return DeploymentConfig(
            n=self.n,
            side=self.side,
            radio_range=self.radio_range,
            target_degree=self.target_degree,
            rng_seed=self.trial_seed(trial),
        )

    def adversary_config(self) -> AdversaryConfig:
        return AdversaryConfig(
            cloned_identities=self.clones,
            replicas_per_identity=self.replicas,
            dropper_fraction=self.dropper_fraction,
            clone_behavior=self.clone_behavior,
            modify_enabled=self.modify_enabled,
        )

    def with_value(self, key: str, raw: str) -> "Scenario":
        """A copy with one key set from its file-format string (used by sweeps)."""
        return _apply(self, {key: raw}).validate()

    def to_lines(self) -> List[str]:
        lines = []
        for name, value in asdict(self).items():
            if value is None:
                continue
            if isinstance(value, CloneBehavior):
                value = value.name
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{name}={value}")
        return lines


def _apply(base: Scenario, values: Dict[str, str]) -> Scenario:
    changes: Dict[str, Any] = {}
    for key, raw in values.items():
        parser = KEY_PARSERS.get(key)
        if parser is None:
            raise ScenarioError(f"unknown scenario key {key!r}")
        try:
            changes[key] = parser(raw)
        except ValueError as e:
            raise ScenarioError(f"bad value for {key}: {e}") from e
    if "radio_range" in changes and "target_degree" not in changes:
        changes["target_degree"] = None
    if "target_degree" in changes and "radio_range" not in changes:
        changes["radio_range"] = None
    return replace(base, **changes)


def parse_scenario_text(text: str) -> Scenario:
    values: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"line {lineno}: expected key=value, got {line.strip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key in values:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        if key not in KEY_PARSERS:
            raise ScenarioError(f"line {lineno}: unknown scenario key {key!r}")
        values[key] = raw
    return _apply(Scenario(), values).validate()


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    return parse_scenario_text(text)
