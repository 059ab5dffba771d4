import math

import pytest

from adversary import CloneBehavior
from core import Scenario, ScenarioError, load_scenario, parse_scenario_text

FULL = """
# every key once
protocol = rde
n = 500
side = 800
radio_range = 60   # meters
b = 32
g = 8
p_c = 0.5
theta_t = 1.2
theta_p = 0.4
ttl = 20
r = 2
clones = 3
replicas = 3
clone_behavior = participating
dropper_fraction = 0.05
modify_enabled = true
trials = 4
base_seed = 9
"""


def test_parse_every_key():
    s = parse_scenario_text(FULL)
    assert s.protocol == "RDE"
    assert (s.n, s.side, s.radio_range, s.target_degree) == (500, 800.0, 60.0, None)
    assert (s.b, s.g, s.p_c) == (32, 8, 0.5)
    assert (s.theta_t, s.theta_p, s.ttl, s.r) == (1.2, 0.4, 20, 2)
    assert (s.clones, s.replicas, s.clone_behavior) == (3, 3, CloneBehavior.PARTICIPATING)
    assert s.dropper_fraction == 0.05 and s.modify_enabled is True
    assert (s.trials, s.base_seed, s.forced_m) == (4, 9, None)


def test_defaults():
    s = parse_scenario_text("# nothing set\n")
    assert s == Scenario()
    assert s.protocol == "DHT" and s.n == 1000 and s.target_degree == 10.0
    assert s.theta_t == pytest.approx(math.pi / 2) and s.theta_p == pytest.approx(math.pi / 6)
    assert s.clone_behavior is CloneBehavior.NON_PARTICIPATING


@pytest.mark.parametrize("text", [
    "colour=blue",
    "n=100\nn=200",
    "n",
    "n=lots",
    "protocol=GOSSIP",
    "modify_enabled=maybe",
    "clone_behavior=sleepy",
    "radio_range=50\ntarget_degree=10",
    "protocol=RDE\nforced_m=5",
    "b=8",
    "theta_t=0.2\ntheta_p=0.4",
    "replicas=1",
    "g=1000",
])
def test_rejects_bad_scenarios(text):
    with pytest.raises(ScenarioError):
        parse_scenario_text(text)


def test_lines_parse_back_to_the_same_scenario():
    s = parse_scenario_text(FULL)
    assert parse_scenario_text("\n".join(s.to_lines())) == s
    assert "clone_behavior=PARTICIPATING" in s.to_lines()


def test_with_value_switches_range_mode():
    s = Scenario()
    ranged = s.with_value("radio_range", "75")
    assert ranged.radio_range == 75.0 and ranged.target_degree is None
    assert ranged.with_value("target_degree", "8").radio_range is None
    assert s.with_value("clones", "4").clones == 4
    with pytest.raises(ScenarioError):
        s.with_value("nope", "1")


def test_trial_seeds_and_configs():
    s = Scenario(base_seed=40, clones=2, dropper_fraction=0.1)
    assert [s.trial_seed(i) for i in range(3)] == [40, 41, 42]
    assert s.deployment_config(2).rng_seed == 42
    adversary = s.adversary_config()
    assert adversary.cloned_identities == 2 and adversary.dropper_fraction == 0.1


def test_load_scenario(tmp_path):
    path = tmp_path / "small.scn"
    path.write_text("protocol=DHT\nn=200\ng=5\n", encoding="utf-8")
    assert load_scenario(path).n == 200
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.scn")
