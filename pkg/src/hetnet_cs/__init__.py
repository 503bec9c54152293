"""QoS-aware small-cell switching for heterogeneous networks."""

from .baselines import all_on, cs_no_qos, sorting_cs
from .metrics import EvalReport, evaluate, savings_pct, served_traffic_qos
from .optimizer import (
    SwitchDecision,
    SwitchInstance,
    build_instance,
    proposed_cs,
    solve_bruteforce,
    solve_dp,
    solve_exact,
)
from .scenario import Scenario, ScenarioConfig, build_default_scenario, build_scenario, draw_channel

__all__ = [
    "EvalReport", "Scenario", "ScenarioConfig", "SwitchDecision", "SwitchInstance",
    "all_on", "build_default_scenario", "build_instance", "build_scenario", "cs_no_qos",
    "draw_channel", "evaluate", "proposed_cs", "savings_pct", "served_traffic_qos",
    "solve_bruteforce", "solve_dp", "solve_exact", "sorting_cs",
]

__version__ = "0.1.0"
