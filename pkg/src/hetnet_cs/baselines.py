"""Reference switching policies: all-ON, load-sorted greedy, and QoS-blind optimum."""

import numpy as np

from .optimizer import build_instance, evaluate_decision, solve_exact
from .power import mbs_load
from .scenario import draw_channel


def all_on(scenario, snapshot=None):
    delta = np.ones(scenario.n_sbs, dtype=np.int8)
    return evaluate_decision(scenario, snapshot, delta, method="all-on")


def sorting_cs(scenario, snapshot=None):
    """Sleep SBSs from least to most loaded until the MBS would overflow.

    Load order only, ties by index; the scan stops at the first SBS that
    no longer fits. QoS is not checked, so outages are possible.
    """
    loads = scenario.sbs_loads
    order = np.lexsort((np.arange(scenario.n_sbs), loads))
    delta = np.ones(scenario.n_sbs, dtype=np.int8)
    for j in order:
        delta[j] = 0
        if mbs_load(delta, scenario.lambda_m0, loads, scenario.phi) > 1.0:
            delta[j] = 1
            break
    return evaluate_decision(scenario, snapshot, delta, method="sorting")


def cs_no_qos(scenario, snapshot=None, solver=solve_exact):
    """Exact power minimum under the MBS capacity limit alone."""
    if snapshot is None:
        snapshot = draw_channel(scenario)
    instance = build_instance(scenario, snapshot).without_qos()
    solution = solver(instance)
    return evaluate_decision(scenario, snapshot, solution.delta, method="no-qos")
