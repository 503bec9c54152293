"""Evaluation quantities: QoS-served traffic and power savings."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class EvalReport:
    total_power_w: float
    served_traffic_qos: float
    offered_traffic: float
    savings_vs_all_on: float  # percent
    outage_count: int
    lambda_m: float


def sbs_traffic(scenario):
    """Traffic of each SBS group in capacity units, C_j * lambda_j."""
    return np.array([c.capacity * c.load for c in scenario.sbs])


def offered_traffic(scenario):
    return math.fsum([scenario.mbs.capacity * scenario.lambda_m0, *sbs_traffic(scenario)])


def served_traffic_qos(scenario, decision):
    """Traffic delivered with QoS.

    The MBS always serves its own initial load. An SBS group counts in full
    when its SBS is on, or when it was offloaded and every user clears the
    threshold (it is then carried by the MBS); an offloaded group with any
    user in outage counts zero.
    """
    outage = np.zeros(scenario.n_sbs, dtype=bool)
    outage[list(decision.outage_sbs)] = True
    served = np.where(outage, 0.0, sbs_traffic(scenario))
    return math.fsum([scenario.mbs.capacity * scenario.lambda_m0, *served])


def savings_pct(power_w, all_on_power_w):
    if all_on_power_w <= 0:
        raise DomainError("reference power must be positive")
    return 100.0 * (1.0 - power_w / all_on_power_w)


def evaluate(scenario, decision, all_on_power_w):
    return EvalReport(
        total_power_w=decision.total_power_w,
        served_traffic_qos=served_traffic_qos(scenario, decision),
        offered_traffic=offered_traffic(scenario),
        savings_vs_all_on=savings_pct(decision.total_power_w, all_on_power_w),
        outage_count=len(decision.outage_sbs),
        lambda_m=decision.lambda_m,
    )
