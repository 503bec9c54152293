"""Self-checks behind ``hetnet-cs verify``: solver vs oracle and method invariants."""

from dataclasses import dataclass

import numpy as np

from .baselines import all_on, cs_no_qos, sorting_cs
from .metrics import offered_traffic, served_traffic_qos
from .optimizer import SwitchInstance, proposed_cs, solve_bruteforce, solve_exact
from .scenario import build_default_scenario, draw_channel

POWER_TOL = 1e-9  # W


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def random_instance(rng, n=None, max_n=16):
    """Random switching instance with mixed-sign savings and some forced SBSs."""
    n = int(rng.integers(1, max_n + 1)) if n is None else n
    saving = rng.uniform(-5.0, 40.0, n)
    weight = rng.uniform(0.0, 0.4, n)
    weight[rng.random(n) < 0.1] = 0.0
    forced = rng.random(n) < 0.2
    capacity = float(rng.uniform(0.0, 1.0))
    return SwitchInstance(saving=saving, weight=weight, forced_on=forced,
                          capacity=capacity, base_power=2000.0)


def check_solver_vs_oracle(n_instances=200, max_n=16, seed=2024):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(n_instances):
        inst = random_instance(rng, max_n=max_n)
        exact = solve_exact(inst)
        oracle = solve_bruteforce(inst)
        gap = abs(exact.total_power_w - oracle.total_power_w)
        worst = max(worst, gap)
        if gap > POWER_TOL or not inst.feasible(exact.off):
            return CheckResult("solver-vs-bruteforce", False,
                               f"instance {k}: exact {exact.total_power_w!r} vs oracle {oracle.total_power_w!r}")
    return CheckResult("solver-vs-bruteforce", True, f"{n_instances} instances, max gap {worst:.2e} W")


def check_method_invariants(seeds=range(5), alphas=(0.1, 0.5, 0.9), p_min_dbm=-70.0):
    failures = []
    for alpha in alphas:
        for seed in seeds:
            sc = build_default_scenario(alpha=alpha, p_min_dbm=p_min_dbm, seed=seed)
            snap = draw_channel(sc)
            on = all_on(sc, snap)
            srt = sorting_cs(sc, snap)
            noq = cs_no_qos(sc, snap)
            prop = proposed_cs(sc, snap)
            tag = f"alpha={alpha:g} seed={seed}"
            if not noq.total_power_w <= prop.total_power_w + POWER_TOL:
                failures.append(f"{tag}: no-qos above proposed")
            if not prop.total_power_w <= on.total_power_w + POWER_TOL:
                failures.append(f"{tag}: proposed above all-on")
            if not noq.total_power_w <= srt.total_power_w + POWER_TOL:
                failures.append(f"{tag}: no-qos above sorting")
            for d in (srt, noq, prop):
                if d.lambda_m > 1.0:
                    failures.append(f"{tag}: {d.method} overloads the MBS")
            if prop.outage_sbs:
                failures.append(f"{tag}: proposed has outages")
            if served_traffic_qos(sc, prop) != offered_traffic(sc):
                failures.append(f"{tag}: proposed lost traffic")
    detail = "; ".join(failures[:5]) if failures else f"{len(alphas) * len(seeds)} scenarios"
    return CheckResult("method-invariants", not failures, detail)


def run_all():
    return [check_solver_vs_oracle(), check_method_invariants()]
