"""End-to-end acceptance checks, one test per criterion.

Each test appends a pass/fail line that the terminal summary prints.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from hetnet_cs.channel import (
    ChannelConstants,
    LinkGeometry,
    breakpoint_distance,
    link_budget,
    los_probability,
    pathloss_los_db,
    pathloss_nlos_db,
    sample_fading,
)
from hetnet_cs.experiments import DEFAULT_GRIDS, SweepSpec, run_sweep
from hetnet_cs.optimizer import proposed_cs, solve_bruteforce, solve_exact
from hetnet_cs.scenario import ScenarioConfig, build_default_scenario, draw_channel
from hetnet_cs.verify import random_instance

SEEDS = tuple(range(20))


def record(name, passed, detail):
    ACCEPTANCE_LINES.append((name, bool(passed), detail))
    assert passed, f"{name}: {detail}"


@pytest.fixture(scope="module")
def alpha_sweep():
    start = time.perf_counter()
    result = run_sweep(SweepSpec(variable="alpha", grid=DEFAULT_GRIDS["alpha"], seeds=SEEDS))
    return result, time.perf_counter() - start


@pytest.fixture(scope="module")
def pmin_sweep():
    spec = SweepSpec(variable="pmin", grid=DEFAULT_GRIDS["pmin"], seeds=(0,),
                     fixed=ScenarioConfig(alpha=0.5))
    return run_sweep(spec)


def mean_savings(result, alpha, method="proposed"):
    return float(np.mean([r.savings_pct for r in result.select(value=alpha, method=method)]))


def test_c1_solver_optimality():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        inst = random_instance(rng, max_n=16)
        worst = max(worst, abs(solve_exact(inst).total_power_w - solve_bruteforce(inst).total_power_w))
    elapsed = time.perf_counter() - start
    record("C1 solver optimality", worst <= 1e-9 and elapsed < 30,
           f"200 instances, max |exact - brute| = {worst:.3g} W, {elapsed:.1f} s")


def test_c2a_savings_low_load(alpha_sweep):
    result, elapsed = alpha_sweep
    s = mean_savings(result, 0.1)
    record("C2a savings at alpha=0.1 in [20, 40]%", 20 <= s <= 40 and elapsed < 120,
           f"proposed {s:.2f}% (no-qos {mean_savings(result, 0.1, 'no-qos'):.2f}%), sweep {elapsed:.1f} s")


def test_c2b_savings_high_load(alpha_sweep):
    result, elapsed = alpha_sweep
    s = mean_savings(result, 0.9)
    record("C2b savings at alpha=0.9 in [5, 25]%", 5 <= s <= 25 and elapsed < 120,
           f"proposed {s:.2f}% (no-qos {mean_savings(result, 0.9, 'no-qos'):.2f}%)")


def test_c3_method_ordering(alpha_sweep):
    result, _ = alpha_sweep
    violations = 0
    for alpha in DEFAULT_GRIDS["alpha"]:
        for seed in SEEDS:
            p = {m: result.select(value=alpha, method=m, seed=seed)[0].total_power_w
                 for m in ("all-on", "sorting", "no-qos", "proposed")}
            ok = p["no-qos"] <= p["proposed"] <= p["all-on"] and p["no-qos"] <= p["sorting"]
            violations += not ok
    record("C3 method ordering", violations == 0, f"{violations} violations over 9 x 20 cells")


def test_c4_served_traffic(alpha_sweep):
    result, _ = alpha_sweep
    short, above, strict_low = 0, 0, 0
    for alpha in DEFAULT_GRIDS["alpha"]:
        for seed in SEEDS:
            prop = result.select(value=alpha, method="proposed", seed=seed)[0]
            noqos = result.select(value=alpha, method="no-qos", seed=seed)[0]
            short += prop.served_traffic_qos != prop.offered_traffic
            above += noqos.served_traffic_qos > prop.served_traffic_qos
            strict_low += alpha <= 0.3 and noqos.served_traffic_qos < prop.served_traffic_qos
    record("C4 served traffic at -70 dBm", short == 0 and above == 0 and strict_low > 0,
           f"proposed short of offered on {short} cells, no-qos above proposed on {above}, "
           f"strict loss for no-qos on {strict_low} cells with alpha <= 0.3")


def test_c5a_proposed_monotone(pmin_sweep):
    powers = [r.total_power_w for r in pmin_sweep.select(method="proposed")]
    record("C5a proposed non-decreasing in P_min", all(b >= a for a, b in zip(powers, powers[1:])),
           "powers " + ", ".join(f"{p:.2f}" for p in powers))


def test_c5b_baselines_flat(pmin_sweep):
    spans = {m: np.ptp([r.total_power_w for r in pmin_sweep.select(method=m)])
             for m in ("all-on", "sorting", "no-qos")}
    record("C5b baselines constant in P_min", all(v == 0 for v in spans.values()),
           ", ".join(f"{m} span {v:g} W" for m, v in spans.items()))


def test_c5c_loose_threshold_equality(pmin_sweep):
    prop = pmin_sweep.select(value=-90.0, method="proposed")[0].total_power_w
    noqos = pmin_sweep.select(value=-90.0, method="no-qos")[0].total_power_w
    record("C5c proposed = no-qos at -90 dBm", math.isclose(prop, noqos, abs_tol=1e-9),
           f"proposed {prop:.2f} W, no-qos {noqos:.2f} W")


def test_c6_feasibility(alpha_sweep, pmin_sweep):
    rows = [r for r in alpha_sweep[0].cells() + pmin_sweep.cells() if r.method != "all-on"]
    overload = sum(r.lambda_m > 1.0 for r in rows)
    outages = sum(r.outage_count for r in rows if r.method == "proposed")
    record("C6 feasibility", overload == 0 and outages == 0,
           f"{len(rows)} decisions, {overload} with lambda_M > 1, {outages} proposed outages")


def test_c7_channel_units():
    consts = ChannelConstants()
    c = consts.c
    rng = np.random.default_rng(7)
    d_b = breakpoint_distance(25.0, 1.5, 1.0, 2.5, c)
    scan = LinkGeometry.from_d2d(np.arange(10.0, 5001.0), 25.0, 1.5)
    dominated = bool(np.all(pathloss_nlos_db(scan, consts) >= pathloss_los_db(scan, consts)))
    lb = link_budget(LinkGeometry.from_d2d(np.full(100_000, 300.0), 25.0, 1.5), consts, rng=rng)
    s_los, s_nlos = float(np.std(lb.shadow_los_db)), float(np.std(lb.shadow_nlos_db))
    ok = (los_probability(10.0) == 1.0 and abs(d_b - 400.28) <= 0.01 and dominated
          and abs(s_los - 4) <= 0.08 and abs(s_nlos - 6) <= 0.12)
    record("C7 channel units", ok,
           f"d_b {d_b:.3f} m, NLoS >= LoS over 10..5000 m: {dominated}, shadow std {s_los:.3f}/{s_nlos:.3f} dB")


def test_c8_orthogonality():
    rng = np.random.default_rng(8)

    def median_cross(n_a):
        return float(np.median([abs(np.vdot(sample_fading(n_a, rng).coefficients,
                                            sample_fading(n_a, rng).coefficients)) / n_a
                                for _ in range(500)]))

    small, large = median_cross(64), median_cross(4096)
    f = sample_fading(1024, rng).coefficients
    diag = float(np.vdot(f, f).real) / 1024
    record("C8 orthogonality", large < small and abs(diag - 1) <= 0.1,
           f"median cross term {small:.4f} at 64 vs {large:.4f} at 4096, diagonal {diag:.4f}")


def test_c9_performance(alpha_sweep):
    sc = build_default_scenario(alpha=0.5, seed=0)
    snap = draw_channel(sc)
    start = time.perf_counter()
    proposed_cs(sc, snap)
    solve = time.perf_counter() - start
    _, sweep = alpha_sweep
    record("C9 performance", solve < 1.0 and sweep < 300,
           f"one proposed solve {solve * 1000:.1f} ms, full alpha sweep {sweep:.1f} s")
