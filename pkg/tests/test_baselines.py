import dataclasses

import numpy as np
import pytest

from hetnet_cs.baselines import all_on, cs_no_qos, sorting_cs
from hetnet_cs.optimizer import build_instance, proposed_cs, solve_bruteforce
from hetnet_cs.scenario import ScenarioConfig, build_default_scenario, build_scenario, draw_channel


def with_loads(scenario, loads):
    sbs = tuple(dataclasses.replace(c, load=float(l)) for c, l in zip(scenario.sbs, loads))
    return dataclasses.replace(scenario, sbs=sbs)


def row_of(n, lambda_m0=0.2, p_min_dbm=-200.0):
    cfg = ScenarioConfig(lambda_m0=lambda_m0, p_min_dbm=p_min_dbm)
    return build_scenario(cfg, layout=lambda area, k: np.array([[900.0 + 60 * i, 1000.0] for i in range(n)]))


class TestAllOn:
    def test_mbs_keeps_initial_load(self, scenario, snapshot):
        d = all_on(scenario, snapshot)
        assert d.lambda_m == scenario.lambda_m0
        assert d.n_off == 0
        assert not d.outage_sbs

    def test_zero_load_topology(self):
        sc = build_default_scenario(traffic_mean_m=(1000.0, 1000.0 + 1000.0 / 7),
                                    traffic_sigma_m=(1.0, 1.0), lambda_m0=0.0)
        assert all_on(sc).total_power_w == pytest.approx(2005.2, abs=1e-9)


class TestSorting:
    def test_equal_loads_go_off_by_index(self):
        sc = with_loads(row_of(4, lambda_m0=0.9), [0.2] * 4)
        # each SBS adds 0.05 to the MBS: exactly two fit in 0.1
        d = sorting_cs(sc)
        assert d.delta.tolist() == [0, 0, 1, 1]

    def test_full_mbs_keeps_everything_on(self):
        sc = with_loads(row_of(3, lambda_m0=1.0), [0.1, 0.5, 0.9])
        assert sorting_cs(sc).n_off == 0

    def test_mixed_loads_capacity_for_two(self):
        sc = with_loads(row_of(3, lambda_m0=0.8), [0.9, 0.1, 0.5])
        d = sorting_cs(sc)
        assert d.delta.tolist() == [1, 0, 0]
        assert d.lambda_m == pytest.approx(0.8 + 0.25 * 0.6, abs=1e-15)

    def test_stops_at_first_misfit(self):
        # after 0.1 and 0.5 the 0.6 SBS overflows; the scan stops there
        sc = with_loads(row_of(4, lambda_m0=0.8), [0.1, 0.5, 0.6, 0.6])
        assert sorting_cs(sc).delta.tolist() == [0, 0, 1, 1]

    @pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
    def test_never_overloads_mbs(self, alpha):
        for seed in range(5):
            assert sorting_cs(build_default_scenario(alpha=alpha, seed=seed)).lambda_m <= 1.0


class TestNoQos:
    def test_relaxation_bound(self, scenario, snapshot):
        assert cs_no_qos(scenario, snapshot).total_power_w <= proposed_cs(scenario, snapshot).total_power_w

    def test_dominates_sorting(self):
        for alpha in (0.1, 0.5, 0.9):
            for seed in range(5):
                sc = build_default_scenario(alpha=alpha, seed=seed)
                snap = draw_channel(sc)
                assert cs_no_qos(sc, snap).total_power_w <= sorting_cs(sc, snap).total_power_w

    def test_matches_bruteforce_with_forcing_cleared(self):
        sc = build_scenario(ScenarioConfig(seed=4, p_min_dbm=-60.0),
                            layout=lambda area, n: np.array([[300.0 + 100 * i, 1000.0] for i in range(14)]))
        snap = draw_channel(sc)
        oracle = solve_bruteforce(build_instance(sc, snap).without_qos())
        assert cs_no_qos(sc, snap).total_power_w == pytest.approx(oracle.total_power_w, abs=1e-9)
        assert cs_no_qos(sc, snap).delta.tolist() == oracle.delta.tolist()


def test_all_on_is_most_expensive_and_outage_free(scenario, snapshot):
    reference = all_on(scenario, snapshot)
    for method in (sorting_cs, cs_no_qos, proposed_cs):
        assert method(scenario, snapshot).total_power_w <= reference.total_power_w
