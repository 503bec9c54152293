"""Exact cell-switching optimizer.

Once the per-SBS QoS test has fixed some SBSs ON, minimizing network power
under the MBS capacity limit is a 0/1 knapsack: every SBS that may sleep is
an item whose value is the power it saves (net of the extra MBS load power)
and whose weight is the MBS load it adds. See docs/knapsack_reduction.md.
"""

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InfeasibleError, InstanceTooLargeError, PreconditionError
from .power import LoadVector, mbs_load, network_power_w, profile_arrays
from .scenario import draw_channel

# Objective values closer than this (W) count as ties.
TIE_TOL = 1e-9
BRUTEFORCE_LIMIT = 20


@dataclass(frozen=True)
class SwitchInstance:
    saving: np.ndarray     # W saved by putting each SBS to sleep
    weight: np.ndarray     # MBS load added when it sleeps
    forced_on: np.ndarray  # QoS forbids sleeping
    capacity: float        # residual MBS load, 1 - lambda_m0
    base_power: float      # W with every SBS on
    lambda_m0: Optional[float] = None

    def __post_init__(self):
        saving = np.asarray(self.saving, dtype=float)
        weight = np.asarray(self.weight, dtype=float)
        forced = np.asarray(self.forced_on, dtype=bool)
        if not saving.shape == weight.shape == forced.shape or saving.ndim != 1:
            raise PreconditionError("saving, weight and forced_on must be 1-D of equal length")
        if np.any(weight < 0):
            raise PreconditionError("weights must be non-negative")
        if self.capacity > 1:
            raise PreconditionError("capacity cannot exceed 1")
        object.__setattr__(self, "saving", saving)
        object.__setattr__(self, "weight", weight)
        object.__setattr__(self, "forced_on", forced)
        if self.lambda_m0 is None:
            object.__setattr__(self, "lambda_m0", 1.0 - self.capacity)

    @property
    def n(self):
        return len(self.saving)

    def without_qos(self):
        return SwitchInstance(
            saving=self.saving, weight=self.weight, forced_on=np.zeros(self.n, dtype=bool),
            capacity=self.capacity, base_power=self.base_power, lambda_m0=self.lambda_m0)

    def mbs_load_after(self, off):
        return math.fsum([self.lambda_m0, *self.weight[list(off)]])

    def fits(self, off):
        return self.mbs_load_after(off) <= 1.0

    def feasible(self, off):
        off = list(off)
        return not self.forced_on[off].any() and self.fits(off)

    def objective(self, off):
        """Total power (W) with the SBSs in ``off`` asleep."""
        return self.base_power - math.fsum(self.saving[sorted(off)])

    def decision(self, off, method=""):
        off = sorted(off)
        delta = np.ones(self.n, dtype=np.int8)
        delta[off] = 0
        return SwitchDecision(
            delta=delta, total_power_w=self.objective(off),
            lambda_m=self.mbs_load_after(off), method=method)


@dataclass(frozen=True)
class SwitchDecision:
    delta: np.ndarray
    total_power_w: float
    lambda_m: float
    outage_sbs: frozenset = field(default_factory=frozenset)
    method: str = ""

    @property
    def off(self):
        return tuple(int(j) for j in np.flatnonzero(self.delta == 0))

    @property
    def n_off(self):
        return int(np.count_nonzero(self.delta == 0))


def _better(value, off, best_value, best_off):
    """Lower power wins; ties go to fewer SBSs off, then lowest indices off."""
    if best_off is None or value < best_value - TIE_TOL:
        return True
    if value > best_value + TIE_TOL:
        return False
    if len(off) != len(best_off):
        return len(off) < len(best_off)
    return tuple(sorted(off)) < tuple(sorted(best_off))


def _check_capacity(instance):
    if instance.lambda_m0 > 1.0:
        raise InfeasibleError(
            f"initial MBS load {instance.lambda_m0:g} exceeds 1; even all-ON violates the MBS limit")


def _fractional_bound(value, room, items, saving, weight, start):
    """LP relaxation bound on the extra saving obtainable from items[start:]."""
    bound = value
    for i in items[start:]:
        w = weight[i]
        if w <= room:
            room -= w
            bound += saving[i]
        else:
            return bound + saving[i] * room / w
    return bound


def solve_exact(instance, method="exact"):
    """Minimum-power decision by best-first branch and bound.

    Nodes are ranked by the fractional-knapsack bound; items are SBSs that
    may sleep (not forced on, positive saving, weight fits on its own).
    Zero-weight items are always taken.
    """
    _check_capacity(instance)
    saving, weight = instance.saving, instance.weight
    candidates = [j for j in range(instance.n)
                  if not instance.forced_on[j] and saving[j] > 0 and instance.fits([j])]
    free = [j for j in candidates if weight[j] == 0]
    with np.errstate(over="ignore"):
        items = sorted((j for j in candidates if weight[j] > 0),
                       key=lambda j: (-saving[j] / weight[j], j))

    best_off = None
    best_value = math.inf

    def consider(off):
        nonlocal best_off, best_value
        value = instance.objective(off)
        if _better(value, off, best_value, best_off):
            best_off, best_value = list(off), value

    # greedy incumbent
    greedy = list(free)
    for j in items:
        if instance.fits(greedy + [j]):
            greedy.append(j)
    consider(greedy)

    base_saving = math.fsum(saving[free])
    base_room = 1.0 - instance.mbs_load_after(free)
    counter = itertools.count()
    root_bound = _fractional_bound(base_saving, base_room, items, saving, weight, 0)
    heap = [(-root_bound, next(counter), 0, tuple(free), base_saving, base_room)]
    while heap:
        neg_bound, _, level, taken, value, room = heapq.heappop(heap)
        if instance.base_power - (-neg_bound) > best_value + TIE_TOL:
            continue
        consider(taken)
        if level == len(items):
            continue
        i = items[level]
        children = []
        if weight[i] <= room + 1e-12 and instance.fits(taken + (i,)):
            child = taken + (i,)
            child_room = 1.0 - instance.mbs_load_after(child)
            children.append((child, value + saving[i], child_room))
        children.append((taken, value, room))
        for off, v, r in children:
            bound = _fractional_bound(v, max(r, 0.0), items, saving, weight, level + 1)
            if instance.base_power - bound <= best_value + TIE_TOL:
                heapq.heappush(heap, (-bound, next(counter), level + 1, off, v, r))
    return instance.decision(best_off, method=method)


def solve_bruteforce(instance, method="bruteforce"):
    """Enumerate every switching vector; reference oracle for small instances."""
    if instance.n > BRUTEFORCE_LIMIT:
        raise InstanceTooLargeError(
            f"{instance.n} SBSs exceeds the brute-force limit of {BRUTEFORCE_LIMIT}")
    _check_capacity(instance)
    n = instance.n
    masks = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(bool)  # True = off
    masks = masks[~(masks & instance.forced_on).any(axis=1)]
    load = masks @ instance.weight
    # float screen with slack, exact check below
    masks = masks[instance.lambda_m0 + load <= 1.0 + 1e-9]
    approx = masks @ instance.saving
    best_off, best_value = None, math.inf
    for row in np.argsort(-approx, kind="stable"):
        if best_off is not None and approx[row] < instance.base_power - best_value - 1e-6:
            break
        off = np.flatnonzero(masks[row]).tolist()
        if not instance.fits(off):
            continue
        value = instance.objective(off)
        if _better(value, off, best_value, best_off):
            best_off, best_value = off, value
    return instance.decision(best_off, method=method)


def solve_dp(instance, resolution=1e-4, method="dp"):
    """Dynamic program over load discretized to ``resolution``.

    Weights are rounded up, so the result is always feasible but may be
    slightly suboptimal when weights are not multiples of ``resolution``.
    """
    _check_capacity(instance)
    room = 1.0 - instance.lambda_m0
    cap = int(math.floor(room / resolution + 1e-9))
    items = [j for j in range(instance.n) if not instance.forced_on[j] and instance.saving[j] > 0]
    w_int = [int(math.ceil(instance.weight[j] / resolution - 1e-9)) for j in items]
    best = np.zeros(cap + 1)
    keep = np.zeros((len(items), cap + 1), dtype=bool)
    for k, (j, w) in enumerate(zip(items, w_int)):
        if w > cap:
            continue
        cand = np.full(cap + 1, -np.inf)
        cand[w:] = best[: cap + 1 - w] + instance.saving[j]
        take = cand > best + 1e-12
        keep[k] = take
        best = np.where(take, cand, best)
    off, c = [], cap
    for k in range(len(items) - 1, -1, -1):
        if keep[k, c]:
            off.append(items[k])
            c -= w_int[k]
    while off and not instance.fits(off):
        # rounding guards make this unreachable in practice
        off.pop()
    return instance.decision(off, method=method)


def worst_user_rx_dbm(scenario, snapshot):
    """Lowest offload received power among each SBS's users (+inf if none)."""
    rx = np.asarray(snapshot.rx_dbm, dtype=float)
    if rx.shape != (len(scenario.users),) or np.isnan(rx).any():
        raise PreconditionError("channel snapshot must hold one received power per user")
    worst = np.full(scenario.n_sbs, np.inf)
    np.minimum.at(worst, scenario.users.home, rx)
    return worst


def build_instance(scenario, snapshot):
    lam = scenario.sbs_loads
    phi = scenario.phi
    eta, p_t, p_o, p_s = profile_arrays(scenario.sbs_profiles)
    macro = scenario.mbs.profile
    weight = lam * phi
    saving = (p_o + eta * lam * p_t - p_s) - macro.eta * macro.p_t * weight
    forced = worst_user_rx_dbm(scenario, snapshot) < scenario.p_min_dbm
    base = network_power_w(
        np.ones(scenario.n_sbs, dtype=np.int8), LoadVector(lam, scenario.lambda_m0),
        scenario.sbs_profiles, macro)
    return SwitchInstance(
        saving=saving, weight=weight, forced_on=forced,
        capacity=1.0 - scenario.lambda_m0, base_power=base, lambda_m0=scenario.lambda_m0)


def outage_set(scenario, snapshot, delta):
    """Sleeping SBSs with at least one user below the QoS threshold."""
    if snapshot is None:
        return frozenset()
    worst = worst_user_rx_dbm(scenario, snapshot)
    off = np.asarray(delta) == 0
    return frozenset(int(j) for j in np.flatnonzero(off & (worst < scenario.p_min_dbm)))


def evaluate_decision(scenario, snapshot, delta, method=""):
    """Recompute power, MBS load and outages of ``delta`` from the scenario."""
    delta = np.asarray(delta, dtype=np.int8)
    lam_m = mbs_load(delta, scenario.lambda_m0, scenario.sbs_loads, scenario.phi)
    if lam_m > 1.0:
        raise InfeasibleError(f"{method or 'decision'} overloads the MBS (load {lam_m:.6g})")
    power = network_power_w(
        delta, LoadVector(scenario.sbs_loads, lam_m), scenario.sbs_profiles, scenario.mbs.profile)
    return SwitchDecision(
        delta=delta, total_power_w=power, lambda_m=lam_m,
        outage_sbs=outage_set(scenario, snapshot, delta), method=method)


def proposed_cs(scenario, snapshot=None, rng=None, solver=solve_exact):
    """QoS-aware switching for one time step.

    Computes each user's offload received power, forces ON every SBS with a
    user below ``p_min``, solves the remaining knapsack exactly and sleeps
    the chosen SBSs. ``snapshot`` defaults to a fresh draw from ``rng`` (or
    the scenario's own step-0 stream).
    """
    if snapshot is None:
        snapshot = draw_channel(scenario, rng=rng)
    instance = build_instance(scenario, snapshot)
    solution = solver(instance)
    decision = evaluate_decision(scenario, snapshot, solution.delta, method="proposed")
    assert not decision.outage_sbs, "QoS forcing let an outage through"
    return decision


def run_steps(scenario, steps, method):
    """Apply ``method(scenario, snapshot)`` to ``steps`` fresh channel draws."""
    return [method(scenario, draw_channel(scenario, step=t)) for t in range(steps)]
