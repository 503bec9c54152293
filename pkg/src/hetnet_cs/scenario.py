"""Simulated world: topology, traffic field, users and channel snapshots."""

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .channel import (
    MODES,
    ChannelConstants,
    LinkBudget,
    LinkGeometry,
    link_budget,
    mbs_offload_rx_power_dbm,
    received_power_dbm,
)
from .errors import ConfigError, DomainError
from .power import DEFAULT_PROFILES, BaseStationProfile, BSKind
from .units import w_to_dbm

# spawn-key namespaces under the scenario seed
_USERS_STREAM = 0
_CHANNEL_STREAM = 1


@dataclass(frozen=True)
class ScenarioConfig:
    """Every tunable of a scenario. JSON keys match the field names."""

    alpha: float = 0.5
    p_min_dbm: float = -70.0
    seed: int = 0
    users_per_sbs: int = 3

    area_m: float = 2000.0
    grid_size: int = 7
    sbs_radius_m: float = 50.0
    sbs_kinds: tuple = ("micro", "rrh", "pico", "femto")
    sbs_capacity: float = 5.0
    mbs_capacity: float = 20.0

    f_c_ghz: float = 2.5
    speed_of_light: float = 299_792_458.0
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 6.0
    pathloss_mode: str = "expected"

    h_mbs_m: float = 25.0
    h_sbs_m: float = 10.0
    h_ue_m: float = 1.5
    h_env_m: float = 1.0
    mbs_tx_dbm: float = 43.0
    mbs_gain_dbi: float = 8.0
    sbs_gain_dbi: float = 0.0
    ue_gain_dbi: float = 0.0

    traffic_mean_m: Optional[tuple] = None  # None: area centre
    traffic_sigma_m: tuple = (600.0, 600.0)
    lambda_m0: float = 0.2
    u_m: Optional[int] = None  # None: MBS capacity
    n_a: int = 128

    # kind name -> {"eta", "p_t", "p_o", "p_s"}; merged over the defaults
    profiles: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.users_per_sbs < 1:
            raise ConfigError("users_per_sbs must be at least 1")
        if self.grid_size < 1:
            raise ConfigError("grid_size must be at least 1")
        if not 0.0 <= self.lambda_m0 <= 1.0:
            raise ConfigError("lambda_m0 must lie in [0, 1]")
        if min(self.traffic_sigma_m) <= 0:
            raise ConfigError("traffic spread must be positive")
        if self.pathloss_mode not in MODES:
            raise ConfigError(f"pathloss_mode must be one of {MODES}")
        unknown = set(self.sbs_kinds) | set(self.profiles)
        unknown -= {k.value for k in BSKind}
        if unknown:
            raise ConfigError(f"unknown BS kinds: {sorted(unknown)}")
        for name in ("sbs_kinds", "traffic_sigma_m", "traffic_mean_m"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return dataclasses.asdict(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def profile(self, kind):
        kind = BSKind(kind)
        base = DEFAULT_PROFILES[kind]
        override = self.profiles.get(kind.value)
        if not override:
            return base
        return dataclasses.replace(base, **override)


@dataclass(frozen=True)
class TrafficField:
    mean: tuple
    sigma: tuple  # per-axis standard deviation, m
    alpha: float

    def __post_init__(self):
        if min(self.sigma) <= 0:
            raise DomainError("traffic spread must be positive")

    @property
    def variance(self):
        return (self.sigma[0] ** 2, self.sigma[1] ** 2)


def gaussian_load(position, field):
    """Load factor of a cell at ``position`` (or an (n, 2) array of them)."""
    p = np.asarray(position, dtype=float)
    dx = p[..., 0] - field.mean[0]
    dy = p[..., 1] - field.mean[1]
    vx, vy = field.variance
    lam = field.alpha * np.exp(-(dx**2 / (2.0 * vx) + dy**2 / (2.0 * vy)))
    return np.clip(lam, 0.0, 1.0)[()]


@dataclass(frozen=True)
class MacroCell:
    position: tuple
    profile: BaseStationProfile
    height: float
    gain_dbi: float
    capacity: float


@dataclass(frozen=True)
class SmallCell:
    index: int
    position: tuple
    kind: BSKind
    profile: BaseStationProfile
    radius: float
    capacity: float
    load: float


@dataclass(frozen=True)
class UserSet:
    positions: np.ndarray  # (n, 2) m
    home: np.ndarray       # (n,) SBS index
    load: np.ndarray       # (n,) share of the home SBS load

    def __len__(self):
        return len(self.home)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    mbs: MacroCell
    sbs: tuple
    users: UserSet
    consts: ChannelConstants
    traffic: TrafficField

    @property
    def seed(self):
        return self.config.seed

    @property
    def alpha(self):
        return self.config.alpha

    @property
    def p_min_dbm(self):
        return self.config.p_min_dbm

    @property
    def lambda_m0(self):
        return self.config.lambda_m0

    @property
    def n_a(self):
        return self.config.n_a

    @property
    def u_m(self):
        return self.config.u_m if self.config.u_m is not None else int(self.mbs.capacity)

    @property
    def area(self):
        return self.config.area_m

    @property
    def n_sbs(self):
        return len(self.sbs)

    @property
    def sbs_loads(self):
        return np.array([c.load for c in self.sbs])

    @property
    def sbs_profiles(self):
        return [c.profile for c in self.sbs]

    @property
    def phi(self):
        """Capacity ratios C_j / C_M."""
        return np.array([c.capacity for c in self.sbs]) / self.mbs.capacity

    def with_p_min(self, p_min_dbm):
        """Same world with another QoS threshold; geometry is untouched."""
        return dataclasses.replace(self, config=self.config.replace(p_min_dbm=p_min_dbm))

    def channel_rng(self, step=0):
        seq = np.random.SeedSequence(self.config.seed, spawn_key=(_CHANNEL_STREAM, step))
        return np.random.default_rng(seq)

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "mbs": {
                "position": list(self.mbs.position),
                "profile": _profile_dict(self.mbs.profile),
                "height": self.mbs.height,
                "gain_dbi": self.mbs.gain_dbi,
                "capacity": self.mbs.capacity,
            },
            "sbs": [
                {
                    "index": c.index,
                    "position": list(c.position),
                    "kind": c.kind.value,
                    "profile": _profile_dict(c.profile),
                    "radius": c.radius,
                    "capacity": c.capacity,
                    "load": c.load,
                }
                for c in self.sbs
            ],
            "users": {
                "positions": self.users.positions.tolist(),
                "home": self.users.home.tolist(),
                "load": self.users.load.tolist(),
            },
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _profile_dict(p):
    return {"kind": p.kind.value, "eta": p.eta, "p_t": p.p_t, "p_o": p.p_o, "p_s": p.p_s}


def grid_layout(area, n):
    """``n x n`` cell centres, evenly spaced and centred in the square."""
    spacing = area / n
    coords = (np.arange(n) + 0.5) * spacing
    xx, yy = np.meshgrid(coords, coords, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


def place_users(scenario, users_per_sbs, rng):
    """Drop users uniformly inside every SBS disc by rejection sampling.

    Each SBS load is split equally among its users.
    """
    if users_per_sbs < 1:
        raise DomainError("users_per_sbs must be at least 1")
    positions, home, load = [], [], []
    for cell in scenario.sbs:
        accepted = np.empty((0, 2))
        while len(accepted) < users_per_sbs:
            cand = rng.uniform(-cell.radius, cell.radius, size=(2 * users_per_sbs, 2))
            inside = np.hypot(cand[:, 0], cand[:, 1]) <= cell.radius
            accepted = np.vstack([accepted, cand[inside]])
        positions.append(accepted[:users_per_sbs] + np.asarray(cell.position))
        home.extend([cell.index] * users_per_sbs)
        load.extend([cell.load / users_per_sbs] * users_per_sbs)
    return UserSet(
        positions=_frozen(np.vstack(positions)),
        home=_frozen(home, dtype=int),
        load=_frozen(load),
    )


def build_scenario(config, layout: Optional[Callable] = None):
    """Build a scenario from a config.

    ``layout(area, grid_size)`` may replace the default square grid; it must
    return an ``(s, 2)`` array of SBS positions.
    """
    area = config.area_m
    centre = (area / 2.0, area / 2.0)
    mean = tuple(config.traffic_mean_m) if config.traffic_mean_m is not None else centre
    traffic = TrafficField(mean=mean, sigma=tuple(config.traffic_sigma_m), alpha=config.alpha)
    consts = ChannelConstants(
        f_c=config.f_c_ghz, c=config.speed_of_light,
        sigma_los_db=config.sigma_los_db, sigma_nlos_db=config.sigma_nlos_db)

    mbs = MacroCell(
        position=mean,
        profile=config.profile(BSKind.MACRO),
        height=config.h_mbs_m,
        gain_dbi=config.mbs_gain_dbi,
        capacity=config.mbs_capacity,
    )

    xy = grid_layout(area, config.grid_size) if layout is None else np.asarray(layout(area, config.grid_size))
    loads = gaussian_load(xy, traffic)
    kinds = [BSKind(config.sbs_kinds[j % len(config.sbs_kinds)]) for j in range(len(xy))]
    sbs = tuple(
        SmallCell(
            index=j,
            position=(float(xy[j, 0]), float(xy[j, 1])),
            kind=kinds[j],
            profile=config.profile(kinds[j]),
            radius=config.sbs_radius_m,
            capacity=config.sbs_capacity,
            load=float(loads[j]),
        )
        for j in range(len(xy))
    )
    empty = UserSet(positions=_frozen(np.empty((0, 2))), home=_frozen([], dtype=int), load=_frozen([]))
    scenario = Scenario(config=config, mbs=mbs, sbs=sbs, users=empty, consts=consts, traffic=traffic)
    seq = np.random.SeedSequence(config.seed, spawn_key=(_USERS_STREAM,))
    users = place_users(scenario, config.users_per_sbs, np.random.default_rng(seq))
    return dataclasses.replace(scenario, users=users)


def build_default_scenario(alpha=0.5, p_min_dbm=-70.0, seed=0, **overrides):
    return build_scenario(ScenarioConfig(alpha=alpha, p_min_dbm=p_min_dbm, seed=seed, **overrides))


def load_config(path=None, env_var="HETNET_CS_CONFIG"):
    """Config from ``path``, else from the file named by ``$HETNET_CS_CONFIG``,
    else the built-in defaults."""
    import os

    path = path or os.environ.get(env_var)
    if not path:
        return ScenarioConfig()
    if not Path(path).is_file():
        raise ConfigError(f"config file not found: {path}")
    return ScenarioConfig.from_json(path)


@dataclass(frozen=True)
class ChannelSnapshot:
    """Link state of every user for one time step.

    ``rx_dbm`` is the asymptotic power each user would get from the MBS if
    its SBS slept; it drives the QoS test. ``mbs_link_rx_dbm`` and
    ``sbs_link_rx_dbm`` are plain link budgets (transmit power plus gains
    minus path loss) towards the MBS and the home SBS.
    """

    step: int
    budget: LinkBudget
    rx_dbm: np.ndarray
    mbs_link_rx_dbm: np.ndarray
    sbs_link_rx_dbm: np.ndarray


def draw_channel(scenario, step=0, rng=None):
    """Draw shadowing (and, in sampled mode, link states) for every user link.

    One snapshot is meant to be shared by every method compared at this step.
    """
    rng = scenario.channel_rng(step) if rng is None else rng
    cfg = scenario.config
    geom = LinkGeometry.from_positions(
        scenario.mbs.position, scenario.users.positions, cfg.h_mbs_m, cfg.h_ue_m, cfg.h_env_m)
    budget = link_budget(geom, scenario.consts, mode=cfg.pathloss_mode, rng=rng)
    pl = np.atleast_1d(budget.pl_db)
    rx = mbs_offload_rx_power_dbm(scenario.mbs.profile.p_t, scenario.u_m, pl)
    mbs_link = received_power_dbm(cfg.mbs_tx_dbm, cfg.mbs_gain_dbi, cfg.ue_gain_dbi, pl)

    home = scenario.users.home
    home_xy = np.array([scenario.sbs[h].position for h in home]).reshape(-1, 2)
    delta = scenario.users.positions - home_xy
    sbs_geom = LinkGeometry.from_d2d(np.hypot(delta[:, 0], delta[:, 1]), cfg.h_sbs_m, cfg.h_ue_m, cfg.h_env_m)
    sbs_pl = np.atleast_1d(link_budget(sbs_geom, scenario.consts, mode=cfg.pathloss_mode, rng=rng).pl_db)
    sbs_tx = np.array([w_to_dbm(scenario.sbs[h].profile.p_t) for h in home])
    sbs_link = received_power_dbm(sbs_tx, cfg.sbs_gain_dbi, cfg.ue_gain_dbi, sbs_pl)
    return ChannelSnapshot(
        step=step, budget=budget, rx_dbm=_frozen(np.atleast_1d(rx)),
        mbs_link_rx_dbm=_frozen(mbs_link), sbs_link_rx_dbm=_frozen(sbs_link))
