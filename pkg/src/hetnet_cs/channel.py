"""Urban macro path loss (3GPP style) and MBS offload received power.

All path-loss functions broadcast over numpy arrays, so one call can cover
every MBS-user link of a scenario. Scalars in, numpy scalars out.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .units import db_to_linear, linear_to_db, w_to_dbm

SPEED_OF_LIGHT = 299_792_458.0  # m/s

MIN_D2D = 10.0    # m, shorter links are clamped up to this
MAX_D2D = 5000.0  # m, longer links are rejected
LOS_RADIUS = 18.0  # m, LoS is certain inside this

MODES = ("expected", "sampled")


@dataclass(frozen=True)
class LinkGeometry:
    """Geometry of one BS-user link (or a broadcastable batch of links).

    Heights are in metres; ``h_e`` is the effective environment height.
    """

    d2d: float
    d3d: float
    h_b: float
    h_u: float
    h_e: float = 1.0

    def __post_init__(self):
        d2d = np.asarray(self.d2d, dtype=float)
        d3d = np.asarray(self.d3d, dtype=float)
        if np.any(d2d < 0):
            raise DomainError("2D distance must be non-negative")
        if not np.all(np.asarray(self.h_b) > np.asarray(self.h_u)) or not np.all(np.asarray(self.h_u) > 0):
            raise DomainError("heights must satisfy h_b > h_u > 0")
        expected = np.hypot(d2d, np.asarray(self.h_b) - np.asarray(self.h_u))
        if not np.allclose(d3d, expected, rtol=1e-9, atol=0.0):
            raise DomainError("d3d inconsistent with d2d and antenna heights")

    @classmethod
    def from_d2d(cls, d2d, h_b, h_u, h_e=1.0):
        d2d = np.asarray(d2d, dtype=float)
        if np.any(d2d < 0):
            raise DomainError("2D distance must be non-negative")
        return cls(d2d=d2d, d3d=np.hypot(d2d, h_b - h_u), h_b=h_b, h_u=h_u, h_e=h_e)

    @classmethod
    def from_d3d(cls, d3d, h_b, h_u, h_e=1.0):
        dh = h_b - h_u
        if np.any(np.asarray(d3d) < dh):
            raise DomainError("3D distance shorter than the height difference")
        d2d = np.sqrt(np.asarray(d3d, dtype=float) ** 2 - dh**2)
        return cls(d2d=d2d, d3d=np.asarray(d3d, dtype=float), h_b=h_b, h_u=h_u, h_e=h_e)

    @classmethod
    def from_positions(cls, bs_xy, ue_xy, h_b, h_u, h_e=1.0):
        """Geometry from 2D coordinates; ``ue_xy`` may be an (n, 2) array."""
        delta = np.asarray(ue_xy, dtype=float) - np.asarray(bs_xy, dtype=float)
        return cls.from_d2d(np.hypot(delta[..., 0], delta[..., 1]), h_b, h_u, h_e)


@dataclass(frozen=True)
class ChannelConstants:
    f_c: float = 2.5               # GHz
    c: float = SPEED_OF_LIGHT      # m/s
    sigma_los_db: float = 4.0
    sigma_nlos_db: float = 6.0

    def __post_init__(self):
        if self.f_c <= 0 or self.c <= 0:
            raise DomainError("carrier frequency and speed of light must be positive")
        if self.sigma_los_db < 0 or self.sigma_nlos_db < 0:
            raise DomainError("shadow-fading std must be non-negative")


@dataclass(frozen=True)
class LinkBudget:
    geometry: LinkGeometry
    p_los: float
    pl_los_db: float
    pl_nlos_db: float
    pl_db: float
    shadow_los_db: float = 0.0
    shadow_nlos_db: float = 0.0


@dataclass(frozen=True)
class FadingVector:
    coefficients: np.ndarray

    @property
    def n_a(self):
        return self.coefficients.shape[-1]


def los_probability(d2d):
    """LoS probability for a 2D distance in metres.

    Uses ``18/d + exp(-d/63) * (1 - 18/d)`` beyond 18 m, clipped to [0, 1].
    """
    d = np.asarray(d2d, dtype=float)
    if np.any(d < 0):
        raise DomainError("2D distance must be non-negative")
    safe = np.maximum(d, LOS_RADIUS)
    far = LOS_RADIUS / safe + np.exp(-safe / 63.0) * (1.0 - LOS_RADIUS / safe)
    p = np.where(d <= LOS_RADIUS, 1.0, far)
    return np.clip(p, 0.0, 1.0)[()]


def breakpoint_distance(h_b, h_u, h_e=1.0, f_c=2.5, c=SPEED_OF_LIGHT):
    """Breakpoint distance in metres; ``f_c`` in GHz."""
    hb_eff = np.asarray(h_b, dtype=float) - h_e
    hu_eff = np.asarray(h_u, dtype=float) - h_e
    if np.any(hb_eff <= 0) or np.any(hu_eff <= 0):
        raise DomainError("effective antenna heights must be positive")
    return (4.0 * hb_eff * hu_eff * (f_c * 1e9) / c)[()]


def pl1_db(d3d, f_c):
    """LoS path loss below the breakpoint, without shadowing."""
    return 28.0 + 22.0 * np.log10(d3d) + 20.0 * np.log10(f_c)


def pl2_db(d3d, f_c, d_b, h_b, h_u):
    """LoS path loss beyond the breakpoint, without shadowing."""
    return (28.0 + 40.0 * np.log10(d3d) + 20.0 * np.log10(f_c)
            - 9.0 * np.log10(d_b**2 + (h_b - h_u) ** 2))


def nlos_hat_db(d3d, f_c, h_u):
    """Raw NLoS law, before the max() with the LoS loss."""
    return 13.54 + 39.08 * np.log10(d3d) + 20.0 * np.log10(f_c) - 0.6 * (h_u - 1.5)


def _valid_distances(geom):
    d2d = np.asarray(geom.d2d, dtype=float)
    if np.any(d2d > MAX_D2D):
        raise DomainError(f"2D distance beyond {MAX_D2D:g} m is outside the model range")
    if np.any(d2d < MIN_D2D):
        d2d = np.maximum(d2d, MIN_D2D)
        return d2d, np.hypot(d2d, geom.h_b - geom.h_u)
    return d2d, np.asarray(geom.d3d, dtype=float)


def pathloss_los_db(geom, consts, shadow_db=0.0):
    d2d, d3d = _valid_distances(geom)
    d_b = breakpoint_distance(geom.h_b, geom.h_u, geom.h_e, consts.f_c, consts.c)
    near = pl1_db(d3d, consts.f_c)
    far = pl2_db(d3d, consts.f_c, d_b, geom.h_b, geom.h_u)
    return (np.where(d2d <= d_b, near, far) + shadow_db)[()]


def pathloss_nlos_db(geom, consts, shadow_db=0.0):
    _, d3d = _valid_distances(geom)
    los = pathloss_los_db(geom, consts)
    return (np.maximum(los, nlos_hat_db(d3d, consts.f_c, geom.h_u)) + shadow_db)[()]


def draw_shadowing(consts, rng, shape=()):
    """Independent LoS and NLoS shadow draws (dB) for each link."""
    x_los = rng.normal(0.0, consts.sigma_los_db, size=shape)
    x_nlos = rng.normal(0.0, consts.sigma_nlos_db, size=shape)
    return x_los, x_nlos


def link_budget(geom, consts, mode="expected", rng=None, shadow=None):
    """Full path-loss decomposition for a link or batch of links.

    ``shadow`` is an optional ``(x_los, x_nlos)`` pair in dB. When it is
    omitted, shadowing is drawn from ``rng``; with no ``rng`` it is zero.
    In ``expected`` mode the total is the LoS-probability weighted mix of
    the two state losses in dB; ``sampled`` picks one state per link.
    """
    if mode not in MODES:
        raise ConfigError(f"unknown path-loss mode {mode!r}; expected one of {MODES}")
    shape = np.shape(geom.d2d)
    if shadow is None:
        if rng is None:
            shadow = (np.zeros(shape), np.zeros(shape))
        else:
            shadow = draw_shadowing(consts, rng, shape)
    x_los, x_nlos = (np.asarray(s, dtype=float) for s in shadow)

    p_los = los_probability(geom.d2d)
    pl_los = pathloss_los_db(geom, consts, x_los)
    pl_nlos = pathloss_nlos_db(geom, consts, x_nlos)
    if mode == "expected":
        total = p_los * pl_los + (1.0 - p_los) * pl_nlos
    else:
        if rng is None:
            raise ConfigError("sampled mode needs an rng for the LoS state draw")
        is_los = rng.random(size=shape) < p_los
        total = np.where(is_los, pl_los, pl_nlos)
    return LinkBudget(
        geometry=geom,
        p_los=p_los,
        pl_los_db=pl_los,
        pl_nlos_db=pl_nlos,
        pl_db=np.asarray(total)[()],
        shadow_los_db=x_los[()],
        shadow_nlos_db=x_nlos[()],
    )


def combined_pathloss_db(geom, consts, mode="expected", rng=None):
    return link_budget(geom, consts, mode=mode, rng=rng).pl_db


def received_power_dbm(p_t_dbm, g_t_dbi, g_r_dbi, pl_db):
    return p_t_dbm + g_t_dbi + g_r_dbi - pl_db


def mbs_offload_rx_power_mw(p_t_mbs_w, u_m, pl_linear):
    """Asymptotic matched-filter power at an offloaded user, in mW.

    The MBS power is split evenly across ``u_m`` supported users and
    attenuated by the large-scale loss only; small-scale fading averages
    out for a large array.
    """
    if np.any(np.asarray(u_m) < 1):
        raise DomainError("the MBS must support at least one user")
    pl = np.asarray(pl_linear, dtype=float)
    if np.any(pl <= 0):
        raise DomainError("linear path loss must be positive")
    return (p_t_mbs_w * 1000.0 / (u_m * pl))[()]


def mbs_offload_rx_power_dbm(p_t_mbs_w, u_m, pl_db):
    """Same quantity as :func:`mbs_offload_rx_power_mw`, evaluated in dB."""
    if np.any(np.asarray(u_m) < 1):
        raise DomainError("the MBS must support at least one user")
    return (w_to_dbm(p_t_mbs_w) - linear_to_db(u_m) - np.asarray(pl_db, dtype=float))[()]


def sample_fading(n_a, rng, size=None):
    """Rayleigh fading vector(s): unit-variance circular complex Gaussian.

    With ``size`` set, returns a ``(size, n_a)`` batch inside one
    FadingVector.
    """
    if n_a < 1:
        raise DomainError("antenna count must be at least 1")
    shape = (n_a,) if size is None else (size, n_a)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return FadingVector(coefficients=z / np.sqrt(2.0))


def matched_filter_powers(n_a, u_m, p_t_w, pl_linear, rng):
    """Monte Carlo received powers (W) under matched-filter precoding.

    Draws ``u_m`` fading vectors of length ``n_a``, precodes every stream
    with ``f_i / n_a`` at power ``p_t_w / u_m`` and returns
    ``(desired, interference)`` for user 0. As ``n_a`` grows the desired
    power tends to ``p_t_w / (u_m * pl_linear)`` and interference to zero.
    """
    f = sample_fading(n_a, rng, size=u_m).coefficients
    h0 = f[0] / np.sqrt(pl_linear)
    gains = np.abs(f.conj() @ h0 / n_a) ** 2
    per_stream = p_t_w / u_m
    return float(gains[0] * per_stream), float(gains[1:].sum() * per_stream)


def pathloss_linear(pl_db):
    return db_to_linear(pl_db)
