"""EARTH-style base-station power accounting.

Active BS: ``P_O + eta * load * P_T``; sleeping BS: ``P_S``. The macro
cell never sleeps.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError


class BSKind(str, Enum):
    MACRO = "macro"
    RRH = "rrh"
    MICRO = "micro"
    PICO = "pico"
    FEMTO = "femto"


@dataclass(frozen=True)
class BaseStationProfile:
    kind: BSKind
    eta: float   # PA efficiency factor
    p_t: float   # W, transmit power
    p_o: float   # W, operational circuit power
    p_s: float   # W, sleep power

    def __post_init__(self):
        if not self.p_o > self.p_s > 0:
            raise DomainError(f"{self.kind.value}: need p_o > p_s > 0")
        if self.eta <= 0 or self.p_t <= 0:
            raise DomainError(f"{self.kind.value}: eta and p_t must be positive")


# Table of per-type power profiles (EARTH figures).
DEFAULT_PROFILES = {
    BSKind.MACRO: BaseStationProfile(BSKind.MACRO, eta=4.7, p_t=20.0, p_o=130.0, p_s=75.0),
    BSKind.RRH: BaseStationProfile(BSKind.RRH, eta=2.8, p_t=20.0, p_o=84.0, p_s=56.0),
    BSKind.MICRO: BaseStationProfile(BSKind.MICRO, eta=2.6, p_t=6.3, p_o=56.0, p_s=39.0),
    BSKind.PICO: BaseStationProfile(BSKind.PICO, eta=4.0, p_t=0.13, p_o=6.8, p_s=4.3),
    BSKind.FEMTO: BaseStationProfile(BSKind.FEMTO, eta=8.0, p_t=0.05, p_o=4.8, p_s=2.9),
}


@dataclass(frozen=True)
class LoadVector:
    lambda_sbs: np.ndarray
    lambda_mbs: float

    def __post_init__(self):
        lam = np.asarray(self.lambda_sbs, dtype=float)
        if np.any(lam < 0) or np.any(lam > 1):
            raise DomainError("SBS load factors must lie in [0, 1]")
        if not 0.0 <= self.lambda_mbs <= 1.0:
            raise DomainError(f"MBS load {self.lambda_mbs!r} outside [0, 1]")
        object.__setattr__(self, "lambda_sbs", lam)


def bs_power_w(profile, load, active=True):
    if not 0.0 <= load <= 1.0:
        raise DomainError(f"load {load!r} outside [0, 1]")
    if not active:
        return profile.p_s
    return profile.p_o + profile.eta * load * profile.p_t


def profile_arrays(profiles):
    """Stack per-SBS profiles into ``(eta, p_t, p_o, p_s)`` arrays."""
    eta = np.array([p.eta for p in profiles], dtype=float)
    p_t = np.array([p.p_t for p in profiles], dtype=float)
    p_o = np.array([p.p_o for p in profiles], dtype=float)
    p_s = np.array([p.p_s for p in profiles], dtype=float)
    return eta, p_t, p_o, p_s


def network_power_w(delta, loads, profiles, mbs_profile=DEFAULT_PROFILES[BSKind.MACRO]):
    """Total instantaneous power of the MBS plus all SBSs.

    ``loads.lambda_mbs`` must already include any traffic offloaded from
    sleeping SBSs (see :func:`mbs_load`).
    """
    delta = np.asarray(delta)
    if delta.shape != (len(profiles),) or loads.lambda_sbs.shape != delta.shape:
        raise DomainError(
            f"dimension mismatch: delta {delta.shape}, loads {loads.lambda_sbs.shape}, "
            f"{len(profiles)} profiles")
    on = delta.astype(bool)
    eta, p_t, p_o, p_s = profile_arrays(profiles)
    per_sbs = np.where(on, p_o + eta * loads.lambda_sbs * p_t, p_s)
    return bs_power_w(mbs_profile, loads.lambda_mbs, active=True) + float(per_sbs.sum())


def mbs_load(delta, lambda_m0, lambda_sbs, phi):
    """MBS load after absorbing every sleeping SBS's traffic.

    Each offloaded SBS adds ``lambda_j * phi_j`` where ``phi_j = C_j / C_M``.
    The result may exceed 1; callers decide whether that is feasible.
    """
    phi = np.broadcast_to(np.asarray(phi, dtype=float), np.shape(lambda_sbs))
    if np.any(phi <= 0):
        raise DomainError("capacity ratios must be positive")
    if not 0.0 <= lambda_m0 <= 1.0:
        raise DomainError(f"initial MBS load {lambda_m0!r} outside [0, 1]")
    off = ~np.asarray(delta).astype(bool)
    added = np.asarray(lambda_sbs, dtype=float)[off] * phi[off]
    return math.fsum([lambda_m0, *added])
