"""Two-mode (LOS/NLOS) path loss and normalized Nakagami fading.

A link is line-of-sight with a distance-dependent probability of the
urban-micro form ``min(D0/r, 1)(1 - e^{-r/D1}) + e^{-r/D1}``; each mode has
its own bounded power-law attenuation ``intercept / (1 + r)^alpha`` and its
own integer Nakagami parameter. Fading power gains are Gamma(M, 1/M), i.e.
normalized to unit mean. Distances are meters; gains are unitless.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LOS",
    "NLOS",
    "TierRadioParams",
    "LinkSample",
    "los_probability",
    "path_loss",
    "sample_fading",
    "sample_link",
    "sample_links",
]

LOS = "LOS"
NLOS = "NLOS"


def _check_positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ValueError(f"{name} must be a positive integer")


@dataclass(frozen=True)
class TierRadioParams:
    """Radio constants of one tier's base stations."""

    tx_power: float
    pathloss_exp_los: float
    pathloss_exp_nlos: float
    near_field_dist: float
    far_field_dist: float
    sir_threshold: float
    intercept_los: float = 1.0
    intercept_nlos: float = 1.0
    nakagami_los: int = 2
    nakagami_nlos: int = 1

    def __post_init__(self):
        if not self.tx_power > 0:
            raise ValueError("tx_power must be positive")
        if not 2.0 < self.pathloss_exp_los:
            raise ValueError("pathloss_exp_los must exceed 2")
        if not self.pathloss_exp_los < self.pathloss_exp_nlos:
            raise ValueError("pathloss_exp_nlos must exceed pathloss_exp_los")
        if not self.pathloss_exp_nlos <= 8.0:
            raise ValueError("pathloss_exp_nlos must not exceed 8")
        if not (self.near_field_dist > 0 and self.far_field_dist > 0):
            raise ValueError("critical distances must be positive")
        if not self.sir_threshold > 0:
            raise ValueError("sir_threshold must be positive")
        if not (self.intercept_los > 0 and self.intercept_nlos > 0):
            raise ValueError("intercepts must be positive")
        _check_positive_int("nakagami_los", self.nakagami_los)
        _check_positive_int("nakagami_nlos", self.nakagami_nlos)
        if self.nakagami_los < self.nakagami_nlos:
            raise ValueError("nakagami_los must be >= nakagami_nlos")

    def pathloss_exponent(self, mode: str) -> float:
        return self.pathloss_exp_los if mode == LOS else self.pathloss_exp_nlos

    def intercept(self, mode: str) -> float:
        return self.intercept_los if mode == LOS else self.intercept_nlos

    def nakagami(self, mode: str) -> int:
        return self.nakagami_los if mode == LOS else self.nakagami_nlos


@dataclass(frozen=True)
class LinkSample:
    """One realized link: propagation mode, fading power gain, path loss."""

    mode: str
    fading_gain: float
    pathloss: float


def los_probability(r, near_field_dist: float, far_field_dist: float):
    """Probability that a link of length ``r`` is line-of-sight.

    Equals 1 for r <= near_field_dist and decays to 0 past far_field_dist.
    """
    r_arr = np.asarray(r, dtype=np.float64)
    if r_arr.size and np.any(r_arr < 0):
        raise ValueError("distance must be nonnegative")
    decay = np.exp(-r_arr / far_field_dist)
    safe_r = np.where(r_arr > 0, r_arr, 1.0)
    clamped = np.minimum(near_field_dist / safe_r, 1.0)
    p = np.where(r_arr <= near_field_dist, 1.0, clamped * (1.0 - decay) + decay)
    return float(p) if np.isscalar(r) else p


def path_loss(r, mode: str, params: TierRadioParams):
    """Attenuation ``intercept / (1 + r)^alpha`` for the given mode; finite at r=0."""
    r_arr = np.asarray(r, dtype=np.float64)
    if r_arr.size and np.any(r_arr < 0):
        raise ValueError("distance must be nonnegative")
    val = params.intercept(mode) * (1.0 + r_arr) ** -params.pathloss_exponent(mode)
    return float(val) if np.isscalar(r) else val


def sample_fading(rng: np.random.Generator, nakagami: int, size=None):
    """Unit-mean Nakagami power gain: Gamma(M, 1/M)."""
    _check_positive_int("nakagami", nakagami)
    return rng.gamma(nakagami, 1.0 / nakagami, size=size)


def sample_link(rng: np.random.Generator, r: float, params: TierRadioParams) -> LinkSample:
    """Draw mode, fading, and path loss for a link of length ``r``."""
    p_los = los_probability(r, params.near_field_dist, params.far_field_dist)
    mode = LOS if rng.random() < p_los else NLOS
    gain = float(sample_fading(rng, params.nakagami(mode)))
    return LinkSample(mode, gain, path_loss(r, mode, params))


def sample_links(rng: np.random.Generator, distances: np.ndarray,
                 params: TierRadioParams):
    """Vectorized link draw: ``(is_los, fading, pathloss)`` arrays.

    Draw order is fixed (modes, then LOS gains, then NLOS gains) so the
    stream consumption is reproducible for a given ``rng`` state.
    """
    n = len(distances)
    p_los = los_probability(distances, params.near_field_dist, params.far_field_dist)
    is_los = rng.random(n) < p_los
    fading = np.empty(n)
    n_los = int(np.count_nonzero(is_los))
    fading[is_los] = rng.gamma(params.nakagami_los, 1.0 / params.nakagami_los, n_los)
    fading[~is_los] = rng.gamma(params.nakagami_nlos, 1.0 / params.nakagami_nlos, n - n_los)
    pathloss = np.where(
        is_los,
        params.intercept_los * (1.0 + distances) ** -params.pathloss_exp_los,
        params.intercept_nlos * (1.0 + distances) ** -params.pathloss_exp_nlos,
    )
    return is_los, fading, pathloss
