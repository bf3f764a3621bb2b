"""Zipf content popularity and probabilistic per-station cache placement.

A library of equally sized files is ranked by popularity; request
probabilities follow a Zipf law. Each base station of a tier fills its
cache either with the most popular prefix (MPC) or with a contiguous
window of the ranking placed uniformly at random (RCS); the tier's
``mpc_fraction`` is the probability of picking MPC. The closed-form
per-content caching probability drives the analytic engine, the sampler
realizes placements for the Monte Carlo engine.

Content ranks are 1-based throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ContentModel",
    "TierCachePolicy",
    "PlacementRealization",
    "MPC",
    "RCS",
    "zipf_pmf",
    "cache_probability",
    "cache_probability_vector",
    "sample_placement",
    "sample_placement_fields",
    "placement_contains",
]

MPC = "MPC"
RCS = "RCS"


@dataclass(frozen=True)
class ContentModel:
    """Zipf-popular library of ``library_size`` equal-size files."""

    library_size: int
    popularity_exponent: float = 1.0

    def __post_init__(self):
        if not isinstance(self.library_size, (int, np.integer)) or self.library_size < 1:
            raise ValueError("library_size must be a positive integer")
        if not self.popularity_exponent >= 0:
            raise ValueError("popularity_exponent must be >= 0")

    def request_probabilities(self) -> np.ndarray:
        """Request probability for every rank 1..F; sums to 1."""
        ranks = np.arange(1, self.library_size + 1, dtype=np.float64)
        weights = ranks ** -float(self.popularity_exponent)
        return weights / weights.sum()


@dataclass(frozen=True)
class TierCachePolicy:
    """Per-tier cache: ``cache_size`` slots, MPC picked w.p. ``mpc_fraction``."""

    cache_size: int
    mpc_fraction: float = 1.0

    def __post_init__(self):
        if not isinstance(self.cache_size, (int, np.integer)) or self.cache_size < 0:
            raise ValueError("cache_size must be a nonnegative integer")
        if not 0.0 <= self.mpc_fraction <= 1.0:
            raise ValueError("mpc_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class PlacementRealization:
    """Concrete cache content of one base station."""

    cached_indices: frozenset
    strategy_label: str

    def __post_init__(self):
        if self.strategy_label not in (MPC, RCS):
            raise ValueError("strategy_label must be MPC or RCS")


def zipf_pmf(c, model: ContentModel):
    """Probability that content rank ``c`` is requested.

    ``c`` may be a scalar or an array of ranks in [1, F].
    """
    c_arr = np.asarray(c)
    if c_arr.size and (np.any(c_arr < 1) or np.any(c_arr > model.library_size)):
        raise ValueError(f"content rank out of range [1, {model.library_size}]")
    probs = model.request_probabilities()[c_arr - 1]
    return float(probs) if np.isscalar(c) else probs


def cache_probability(c: int, policy: TierCachePolicy, library_size: int) -> float:
    """Probability that rank ``c`` sits in one station's cache.

    MPC contributes 1 for c <= S; RCS contributes (number of length-S
    windows containing c) / (F - S + 1). A size-S cache stores the window
    {start, ..., start + S - 1}, so the probabilities sum to S over c.
    """
    if not 1 <= c <= library_size:
        raise ValueError(f"content rank out of range [1, {library_size}]")
    s = policy.cache_size
    if s > library_size:
        raise ValueError("cache_size exceeds library_size")
    if s == 0:
        return 0.0
    n_windows = library_size - s + 1
    count = min(c, n_windows) - max(1, c - s + 1) + 1
    rcs = count / n_windows
    mpc = 1.0 if c <= s else 0.0
    return policy.mpc_fraction * mpc + (1.0 - policy.mpc_fraction) * rcs


def cache_probability_vector(policy: TierCachePolicy, library_size: int) -> np.ndarray:
    """Caching probability for every rank 1..F at once."""
    s = policy.cache_size
    if s > library_size:
        raise ValueError("cache_size exceeds library_size")
    if s == 0:
        return np.zeros(library_size)
    c = np.arange(1, library_size + 1)
    n_windows = library_size - s + 1
    count = np.minimum(c, n_windows) - np.maximum(1, c - s + 1) + 1
    phi = policy.mpc_fraction
    return phi * (c <= s) + (1.0 - phi) * count / n_windows


def sample_placement(rng: np.random.Generator, policy: TierCachePolicy,
                     library_size: int) -> PlacementRealization:
    """Draw one station's cache realization (MPC prefix or RCS window)."""
    s = policy.cache_size
    if s > library_size:
        raise ValueError("cache_size exceeds library_size")
    use_mpc = rng.random() < policy.mpc_fraction
    if s == 0:
        return PlacementRealization(frozenset(), MPC if use_mpc else RCS)
    if use_mpc:
        return PlacementRealization(frozenset(range(1, s + 1)), MPC)
    start = int(rng.integers(1, library_size - s + 2))
    return PlacementRealization(frozenset(range(start, start + s)), RCS)


def sample_placement_fields(rng: np.random.Generator, policy: TierCachePolicy,
                            library_size: int, n: int):
    """Vectorized placement draw for ``n`` stations.

    Returns ``(is_mpc, window_start)``; MPC stations cache ranks 1..S, RCS
    stations cache the window starting at ``window_start``. A start is drawn
    for every station so the stream layout does not depend on the MPC draws.
    """
    s = policy.cache_size
    if s > library_size:
        raise ValueError("cache_size exceeds library_size")
    is_mpc = rng.random(n) < policy.mpc_fraction
    if s == 0:
        return is_mpc, np.ones(n, dtype=np.int64)
    starts = rng.integers(1, library_size - s + 2, size=n)
    return is_mpc, starts


def placement_contains(c: int, is_mpc: np.ndarray, window_start: np.ndarray,
                       cache_size: int) -> np.ndarray:
    """Whether each station described by (is_mpc, window_start) caches rank c."""
    if cache_size == 0:
        return np.zeros(is_mpc.shape, dtype=bool)
    in_mpc = is_mpc & (c <= cache_size)
    in_window = ~is_mpc & (window_start <= c) & (c < window_start + cache_size)
    return in_mpc | in_window
