"""Snapshot-based Monte Carlo engine.

Each snapshot drops every tier's stations as a Poisson point process on a
disk around a typical user at the origin, draws link modes, fading, and
cache placements, and computes each station's SIR against the total
received power of all other stations (all tiers interfere; no noise). A
station covers when its SIR clears its tier's bias-scaled threshold; a
content rank scores a hit when some covering station caches it, and uses
the backhaul when no cache hit exists but a non-caching macro station
covers.

Snapshots are independent work units: snapshot ``k`` draws from a stream
derived from ``(master_seed, k)`` by splittable seeding, and reductions use
integer accumulators plus per-snapshot floats combined in snapshot order,
so results are bit-identical for a fixed seed no matter how many workers
run or how the pool schedules them.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import sample_links
from .content import cache_probability_vector, sample_placement_fields
from .metrics import MONTE_CARLO, MetricReport, caching_efficiency, tier_rates
from .scenario import ScenarioConfig, SimulationProtocol

__all__ = [
    "Snapshot",
    "TierSnapshot",
    "SnapshotEstimates",
    "snapshot_rng",
    "sample_network",
    "compute_sir",
    "evaluate_snapshot",
    "run_simulation",
]

# Snapshots per work unit; fixed so chunk boundaries (and thus reduction
# order) never depend on the worker count.
CHUNK_SNAPSHOTS = 64


@dataclass
class TierSnapshot:
    """All stations of one tier in one snapshot (struct-of-arrays)."""

    positions: np.ndarray  # (n, 2) meters
    distances: np.ndarray  # (n,) meters from the origin
    is_los: np.ndarray  # (n,) bool
    fading: np.ndarray  # (n,) unit-mean power gains
    pathloss: np.ndarray  # (n,) unitless
    is_mpc: np.ndarray  # (n,) bool, True = caches the popular prefix
    window_start: np.ndarray  # (n,) 1-based window start for RCS stations

    def __len__(self):
        return len(self.distances)


@dataclass
class Snapshot:
    """One network realization: a TierSnapshot per tier."""

    tiers: list

    def station_count(self) -> int:
        return sum(len(t) for t in self.tiers)


@dataclass
class SnapshotEstimates:
    """Per-snapshot indicators and counts.

    ``caching_covering[i, c-1]`` counts tier-(i+1) stations that cache rank
    c and clear their threshold; ``covering[i]`` ignores caching.
    ``serving_tier`` holds the 0-based tier of the strongest covering
    caching station per rank, -1 when none.
    """

    hit: np.ndarray  # (F,) bool
    backhaul: np.ndarray  # (F,) bool, operational event
    caching_covering: np.ndarray  # (K, F) int
    covering: np.ndarray  # (K,) int
    serving_tier: np.ndarray  # (F,) int
    any_coverage: bool  # some station of any tier covers, cache-agnostic


def snapshot_rng(master_seed: int, snapshot_index: int) -> np.random.Generator:
    """Independent per-snapshot stream from (master_seed, index)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(snapshot_index,))
    )


def sample_network(rng: np.random.Generator, scenario: ScenarioConfig,
                   region_radius: float | None = None) -> Snapshot:
    """Draw one snapshot: Poisson counts, uniform disk positions, links, caches."""
    radius = scenario.region_radius_m() if region_radius is None else region_radius
    area = math.pi * radius * radius
    tiers = []
    for tier, lam in zip(scenario.tiers, scenario.densities_per_m2()):
        n = int(rng.poisson(lam * area)) if lam > 0 else 0
        r = radius * np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        positions = np.column_stack((r * np.cos(theta), r * np.sin(theta)))
        is_los, fading, pathloss = sample_links(rng, r, tier.radio)
        is_mpc, window_start = sample_placement_fields(
            rng, tier.cache, scenario.content.library_size, n)
        tiers.append(TierSnapshot(positions, r, is_los, fading, pathloss,
                                  is_mpc, window_start))
    return Snapshot(tiers)


def _received_powers(snapshot: Snapshot, scenario: ScenarioConfig):
    return [
        tier.radio.tx_power * ts.pathloss * ts.fading
        for tier, ts in zip(scenario.tiers, snapshot.tiers)
    ]


def _sir_per_tier(snapshot: Snapshot, scenario: ScenarioConfig):
    powers = _received_powers(snapshot, scenario)
    total = float(sum(p.sum() for p in powers))
    sirs = []
    for p in powers:
        interference = total - p
        with np.errstate(divide="ignore", invalid="ignore"):
            sir = np.where(interference > 0.0, p / interference, np.inf)
        sirs.append(sir)
    return sirs


def compute_sir(snapshot: Snapshot, scenario: ScenarioConfig,
                tier_index: int, bs_index: int) -> float:
    """SIR of one station against all other stations of every tier.

    Returns ``inf`` when no other station exists (zero interference); such
    a station covers at any finite threshold.
    """
    sirs = _sir_per_tier(snapshot, scenario)
    return float(sirs[tier_index][bs_index])


def evaluate_snapshot(snapshot: Snapshot, scenario: ScenarioConfig) -> SnapshotEstimates:
    """Coverage, hit, and backhaul statistics of one snapshot."""
    F = scenario.content.library_size
    K = scenario.num_tiers
    sirs = _sir_per_tier(snapshot, scenario)

    covering = np.zeros(K, dtype=np.int64)
    caching_covering = np.zeros((K, F), dtype=np.int64)
    best_sir = np.full(F, -np.inf)
    serving_tier = np.full(F, -1, dtype=np.int64)
    any_coverage = False

    for i, (tier, ts) in enumerate(zip(scenario.tiers, snapshot.tiers)):
        threshold = tier.effective_threshold()
        mask = sirs[i] >= threshold
        covering[i] = int(np.count_nonzero(mask))
        if covering[i]:
            any_coverage = True
        s = tier.cache.cache_size
        if s == 0:
            continue
        for b in np.nonzero(mask)[0]:
            lo = 0 if ts.is_mpc[b] else int(ts.window_start[b]) - 1
            hi = lo + s
            caching_covering[i, lo:hi] += 1
            sir_b = sirs[i][b]
            better = sir_b > best_sir[lo:hi]
            best_sir[lo:hi][better] = sir_b
            serving_tier[lo:hi][better] = i

    hit = caching_covering.sum(axis=0) > 0
    macro_non_caching = covering[0] - caching_covering[0]
    backhaul = ~hit & (macro_non_caching > 0)
    return SnapshotEstimates(hit, backhaul, caching_covering, covering,
                             serving_tier, any_coverage)


def _chunk_stats(args):
    """Accumulate one chunk of snapshots (worker function).

    Integer sums are exactly order-independent; per-snapshot float metrics
    are returned as arrays in snapshot order so the final reduction is
    deterministic for any worker count.
    """
    scenario, protocol, radius, start, stop = args
    F = scenario.content.library_size
    K = scenario.num_tiers
    a = scenario.content.request_probabilities()
    q1 = cache_probability_vector(scenario.tiers[0].cache, F)
    one_minus_q1 = 1.0 - q1
    w1 = float(a @ one_minus_q1)
    lam = scenario.densities_per_m2()
    rates = np.asarray(tier_rates(scenario))
    lam_rate = lam * rates
    s1 = scenario.tiers[0].cache.cache_size
    bh_cost_scale = lam[0] * (F - s1) * scenario.costs.backhaul_unit_cost
    storage_cost = scenario.costs.cache_unit_cost * float(
        np.sum(lam * np.array([t.cache.cache_size for t in scenario.tiers]))
    )
    sampled = protocol.content_evaluation == "sampled"

    n_snap = stop - start
    hit_counts = np.zeros(F, dtype=np.int64)
    bh_op_counts = np.zeros(F, dtype=np.int64)
    cachcov_sums = np.zeros((K, F), dtype=np.int64)
    cov_sums = np.zeros(K, dtype=np.int64)
    cov_sumsq = np.zeros(K, dtype=np.int64)
    draw_counts = np.zeros(F, dtype=np.int64)
    anycov_count = 0
    metrics = np.empty((n_snap, 5))  # whit, wbh, wbh_op, ase, cost

    for k in range(start, stop):
        rng = snapshot_rng(protocol.master_seed, k)
        snapshot = sample_network(rng, scenario, radius)
        est = evaluate_snapshot(snapshot, scenario)
        n1cov = float(est.covering[0])
        cov_sums += est.covering
        cov_sumsq += est.covering * est.covering
        anycov_count += int(est.any_coverage)
        if sampled:
            c0 = int(rng.choice(F, p=a))
            draw_counts[c0] += 1
            hit_counts[c0] += int(est.hit[c0])
            bh_op_counts[c0] += int(est.backhaul[c0])
            cachcov_sums[:, c0] += est.caching_covering[:, c0]
            whit = float(est.hit[c0])
            wbh = one_minus_q1[c0] * n1cov
            wbh_op = float(est.backhaul[c0])
            ase = float(lam_rate @ est.caching_covering[:, c0]) \
                + lam_rate[0] * one_minus_q1[c0] * n1cov
            cost = bh_cost_scale * one_minus_q1[c0] * n1cov + storage_cost
        else:
            hit_counts += est.hit
            bh_op_counts += est.backhaul
            cachcov_sums += est.caching_covering
            whit = float(a @ est.hit)
            wbh = w1 * n1cov
            wbh_op = float(a @ est.backhaul)
            ase = float(lam_rate @ (est.caching_covering @ a)) \
                + lam_rate[0] * w1 * n1cov
            cost = bh_cost_scale * w1 * n1cov + storage_cost
        metrics[k - start] = (whit, wbh, wbh_op, ase, cost)

    return (hit_counts, bh_op_counts, cachcov_sums, cov_sums, cov_sumsq,
            draw_counts, anycov_count, metrics)


def _stderr(values: np.ndarray) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(n))


def _ratio_stderr(num: np.ndarray, den: np.ndarray) -> float:
    """Delta-method standard error of mean(num)/mean(den)."""
    n = len(num)
    if n < 2:
        return 0.0
    a_bar = float(np.mean(num))
    b_bar = float(np.mean(den))
    if b_bar == 0.0:
        return 0.0
    cov = np.cov(num, den, ddof=1)
    var = (cov[0, 0] / b_bar ** 2
           + a_bar ** 2 * cov[1, 1] / b_bar ** 4
           - 2.0 * a_bar * cov[0, 1] / b_bar ** 3) / n
    return math.sqrt(max(var, 0.0))


def run_simulation(scenario: ScenarioConfig,
                   protocol: SimulationProtocol | None = None,
                   workers: int = 1) -> MetricReport:
    """Estimate every metric over ``protocol.num_snapshots`` snapshots.

    ``protocol`` defaults to the scenario's own; pass a desk-scale protocol
    to override the snapshot count, region, or seed without touching the
    scenario. ``workers`` > 1 distributes fixed-size snapshot chunks over a
    process pool; the result is bit-identical for any worker count.
    """
    proto = scenario.protocol if protocol is None else protocol
    radius = scenario.region_radius_m(proto)
    n = proto.num_snapshots
    chunks = [(scenario, proto, radius, s, min(s + CHUNK_SNAPSHOTS, n))
              for s in range(0, n, CHUNK_SNAPSHOTS)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_stats, chunks))
    else:
        results = [_chunk_stats(c) for c in chunks]

    F = scenario.content.library_size
    K = scenario.num_tiers
    hit_counts = np.zeros(F, dtype=np.int64)
    bh_op_counts = np.zeros(F, dtype=np.int64)
    cachcov_sums = np.zeros((K, F), dtype=np.int64)
    cov_sums = np.zeros(K, dtype=np.int64)
    cov_sumsq = np.zeros(K, dtype=np.int64)
    draw_counts = np.zeros(F, dtype=np.int64)
    anycov_count = 0
    metric_blocks = []
    for res in results:
        hit_counts += res[0]
        bh_op_counts += res[1]
        cachcov_sums += res[2]
        cov_sums += res[3]
        cov_sumsq += res[4]
        draw_counts += res[5]
        anycov_count += res[6]
        metric_blocks.append(res[7])
    metrics = np.concatenate(metric_blocks, axis=0)
    whit, wbh, wbh_op, ase_arr, cost_arr = metrics.T
    one_minus_q1 = 1.0 - cache_probability_vector(scenario.tiers[0].cache, F)
    p_hit = float(np.mean(whit))
    p_bh = float(np.mean(wbh))
    p_bh_op = float(np.mean(wbh_op))
    ase = float(np.mean(ase_arr))
    cost = float(np.mean(cost_arr))
    efficiency = caching_efficiency(ase, cost)

    rho_mean = cov_sums / n
    rho_se = tuple(
        math.sqrt(max(cov_sumsq[i] / n - rho_mean[i] ** 2, 0.0) / max(n - 1, 1))
        for i in range(K)
    )

    lam = scenario.densities_per_m2()
    lam_rate = lam * np.asarray(tier_rates(scenario))
    if proto.content_evaluation == "sampled":
        draws_safe = np.maximum(draw_counts, 1)
        per_hit = np.where(draw_counts > 0, hit_counts / draws_safe, np.nan)
        cachcov_mean = np.where(draw_counts > 0, cachcov_sums / draws_safe, np.nan)
    else:
        per_hit = hit_counts / n
        cachcov_mean = cachcov_sums / n
    per_bh = one_minus_q1 * float(rho_mean[0])
    per_ase = lam_rate @ cachcov_mean + lam_rate[0] * per_bh

    return MetricReport(
        provenance=MONTE_CARLO,
        coverage=p_hit,
        bound_value=None,
        coverage_is_bound=False,
        p_hit=p_hit,
        p_bh=p_bh,
        p_bh_operational=p_bh_op,
        coverage_all_bs=anycov_count / n,
        ase=ase,
        cost=cost,
        efficiency=efficiency,
        per_tier_coverage_density=tuple(float(x) for x in rho_mean),
        per_tier_coverage_density_stderr=rho_se,
        per_content_hit=per_hit,
        per_content_backhaul=per_bh,
        per_content_ase=per_ase,
        stderr={
            "coverage": _stderr(whit),
            "p_hit": _stderr(whit),
            "p_bh": _stderr(wbh),
            "p_bh_operational": _stderr(wbh_op),
            "ase": _stderr(ase_arr),
            "cost": _stderr(cost_arr),
            "efficiency": _ratio_stderr(ase_arr, cost_arr),
        },
        fingerprint=scenario.fingerprint(),
    )
