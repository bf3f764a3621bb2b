"""Metric assembly: hit/backhaul split, ASE, cost, efficiency, bias factors."""
import dataclasses
import math

import numpy as np
import pytest

from hetcache.analytic import build_coverage_table
from hetcache.content import ContentModel, TierCachePolicy
from hetcache.metrics import (UndefinedEfficiencyError, analytic_report,
                              apply_range_expansion, area_spectral_efficiency,
                              caching_efficiency, cost_per_area,
                              hit_and_backhaul, per_content_hit_backhaul,
                              tier_rates)
from hetcache.scenario import CostModel, default_scenario

CONTENT = ContentModel(library_size=100, popularity_exponent=1.0)


def test_full_macro_cache_kills_backhaul():
    policies = [TierCachePolicy(100, 1.0), TierCachePolicy(5, 1.0)]
    _, p_bh = hit_and_backhaul([0.4, 0.3], policies, CONTENT)
    assert p_bh == 0.0


def test_empty_caches_kill_hits():
    policies = [TierCachePolicy(0, 1.0), TierCachePolicy(0, 1.0)]
    p_hit, p_bh = hit_and_backhaul([0.4, 0.3], policies, CONTENT)
    assert p_hit == 0.0
    assert p_bh == pytest.approx(0.4)  # every request goes over the backhaul


def test_hit_backhaul_decomposition_identity():
    # p_hit + p_bh equals the popularity average of the combined split
    rho = [0.37, 0.22]
    policies = [TierCachePolicy(20, 0.6), TierCachePolicy(5, 0.3)]
    p_hit, p_bh = hit_and_backhaul(rho, policies, CONTENT)
    a = CONTENT.request_probabilities()
    hit_c, bh_c = per_content_hit_backhaul(rho, policies, CONTENT)
    combined = float(a @ (hit_c + bh_c))
    assert p_hit + p_bh == pytest.approx(combined, rel=1e-12)


def test_backhaul_decreases_with_popularity_exponent():
    s = default_scenario()
    table = build_coverage_table(s)
    policies = [t.cache for t in s.tiers]
    values = []
    for kappa in (0.5, 1.0, 1.5):
        content = ContentModel(library_size=100, popularity_exponent=kappa)
        values.append(hit_and_backhaul(table.per_tier_density, policies, content)[1])
    assert values[0] > values[1] > values[2]


def test_ase_single_tier_collapse():
    policies = [TierCachePolicy(100, 1.0)]
    content = ContentModel(library_size=100)
    ase = area_spectral_efficiency([0.5], policies, content, rates=[2.0],
                                   densities_per_m2=[1e-5])
    assert ase == pytest.approx(0.5 * 1e-5 * 2.0, rel=1e-12)


def test_ase_zero_density_network():
    policies = [TierCachePolicy(20, 1.0), TierCachePolicy(5, 1.0)]
    ase = area_spectral_efficiency([0.4, 0.3], policies, CONTENT,
                                   rates=[1.0, 2.0], densities_per_m2=[0.0, 0.0])
    assert ase == 0.0


def test_cost_trivial_zeros():
    policies = [TierCachePolicy(100, 1.0), TierCachePolicy(5, 1.0)]
    costs = CostModel(backhaul_unit_cost=1.0, cache_unit_cost=0.0)
    bh_c = np.zeros(100)  # full macro cache: no per-content backhaul
    omega = cost_per_area(bh_c, policies, [1e-9, 1e-5], CONTENT, costs)
    assert omega == 0.0
    omega = cost_per_area(np.full(100, 0.3),
                          [TierCachePolicy(20, 1.0), TierCachePolicy(5, 1.0)],
                          [0.0, 0.0], CONTENT, CostModel())
    assert omega == 0.0


def test_efficiency_trivials_and_homogeneity():
    assert caching_efficiency(0.0, 1.0) == 0.0
    assert caching_efficiency(4.0, 2.0) == 2.0
    with pytest.raises(UndefinedEfficiencyError):
        caching_efficiency(1.0, 0.0)
    # doubling both unit costs halves the efficiency at fixed ASE
    s = default_scenario()
    table = build_coverage_table(s)
    r1 = analytic_report(s, table=table)
    doubled = dataclasses.replace(s, costs=CostModel(2.0, 0.02))
    r2 = analytic_report(doubled, table=table)
    assert r2.efficiency == pytest.approx(r1.efficiency / 2.0, rel=1e-12)
    assert r2.ase == pytest.approx(r1.ase, rel=1e-12)


def test_popularity_rescaling_is_invisible():
    a = CONTENT.request_probabilities()
    rescaled = 10.0 * a
    renormalized = rescaled / rescaled.sum()
    assert np.allclose(a, renormalized, atol=1e-15)


def test_tier_rates_use_unscaled_thresholds():
    s = default_scenario()
    assert tier_rates(s) == (pytest.approx(math.log2(3.0)),
                             pytest.approx(math.log2(5.0)))
    biased = apply_range_expansion(s, (0.5, 0.25))
    assert tier_rates(biased) == tier_rates(s)
    natural = dataclasses.replace(s, rate_log_base=math.e)
    assert tier_rates(natural)[0] == pytest.approx(math.log(3.0))


def test_range_expansion_identity():
    s = default_scenario()
    assert apply_range_expansion(s, (1.0, 1.0)) == s
    r_base = analytic_report(s)
    r_same = analytic_report(apply_range_expansion(s, (1.0, 1.0)))
    assert r_same.efficiency == pytest.approx(r_base.efficiency, rel=1e-9)


def test_range_expansion_validation():
    s = default_scenario()
    with pytest.raises(ValueError):
        apply_range_expansion(s, (1.0,))
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            apply_range_expansion(s, (1.0, bad))


def test_analytic_report_fields():
    s = default_scenario()
    report = analytic_report(s)
    assert report.provenance == "analytic"
    assert report.coverage_is_bound
    assert report.coverage == min(1.0, report.bound_value)
    assert 0.0 <= report.p_hit <= 1.0
    assert 0.0 <= report.p_bh <= 1.0
    assert report.cost > 0.0 and report.ase > 0.0
    assert report.efficiency == pytest.approx(report.ase / report.cost, rel=1e-12)
    assert report.per_content_hit.shape == (100,)
    a = s.content.request_probabilities()
    assert float(a @ report.per_content_ase) == pytest.approx(report.ase, rel=1e-12)
    assert float(a @ report.per_content_hit) == pytest.approx(report.p_hit, rel=1e-12)
    assert set(report.error_estimates) == {
        "coverage", "p_hit", "p_bh", "ase", "cost", "efficiency"}
    assert all(v >= 0.0 for v in report.error_estimates.values())


def test_analytic_report_decomposition_against_table():
    s = default_scenario()
    table = build_coverage_table(s)
    report = analytic_report(s, table=table)
    a = s.content.request_probabilities()
    q1 = np.array([1.0] * 20 + [0.0] * 80)  # full-MPC macro with 20 slots
    manual_bh = float(a @ ((1.0 - q1) * table.per_tier_density[0]))
    assert report.p_bh == pytest.approx(manual_bh, rel=1e-12)


def test_tier_counts_other_than_two():
    # a lone macro tier and a three-tier network both evaluate end to end
    from hetcache.montecarlo import run_simulation
    from hetcache.scenario import (ScenarioConfig, SimulationProtocol,
                                   TierConfig, IntegrationSettings)

    base = default_scenario()
    one = ScenarioConfig(
        tiers=(base.tiers[1],),
        content=base.content, costs=base.costs,
        protocol=SimulationProtocol(num_snapshots=60, region_radius=3000.0,
                                    master_seed=2),
        integration=IntegrationSettings())
    pico = TierConfig(
        density=30.0,
        radio=dataclasses.replace(base.tiers[1].radio, tx_power=1.0,
                                  sir_threshold=5.0),
        cache=TierCachePolicy(cache_size=2, mpc_fraction=0.5))
    three = dataclasses.replace(
        one, tiers=(base.tiers[0], base.tiers[1], pico))
    for s in (one, three):
        ana = analytic_report(s)
        assert len(ana.per_tier_coverage_density) == s.num_tiers
        assert ana.cost > 0.0 and 0.0 <= ana.p_hit <= 1.0
        mc = run_simulation(s)
        assert len(mc.per_tier_coverage_density) == s.num_tiers
        assert mc.p_hit + mc.p_bh_operational <= 1.0 + 1e-12
