"""The two-mode channel: LOS probability, bounded path loss, Nakagami fading.

Prints the LOS probability profile of the default tiers, shows the bounded
power-law attenuation in both modes, and checks the unit-mean normalization
of the fading gains by sampling.
"""
import numpy as np

from hetcache import LOS, NLOS, default_scenario, los_probability, path_loss, sample_fading

scenario = default_scenario()
macro, small = scenario.tiers

print("=== LOS probability vs distance ===")
print(f"{'r [m]':>8} {'macro (D0=80, D1=164)':>24} {'small cell (D0=16, D1=36)':>28}")
for r in (0, 16, 50, 80, 120, 200, 500, 1000, 5000):
    p1 = los_probability(r, macro.radio.near_field_dist, macro.radio.far_field_dist)
    p2 = los_probability(r, small.radio.near_field_dist, small.radio.far_field_dist)
    print(f"{r:>8} {p1:>24.4f} {p2:>28.4f}")

print()
print("=== Bounded path loss (no singularity at r=0) ===")
for r in (0.0, 1.0, 10.0, 100.0, 1000.0):
    l_los = path_loss(r, LOS, macro.radio)
    l_nlos = path_loss(r, NLOS, macro.radio)
    print(f"r={r:>7.1f} m: LOS {l_los:.3e}  NLOS {l_nlos:.3e}  ratio {l_los / l_nlos:.1f}")

print()
print("=== Normalized Nakagami fading: unit mean, variance 1/M ===")
rng = np.random.default_rng(2)
for m in (1, 2, 4):
    draws = sample_fading(rng, m, size=200_000)
    print(f"M={m}: mean={draws.mean():.4f} (target 1), "
          f"var={draws.var():.4f} (target {1.0 / m:.2f})")
