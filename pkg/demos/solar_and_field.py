"""Synthetic solar input and the spatial random field.

Builds the default five-year profile, looks at one summer and one winter
day, then draws the per-cell perturbation field and checks its correlation
against the exponential kernel.
"""
import numpy as np

from wsnrl.config import NetworkConfig
from wsnrl.env import profile_for
from wsnrl.solar import exponential_covariance, harvested_energy, sample_field
from wsnrl.topology import topology_for

cfg = NetworkConfig()
profile = profile_for(cfg)
print(f"{len(profile)} steps of {profile.delta_t:g} h from {profile.timestamps[0]:%Y-%m-%d}")

# 8 bins per day; day 172 is near midsummer, day 355 near midwinter
per_day = int(24 // cfg.delta_t)
for day in (172, 355):
    e = profile.baseline_energy[day * per_day:(day + 1) * per_day]
    print(f"day {day}: " + " ".join(f"{v:7.1f}" for v in e) + f"   total {e.sum():.0f} mWh")

# --- random field: sigma 0.01, correlation length 5 cells
rng = np.random.default_rng(0)
fields = sample_field((cfg.grid_rows, cfg.grid_cols), cfg.sigma, cfg.l0, rng, size=5000).values
row = fields[:, 1, :]
lags = np.arange(6)
emp = [np.mean(row[:, :cfg.grid_cols - k] * row[:, k:]) for k in lags]
print("\nlag  empirical   kernel")
for k, c in zip(lags, emp):
    print(f"{k:3d}  {c:.3e}  {exponential_covariance(k, cfg.sigma, cfg.l0):.3e}")

# --- what each node harvests in one sunny step
topo = topology_for(cfg)
one = sample_field((cfg.grid_rows, cfg.grid_cols), cfg.sigma, cfg.l0, rng)
t = 172 * per_day + 4
print("\nharvest at a midday step (mWh):", np.round(harvested_energy(profile, one, topo, t), 1))
