"""Rule policies over the last 2880 steps (one year) of the synthetic profile.

These give reference points for a trained agent: all nodes on, a fixed
half-on rotation, and a battery-greedy rule.
"""
from wsnrl.baselines import GreedyBattery, RoundRobin, all_active
from wsnrl.config import NetworkConfig
from wsnrl.harness import evaluate_policy

cfg = NetworkConfig()
policies = {
    "all_active": all_active,
    "round_robin(0.5)": RoundRobin(0.5),
    "greedy_battery(k=8)": GreedyBattery(8),
}
print(f"{'policy':22s} {'active ratio':>12s} {'mean D_T %':>11s} {'std D_T %':>10s}")
for name, pol in policies.items():
    m, env = evaluate_policy(cfg, pol, seed=0)
    print(f"{name:22s} {m.active_ratio:12.3f} {m.mean_DT:11.4f} {m.std_DT:10.4f}")
