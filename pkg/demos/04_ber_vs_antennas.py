"""
BER versus antenna count: proposed scheme and energy detection
==============================================================

Two users dropped uniformly in a 1000 m cell, 25 dBm each.  The energy
detector sends one on-off symbol per user per slot, matching the proposed
scheme's one bit per user per slot.  Results go to ``out/ber_vs_m`` together
with a manifest and a plot script.
"""

from ncsimo.harness import SimConfig, emit_outputs, run_ber_sweep

base = dict(K=2, radius_m=1000.0, P_dBm=25.0, M_list=(16, 32, 64, 128), error_target=200, seed=1)
records, configs = [], []
for scheme in ("proposed", "med"):
    cfg = SimConfig(scheme=scheme, **base)
    configs.append(cfg)
    records += run_ber_sweep(cfg)

for r in records:
    lo, hi = r.wilson_ci_95
    print(f"{r.scheme:9s} M={r.M:4d}  BER={r.ber:.3e}  95% CI [{lo:.2e}, {hi:.2e}]  blocks={r.trials}")

for path in emit_outputs(records, "out/ber_vs_m", configs=configs):
    print("wrote", path)
