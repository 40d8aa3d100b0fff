"""
Growing and pruning thresholds
==============================

``g1`` controls how much error-weighted novelty a sample needs to spawn a
rule; ``g2`` controls how small a rule's contribution may get before it is
removed. This sweep shows their effect on a series with an abrupt level
shift at step 88.
"""

from panfis import build_timeseries_dataset, fit_stream, new_model
from panfis.synthetic import level_shift_series

samples = build_timeseries_dataset(level_shift_series(139, shift_at=88))

# %%
print("g1 sweep (pruning off)")
for g1 in (1e-4, 1e-3, 1e-2, 1e-1, 3e-1):
    model, steps, _ = fit_stream(new_model(2, g1=g1, g2=0.0), samples)
    grew = [s.n + 2 for s in steps if s.event == "grew"]
    near_shift = [k for k in grew if 88 <= k <= 93]
    print(f"  g1={g1:<7g} final rules {model.n_rules:3d}  grew near shift: {near_shift}")

# %%
print("g2 sweep (g1 = 0.01)")
for g2 in (1e-4, 1e-3, 1e-2, 1e-1):
    model, steps, _ = fit_stream(new_model(2, g1=1e-2, g2=g2), samples)
    print(f"  g2={g2:<7g} pruned {sum(len(s.pruned) for s in steps):3d}  final rules {model.n_rules}")
