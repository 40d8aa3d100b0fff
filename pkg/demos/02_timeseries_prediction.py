"""
One-step-ahead feature prediction
=================================

Simulate a bearing degrading over 139 days with contamination injected on
day 88, extract the nine time-domain features from each day's window, and
predict each feature from its two previous values. Every sample is learned
once; the error is measured on the predictions made before each update.
"""

import numpy as np

from panfis import FEATURE_NAMES, build_timeseries_dataset, extract_features, fit_stream, new_model
from panfis.features import apply_normalizer, fit_normalizer
from panfis.structure import merged_rule_view
from panfis.synthetic import degradation_windows

windows = degradation_windows(n_days=139, window=2048, fault_day=88, seed=0)
table = np.array([extract_features(w).as_array() for w in windows])
table = apply_normalizer(fit_normalizer(table), table)

# %%
print(f"{'feature':<16} {'RMSE':>6} {'rules':>6} {'sets':>6}")
for k, name in enumerate(FEATURE_NAMES):
    samples = build_timeseries_dataset(table[:, k])
    model = new_model(2, g1=0.05, g2=0.05)
    _, steps, preds = fit_stream(model, samples)
    targets = np.array([t for _, t in samples])
    rmse = np.sqrt(np.mean((preds - targets) ** 2))
    sets = "-".join(map(str, merged_rule_view(model).counts))
    print(f"{name:<16} {rmse:6.3f} {model.n_rules:6d} {sets:>6}")

# %%
# Rule evolution for kurtosis: where did rules appear and disappear?
samples = build_timeseries_dataset(table[:, FEATURE_NAMES.index("kurtosis")])
_, steps, _ = fit_stream(new_model(2, g1=0.05, g2=0.05), samples)
for s in steps:
    if s.event != "adapted" or s.pruned:
        print(f"day {s.n + 2:3d}: {s.event:<10} pruned={s.pruned} rules={s.rule_count_after}")
