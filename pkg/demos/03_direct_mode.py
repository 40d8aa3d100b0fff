"""
Direct-mode prediction
======================

Predict each feature from the other eight on the same day. The model learns
from the first 108 days and is then frozen; the last 31 days test how well it
generalizes. Scaling ranges come from the training days only, so the test
days may fall outside [0, 1].
"""

import tempfile
from pathlib import Path

from panfis.features import FEATURE_NAMES, FeatureVector, write_feature_table
from panfis.harness import run_direct
from panfis.synthetic import feature_table

table = feature_table(139, window=2048, fault_day=88, seed=0)
workdir = Path(tempfile.mkdtemp())
path = workdir / "features.csv"
write_feature_table([FeatureVector(*row, source=str(k)) for k, row in enumerate(table)], path)

# %%
print(f"{'feature':<16} {'RMSE':>7} {'Rule':>5} {'Time':>6}  Fuzzy Set")
for name in FEATURE_NAMES:
    rep = run_direct(path, name, {"g1": 0.01, "g2": 0.01}, split=108)
    print(f"{name:<16} {rep.rmse:7.3f} {rep.rule_count:5d} {rep.wall_time_seconds:6.2f}  {rep.fuzzy_set_cell}")

# %%
# The report and trace files are what the command line writes too.
rep = run_direct(path, "kurtosis", split=108, trace_out=workdir / "trace.csv",
                 report_out=workdir / "report.json", model_out=workdir / "model.json")
print(f"\nwrote {sorted(p.name for p in workdir.iterdir())} to {workdir}")
