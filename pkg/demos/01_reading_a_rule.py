"""
Reading an evolved rule
=======================

A rule's premise is a rotated Gaussian ellipsoid, which is compact but hard
to read. This script takes one two-input rule, evaluates it, and cuts its
ellipsoid along each axis to get one fuzzy set per input, then prints the
rule in IF-THEN form.
"""

import numpy as np

from panfis import Config, Model, Rule, extract_fuzzy_sets, firing_strength, predict, rule_volume
from panfis.harness import format_rules

# %%
# A rule predicting a feature from its two previous values.
rule = Rule(
    center=[0.290, 0.292],
    inv_cov=[[7.4, 0.19], [0.19, 7.4]],
    support=1,
    weights=[0.03, 0.17, 0.04],
    rls_cov=1e5 * np.eye(3),
)
model = Model(config=Config(input_dim=2, mahalanobis_r=0.3), rules=[rule])

# %%
# Membership falls off with Mahalanobis distance from the centre.
for x in ([0.290, 0.292], [0.390, 0.292], [0.6, 0.6]):
    print(f"x = {x}: firing {firing_strength(rule, x):.5f}, output {predict(model, x)[0]:.5f}")
print(f"volume det(cov) = {rule_volume(rule):.6f}")

# %%
# Axis cuts at radius r give per-input widths; r = 0.3 gives about 0.11.
for r in (0.3, 1.0):
    sets = extract_fuzzy_sets(rule, r)
    print(f"r = {r}: " + ", ".join(f"(c={s.center:.3f}, sigma={s.width:.3f})" for s in sets))

# %%
print()
print(format_rules(model, names=["variance[n-1]", "variance[n-2]"]))
