"""Gated, firing-weighted recursive least squares for rule consequents.

Each rule keeps its own covariance ``rls_cov`` (local learning). A sample is
weighted by the rule's normalized firing strength, and the whole step is
committed only when it does not increase the model's absolute error.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .inference import Firings, extend, output_from_firings
from .model import Model

logger = logging.getLogger(__name__)

ACTIVATION_FLOOR = 1e-12


@dataclass
class ErlsStep:
    rule_index: int
    gate: int
    error_before: float
    error_after: float  # tentative error, also recorded when the gate rejects


def rls_step(weights, cov, xe, target: float, weight: float):
    """One weighted RLS step; returns (new_weights, new_cov).

    Minimizes sum(weight_n * (t_n - xe_n w)^2) recursively.
    """
    qx = cov @ xe
    gain = qx / (1.0 / weight + float(xe @ qx))
    new_w = weights + gain * (target - float(xe @ weights))
    new_cov = cov - np.outer(gain, qx)
    return new_w, 0.5 * (new_cov + new_cov.T)


def erls_update(model: Model, x, target: float, firings: Firings) -> list[ErlsStep]:
    """Tentatively update every active rule, then commit all or nothing.

    Rules whose normalized firing is below ``ACTIVATION_FLOOR`` are left out.
    """
    if not model.rules:
        raise ValueError("model has no rules")
    phi = np.asarray(firings.normalized, dtype=float)
    if phi.shape[0] != len(model.rules):
        raise ValueError("firings do not match the rule base")
    xe = extend(x)
    y_before = output_from_firings(model, x, phi)
    e_before = abs(target - y_before)

    active = [k for k in range(len(model.rules)) if phi[k] >= ACTIVATION_FLOOR]
    new_weights = [r.weights for r in model.rules]
    new_covs = {}
    for k in active:
        rule = model.rules[k]
        new_weights[k], new_covs[k] = rls_step(rule.weights, rule.rls_cov, xe, target, phi[k])

    y_after = output_from_firings(model, x, phi, new_weights)
    e_after = abs(target - y_after)

    finite = np.isfinite(y_after) and all(
        np.all(np.isfinite(new_weights[k])) and np.all(np.isfinite(new_covs[k])) for k in active)
    if not finite:
        logger.warning("consequent update produced non-finite values; step skipped")
        return [ErlsStep(k, 0, e_before, e_before) for k in active]

    gate = 1 if e_before >= e_after else 0
    if gate:
        for k in active:
            model.rules[k].weights = new_weights[k]
            model.rules[k].rls_cov = new_covs[k]
    return [ErlsStep(k, gate, e_before, e_after) for k in active]
