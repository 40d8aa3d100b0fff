"""Forward pass of the fuzzy network and per-rule geometry helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FuzzySet, Model, ModelError, Rule


@dataclass
class Firings:
    raw: np.ndarray
    normalized: np.ndarray


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _check_input(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != dim:
        raise ValueError(f"input has dimension {x.shape[0]}, expected {dim}")
    return x


def mahalanobis_sq(rule: Rule, x) -> float:
    """Quadratic form (x - c) inv_cov (x - c)^T."""
    v = _check_input(x, rule.dim) - rule.center
    return float(v @ (_sym(rule.inv_cov) @ v))


def firing_strength(rule: Rule, x) -> float:
    """Gaussian membership of ``x`` in the rule premise, in (0, 1]."""
    return float(np.exp(-mahalanobis_sq(rule, x)))


def normalize_firings(raw) -> np.ndarray:
    raw = np.asarray(raw, dtype=float).reshape(-1)
    if raw.size == 0:
        raise ValueError("cannot normalize an empty firing vector")
    total = raw.sum()
    if not total > 0.0:
        raise ValueError("firing strengths sum to zero")
    return raw / total


def compute_firings(model: Model, x) -> Firings:
    """Raw and normalized firing strengths of every rule at ``x``.

    Normalization is done in log space so that an input far from every rule
    (all raw strengths underflowing to 0) still yields a valid partition of
    unity dominated by the nearest rule.
    """
    if not model.rules:
        raise ValueError("model has no rules")
    d2 = np.array([mahalanobis_sq(r, x) for r in model.rules])
    raw = np.exp(-d2)
    if raw.sum() > 0.0 and np.all(raw > 0.0):
        normalized = normalize_firings(raw)
    else:
        shifted = np.exp(-(d2 - d2.min()))
        normalized = shifted / shifted.sum()
    return Firings(raw=raw, normalized=normalized)


def extend(x) -> np.ndarray:
    """Extended input [1, x]."""
    return np.concatenate(([1.0], np.asarray(x, dtype=float).reshape(-1)))


def output_from_firings(model: Model, x, normalized, weights=None) -> float:
    """Weighted average of rule consequents; ``weights`` overrides the rule weights."""
    xe = extend(x)
    if weights is None:
        weights = [r.weights for r in model.rules]
    local = np.array([xe @ w for w in weights])
    return float(np.dot(normalized, local))


def predict(model: Model, x) -> tuple[float, Firings]:
    if not model.rules:
        raise ValueError("cannot predict with an empty rule base")
    x = _check_input(x, model.config.input_dim)
    firings = compute_firings(model, x)
    return output_from_firings(model, x, firings.normalized), firings


def log_det_inv_cov(rule: Rule) -> float:
    """log det of the stored inverse covariance via Cholesky."""
    try:
        chol = np.linalg.cholesky(_sym(rule.inv_cov))
    except np.linalg.LinAlgError:
        raise ModelError("inv_cov is not positive definite") from None
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def log_rule_volume(rule: Rule) -> float:
    return -log_det_inv_cov(rule)


def rule_volume(rule: Rule) -> float:
    """det of the rule covariance, i.e. 1 / det(inv_cov)."""
    return float(np.exp(log_rule_volume(rule)))


def extract_fuzzy_sets(rule: Rule, r: float) -> list[FuzzySet]:
    """Cut the premise ellipsoid at Mahalanobis radius ``r`` along each axis."""
    if not r > 0.0:
        raise ValueError("radius must be positive")
    diag = np.diag(rule.inv_cov)
    return [FuzzySet(float(c), float(r / np.sqrt(d))) for c, d in zip(rule.center, diag)]
