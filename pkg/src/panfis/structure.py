"""Rule-base evolution: growing, premise adaptation, pruning and set merging."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .inference import extract_fuzzy_sets, log_rule_volume, mahalanobis_sq
from .model import FuzzySet, Model, Rule

FLOOR_RANGE_FRACTION = 0.1


class PremiseUpdateError(ArithmeticError):
    """A premise update would leave inv_cov non-SPD; the rule was not modified."""


@dataclass
class GrowthDecision:
    significance: float
    grew: bool
    winner_index: Optional[int]
    candidate: Rule


def width_floor(model: Model) -> np.ndarray:
    """Per-dimension minimum width for new rules.

    A tenth of the observed input range, spread by the same epsilon-completeness
    factor as regular widths. Dimensions with no observed spread fall back to a
    unit range (inputs are expected to be min-max scaled).
    """
    u = model.config.input_dim
    if model.data_min is None:
        span = np.ones(u)
    else:
        span = np.asarray(model.data_max, dtype=float) - np.asarray(model.data_min, dtype=float)
        span = np.where(span > 0.0, span, 1.0)
    return FLOOR_RANGE_FRACTION * span / np.sqrt(np.log(1.0 / model.config.epsilon))


def nearest_rule_index(model: Model, x) -> Optional[int]:
    if not model.rules:
        return None
    x = np.asarray(x, dtype=float)
    d = [float(np.sum((x - r.center) ** 2)) for r in model.rules]
    return int(np.argmin(d))


def winner_index(model: Model, x) -> Optional[int]:
    """Index of the rule with the largest firing strength (lowest index on ties)."""
    if not model.rules:
        return None
    # argmin of the exponent avoids ties created by exp() underflow
    d2 = [mahalanobis_sq(r, x) for r in model.rules]
    return int(np.argmin(d2))


def hypothetical_rule(model: Model, x) -> Rule:
    """Premise of a candidate rule centred on ``x``.

    Each width is chosen so that the nearest existing centre keeps membership
    ``epsilon`` along that axis. Weights and RLS covariance are placeholders.
    """
    cfg = model.config
    x = np.asarray(x, dtype=float).reshape(-1)
    u = cfg.input_dim
    floor = width_floor(model)
    near = nearest_rule_index(model, x)
    if near is None:
        sigma = floor
    else:
        dist = np.abs(x - model.rules[near].center)
        sigma = np.maximum(dist / np.sqrt(np.log(1.0 / cfg.epsilon)), floor)
    return Rule(
        center=x.copy(),
        inv_cov=np.diag(1.0 / sigma ** 2),
        support=1,
        weights=np.zeros(u + 1),
        rls_cov=cfg.omega * np.eye(u + 1),
    )


def _volume_shares(log_volumes: np.ndarray, u: int) -> np.ndarray:
    """V_i^u / sum_j V_j^u computed in log space."""
    z = u * np.asarray(log_volumes, dtype=float)
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def datum_significance(model: Model, x, abs_error: float) -> GrowthDecision:
    if abs_error < 0:
        raise ValueError("abs_error must be non-negative")
    candidate = hypothetical_rule(model, x)
    u = model.config.input_dim
    if not model.rules:
        return GrowthDecision(float(abs_error), True, None, candidate)
    logv = [log_rule_volume(r) for r in model.rules] + [log_rule_volume(candidate)]
    share = _volume_shares(np.array(logv), u)[-1]
    significance = float(abs_error * share)
    return GrowthDecision(
        significance=significance,
        grew=significance >= model.config.g1,
        winner_index=winner_index(model, x),
        candidate=candidate,
    )


def spawn_rule(model: Model, x, target: float = None,
               decision: Optional[GrowthDecision] = None) -> Rule:
    """Append a new rule centred on ``x``; consequent copied from the winner.

    ``target`` is accepted for interface symmetry; the new rule's consequent is
    fitted to it later by the consequent update.
    """
    if decision is None:
        rule = hypothetical_rule(model, x)
        win = winner_index(model, x)
    else:
        rule = decision.candidate.copy()
        win = decision.winner_index
    if win is not None:
        rule.weights = model.rules[win].weights.copy()
    model.rules.append(rule)
    return rule


def adapt_winner(rule: Rule, x) -> Rule:
    """Move the winning rule towards ``x`` and update its inverse covariance.

    The centre follows the running mean of the samples the rule has absorbed.
    Rank-one Sherman-Morrison form of the recursive covariance
    ``S <- (1 - a) S + a (1 - a) v v^T`` with ``a = 1 / (N + 1)`` and
    ``v = x - center`` taken before the centre moves.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    n = rule.support
    a = 1.0 / (n + 1.0)
    v = x - rule.center
    inv = 0.5 * (rule.inv_cov + rule.inv_cov.T)
    with np.errstate(over="ignore", invalid="ignore"):
        g = inv @ v
        denom = 1.0 + a * float(v @ g)
        new_inv = inv / (1.0 - a) - (a / (1.0 - a)) * np.outer(g, g) / denom
        new_inv = 0.5 * (new_inv + new_inv.T)
    if not np.all(np.isfinite(new_inv)):
        raise PremiseUpdateError("premise update produced non-finite entries")
    try:
        np.linalg.cholesky(new_inv)
    except np.linalg.LinAlgError:
        raise PremiseUpdateError("premise update lost positive definiteness") from None
    rule.center = rule.center + v / (n + 1.0)
    rule.inv_cov = new_inv
    rule.support = n + 1
    return rule


def rule_significances(rules) -> np.ndarray:
    """Extended rule significance of every rule."""
    if not rules:
        raise ValueError("rule base is empty")
    u = rules[0].dim
    share = _volume_shares(np.array([log_rule_volume(r) for r in rules]), u)
    delta = np.array([abs(float(np.sum(r.weights))) for r in rules])
    return delta * share


def rule_significance(rule: Rule, all_rules) -> float:
    idx = next(k for k, r in enumerate(all_rules) if r is rule)
    return float(rule_significances(all_rules)[idx])


def prune_rules(model: Model) -> list[int]:
    """Drop rules whose significance is at most g2; never empties the base.

    Returns the pruned indices relative to the rule list on entry.
    """
    if len(model.rules) <= 1:
        return []
    ers = rule_significances(model.rules)
    doomed = ers <= model.config.g2
    if doomed.all():
        doomed[int(np.argmax(ers))] = False
    pruned = [int(k) for k in np.flatnonzero(doomed)]
    model.rules = [r for k, r in enumerate(model.rules) if not doomed[k]]
    return pruned


def fuzzy_set_similarity(a: FuzzySet, b: FuzzySet) -> float:
    return float(np.exp(-(abs(a.center - b.center) + abs(a.width - b.width))))


def merge_fuzzy_sets(a: FuzzySet, b: FuzzySet) -> FuzzySet:
    """Smallest set whose centre +- width span covers both inputs' spans."""
    if a == b:
        return a
    lo = min(a.center - a.width, b.center - b.width)
    hi = max(a.center + a.width, b.center + b.width)
    return FuzzySet((hi + lo) / 2.0, (hi - lo) / 2.0)


def merge_sets(sets, threshold: float) -> tuple[list[FuzzySet], list[int]]:
    """Greedily merge the most similar qualifying pair until none is left.

    Returns the reduced sets and, for each input set, the index of the reduced
    set representing it. Ties go to the lowest index pair; the merged set takes
    the lower slot.
    """
    current = list(sets)
    owner = list(range(len(current)))
    while len(current) > 1:
        best, pair = threshold, None
        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                s = fuzzy_set_similarity(current[i], current[j])
                if s > best:
                    best, pair = s, (i, j)
        if pair is None:
            break
        i, j = pair
        current[i] = merge_fuzzy_sets(current[i], current[j])
        del current[j]
        owner = [i if o == j else (o - 1 if o > j else o) for o in owner]
    return current, owner


@dataclass
class MergedView:
    sets: list          # sets[j] -> list of FuzzySet for input dimension j
    index: np.ndarray   # (n_rules, u) index into sets[j]

    @property
    def counts(self) -> list[int]:
        return [len(s) for s in self.sets]


def merged_rule_view(model: Model, r: Optional[float] = None) -> MergedView:
    """Per-dimension fuzzy sets of all rules after similarity merging.

    Display only: the rules themselves are left untouched.
    """
    if not model.rules:
        raise ValueError("model has no rules")
    radius = model.config.mahalanobis_r if r is None else r
    per_rule = [extract_fuzzy_sets(rule, radius) for rule in model.rules]
    u = model.config.input_dim
    sets, index = [], np.zeros((len(model.rules), u), dtype=int)
    for j in range(u):
        reduced, owner = merge_sets([fs[j] for fs in per_rule], model.config.merge_threshold)
        sets.append(reduced)
        index[:, j] = owner
    return MergedView(sets=sets, index=index)
