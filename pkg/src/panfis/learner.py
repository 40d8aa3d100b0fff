"""Single-pass training loop tying structure and consequent learning together."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .consequent import ErlsStep, erls_update
from .inference import compute_firings, predict
from .model import Config, Model
from .structure import PremiseUpdateError, adapt_winner, datum_significance, prune_rules, spawn_rule

logger = logging.getLogger(__name__)

GREW = "grew"
ADAPTED = "adapted"
FIRST_RULE = "first_rule"


@dataclass
class TrainStep:
    n: int
    prediction: float
    target: float
    abs_error: float
    event: str
    significance: float
    pruned: list = field(default_factory=list)
    rule_count_after: int = 0
    erls: list = field(default_factory=list)
    premise_rolled_back: bool = False

    @property
    def committed(self) -> bool:
        return any(s.gate for s in self.erls)


def new_model(input_dim: int, **params) -> Model:
    return Model(config=Config(input_dim=input_dim, **params))


def _check_sample(model: Model, x, target) -> tuple[np.ndarray, float]:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != model.config.input_dim:
        raise ValueError(f"input has dimension {x.shape[0]}, expected {model.config.input_dim}")
    target = float(target)
    if not (np.all(np.isfinite(x)) and np.isfinite(target)):
        raise ValueError("non-finite input or target")
    return x, target


def train_sample(model: Model, x, target: float) -> TrainStep:
    """Learn from one sample in place and return the step trace.

    Order: predict, growth test, grow or adapt the winner, consequent update
    on refreshed firings, prune, count the sample.
    """
    x, target = _check_sample(model, x, target)
    if model.data_min is None:
        model.data_min, model.data_max = x.copy(), x.copy()
    else:
        model.data_min = np.minimum(model.data_min, x)
        model.data_max = np.maximum(model.data_max, x)

    was_empty = not model.rules
    y = 0.0 if was_empty else predict(model, x)[0]
    abs_error = abs(target - y)

    decision = datum_significance(model, x, abs_error)
    rolled_back = False
    if decision.grew:
        spawn_rule(model, x, target, decision)
        event = FIRST_RULE if was_empty else GREW
    else:
        event = ADAPTED
        try:
            adapt_winner(model.rules[decision.winner_index], x)
        except PremiseUpdateError as exc:
            logger.warning("sample %d: %s", model.samples_seen, exc)
            rolled_back = True

    firings = compute_firings(model, x)
    erls: list[ErlsStep] = erls_update(model, x, target, firings)
    pruned = prune_rules(model)

    step = TrainStep(
        n=model.samples_seen,
        prediction=y,
        target=target,
        abs_error=abs_error,
        event=event,
        significance=decision.significance,
        pruned=pruned,
        rule_count_after=len(model.rules),
        erls=erls,
        premise_rolled_back=rolled_back,
    )
    model.samples_seen += 1
    return step


def fit_stream(model: Model, samples: Iterable) -> tuple[Model, list[TrainStep], np.ndarray]:
    """Train on each ``(x, target)`` once, in order.

    Returns the model, the step traces and the one-step-ahead predictions made
    before each update.
    """
    steps = [train_sample(model, x, t) for x, t in samples]
    if not steps:
        raise ValueError("sample stream is empty")
    return model, steps, np.array([s.prediction for s in steps])


def evaluate(model: Model, samples) -> float:
    """Root mean squared error of the frozen model over ``samples``."""
    samples = list(samples)
    if not samples:
        raise ValueError("no samples to evaluate")
    err = [t - predict(model, x)[0] for x, t in samples]
    return float(np.sqrt(np.mean(np.square(err))))


def rule_count_trace(steps, initial: int = 0) -> list[int]:
    """Rebuild the rule count after every step from events and pruned lists."""
    counts, c = [], initial
    for s in steps:
        if s.event in (GREW, FIRST_RULE):
            c += 1
        c -= len(s.pruned)
        counts.append(c)
    return counts


def predict_many(model: Model, inputs) -> np.ndarray:
    return np.array([predict(model, x)[0] for x in inputs])
