"""Parsimonious evolving fuzzy inference for streaming regression.

The learner starts with no rules, grows multivariate-Gaussian TSK rules when a
sample carries enough error-weighted novelty, adapts the winning rule
otherwise, fits rule consequents with gated local recursive least squares and
prunes rules whose contribution falls below a threshold.
"""

from .consequent import ErlsStep, erls_update
from .features import (
    FEATURE_NAMES,
    FeatureVector,
    Normalizer,
    apply_normalizer,
    build_direct_dataset,
    build_timeseries_dataset,
    extract_features,
    fit_normalizer,
)
from .inference import (
    Firings,
    extract_fuzzy_sets,
    firing_strength,
    normalize_firings,
    predict,
    rule_volume,
)
from .learner import TrainStep, evaluate, fit_stream, new_model, rule_count_trace, train_sample
from .model import Config, FuzzySet, Model, ModelError, Rule, load_model, save_model
from .structure import (
    GrowthDecision,
    adapt_winner,
    datum_significance,
    fuzzy_set_similarity,
    hypothetical_rule,
    merge_fuzzy_sets,
    merged_rule_view,
    prune_rules,
    rule_significance,
    spawn_rule,
)

__version__ = "0.1.0"
