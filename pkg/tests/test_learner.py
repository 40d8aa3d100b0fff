import math

import numpy as np
import pytest

from panfis.learner import (
    ADAPTED,
    FIRST_RULE,
    GREW,
    evaluate,
    fit_stream,
    new_model,
    rule_count_trace,
    train_sample,
)
from panfis.model import dumps_model
from panfis.synthetic import level_shift_series
from panfis.features import build_timeseries_dataset


def trace_bytes(steps):
    return repr([(s.n, s.prediction, s.target, s.abs_error, s.event, s.pruned,
                  s.rule_count_after, [(e.rule_index, e.gate, e.error_before, e.error_after)
                                       for e in s.erls]) for s in steps]).encode()


class TestTrainSample:
    def test_first_sample(self):
        m = new_model(2)
        step = train_sample(m, [0.1, 0.2], 0.7)
        assert step.event == FIRST_RULE
        assert step.prediction == 0.0
        assert step.abs_error == 0.7
        assert step.rule_count_after == 1
        assert m.samples_seen == 1

    def test_zero_error_adapts(self):
        m = new_model(1, g1=1e-6)
        train_sample(m, [0.5], 0.0)
        # the first rule starts with zero weights; with target 0 the error stays 0
        step = train_sample(m, [0.52], 0.0)
        assert step.abs_error == 0.0
        assert step.event == ADAPTED
        assert m.rules[0].support == 2

    def test_abs_error_exact(self, rng):
        m = new_model(2)
        for x, t in zip(rng.uniform(size=(30, 2)), rng.uniform(size=30)):
            s = train_sample(m, x, t)
            assert s.abs_error == abs(s.target - s.prediction)

    @pytest.mark.parametrize("x, t", [([0.1], 1.0), ([np.nan, 0.0], 1.0), ([0.1, 0.2], np.inf)])
    def test_bad_input(self, x, t):
        with pytest.raises(ValueError):
            train_sample(new_model(2), x, t)

    def test_replay_determinism(self):
        samples = build_timeseries_dataset(level_shift_series(141))
        assert len(samples) == 139
        runs = []
        for _ in range(2):
            m = new_model(2, g1=1e-3, g2=1e-3)
            _, steps, _ = fit_stream(m, samples)
            runs.append((trace_bytes(steps), dumps_model(m)))
        assert runs[0] == runs[1]


class TestFitStream:
    def test_constant_stream(self):
        m = new_model(2)
        _, steps, preds = fit_stream(m, [([0.4, 0.6], 0.8)] * 50)
        assert abs(preds[-1] - 0.8) < 1e-6
        assert m.n_rules == 1

    def test_step_count(self, rng):
        m = new_model(3)
        _, steps, preds = fit_stream(m, zip(rng.uniform(size=(139, 3)), rng.uniform(size=139)))
        assert len(steps) == 139 and preds.shape == (139,)

    def test_empty(self):
        with pytest.raises(ValueError):
            fit_stream(new_model(1), [])

    def test_rule_count_reconstructible(self, rng):
        m = new_model(2, g1=1e-4, g2=1e-3)
        xs = rng.uniform(size=(300, 2))
        _, steps, _ = fit_stream(m, zip(xs, np.sin(5 * xs[:, 0])))
        assert rule_count_trace(steps) == [s.rule_count_after for s in steps]
        assert any(s.event == GREW for s in steps) and any(s.pruned for s in steps)
        assert all(s.rule_count_after >= 1 for s in steps)

    def test_memory_is_independent_of_stream_length(self, rng):
        m = new_model(2, g1=0.05, g2=0.05)
        fit_stream(m, zip(rng.uniform(size=(2000, 2)), rng.uniform(size=2000)))
        # state is the rule list only: no sample buffer kept anywhere
        assert set(vars(m)) == {"config", "rules", "samples_seen", "data_min", "data_max"}
        assert m.samples_seen == 2000


class TestEvaluate:
    def test_perfect(self):
        m = new_model(1)
        fit_stream(m, [([0.5], 0.0)] * 3)
        assert evaluate(m, [([0.5], 0.0), ([0.7], 0.0)]) == 0.0

    def test_constant_zero_predictor(self):
        m = new_model(1)
        fit_stream(m, [([0.5], 0.0)] * 3)
        rmse = evaluate(m, [([0.1], 3.0), ([0.9], 4.0)])
        assert rmse == pytest.approx(math.sqrt((9 + 16) / 2), rel=1e-14)
        assert rmse == pytest.approx(3.5355, abs=1e-4)

    def test_pure(self, rng):
        m = new_model(2)
        fit_stream(m, zip(rng.uniform(size=(40, 2)), rng.uniform(size=40)))
        before = dumps_model(m)
        data = list(zip(rng.uniform(size=(10, 2)), rng.uniform(size=10)))
        assert evaluate(m, data) == evaluate(m, data)
        assert dumps_model(m) == before

    def test_empty(self):
        m = new_model(1)
        fit_stream(m, [([0.5], 0.0)])
        with pytest.raises(ValueError):
            evaluate(m, [])


def test_level_shift_triggers_growth():
    series = level_shift_series(139, shift_at=88)
    samples = build_timeseries_dataset(series)
    hits = []
    for g1 in (1e-3, 1e-2, 1e-1, 0.3):
        m = new_model(2, g1=g1, g2=g1)
        _, steps, _ = fit_stream(m, samples)
        grew_at = [s.n + 2 for s in steps if s.event == GREW]
        hits.append(any(88 <= n <= 92 for n in grew_at))
    assert any(hits)
