import io
import json

import numpy as np
import pytest

from panfis.learner import fit_stream, new_model
from panfis.model import Config, Model, ModelError, dumps_model, load_model, models_equal, save_model

from conftest import GOLDEN_CENTER, GOLDEN_INV_COV, GOLDEN_WEIGHTS


class TestConfig:
    def test_defaults(self):
        cfg = Config(input_dim=3)
        assert cfg.epsilon == 0.6
        assert cfg.merge_threshold == 0.8
        assert cfg.omega == 1e5
        assert cfg.mahalanobis_r == 1.0

    @pytest.mark.parametrize("kwargs", [
        {"epsilon": 0.0}, {"epsilon": 1.0}, {"merge_threshold": 1.5}, {"omega": 0.0},
        {"mahalanobis_r": -1.0}, {"g1": -0.1}, {"g2": -1e-9}, {"input_dim": 0},
    ])
    def test_invalid(self, kwargs):
        params = {"input_dim": 2, **kwargs}
        with pytest.raises(ModelError):
            Config(**params)


class TestRoundTrip:
    def test_empty_model(self, tmp_path):
        m = Model(config=Config(input_dim=2))
        path = tmp_path / "m.json"
        save_model(m, path)
        assert json.loads(path.read_text())["rules"] == []
        loaded = load_model(path)
        assert loaded.n_rules == 0

    def test_golden_rule_bit_equal(self, golden_model):
        buf = io.StringIO()
        save_model(golden_model, buf)
        loaded = load_model(buf.getvalue())
        rule = loaded.rules[0]
        assert rule.center.tolist() == GOLDEN_CENTER
        assert rule.inv_cov.tolist() == GOLDEN_INV_COV
        assert rule.weights.tolist() == GOLDEN_WEIGHTS
        assert models_equal(golden_model, loaded)

    def test_trained_model_save_load_save(self, rng):
        m = new_model(3, g1=1e-3, g2=1e-4)
        xs = rng.uniform(size=(500, 3))
        ys = np.sin(3 * xs[:, 0]) + xs[:, 1] * xs[:, 2]
        fit_stream(m, zip(xs, ys))
        first = dumps_model(m)
        second = dumps_model(load_model(first))
        assert first == second

    def test_floats_round_trip_exactly(self, rng):
        m = new_model(2)
        fit_stream(m, zip(rng.normal(size=(50, 2)), rng.normal(size=50)))
        loaded = load_model(dumps_model(m))
        for a, b in zip(m.rules, loaded.rules):
            assert np.array_equal(a.inv_cov, b.inv_cov)
            assert np.array_equal(a.rls_cov, b.rls_cov)

    def test_top_level_keys(self, golden_model):
        doc = json.loads(dumps_model(golden_model))
        assert doc["format_version"] == 1
        assert {"config", "samples_seen", "rules"} <= set(doc)
        assert set(doc["rules"][0]) == {"center", "inv_cov", "support", "weights", "rls_cov"}


class TestLoadValidation:
    def _doc(self, golden_model):
        return json.loads(dumps_model(golden_model))

    def test_not_positive_definite(self, golden_model):
        doc = self._doc(golden_model)
        # eigenvalues 3 and -1
        assert np.linalg.eigvalsh([[1, 2], [2, 1]])[0] < 0
        doc["rules"][0]["inv_cov"] = [[1, 2], [2, 1]]
        with pytest.raises(ModelError, match="not positive definite"):
            load_model(doc)

    def test_asymmetric(self, golden_model):
        doc = self._doc(golden_model)
        doc["rules"][0]["inv_cov"] = [[1.0, 0.1], [0.0, 1.0]]
        with pytest.raises(ModelError, match="symmetric"):
            load_model(doc)

    def test_dimension_mismatch(self, golden_model):
        doc = self._doc(golden_model)
        doc["rules"].append({
            "center": [0.0, 0.0, 0.0], "inv_cov": np.eye(3).tolist(), "support": 1,
            "weights": [0.0] * 4, "rls_cov": np.eye(4).tolist(),
        })
        with pytest.raises(ModelError, match="dimension mismatch"):
            load_model(doc)

    @pytest.mark.parametrize("mutate", [
        lambda d: d.pop("rules"),
        lambda d: d.pop("config"),
        lambda d: d["rules"][0].pop("weights"),
        lambda d: d["rules"][0].update(support=0),
        lambda d: d["rules"][0].update(weights=[1.0, 2.0]),
        lambda d: d["rules"][0].update(center="abc"),
        lambda d: d.update(format_version=2),
        lambda d: d["config"].update(bogus=1),
    ])
    def test_malformed(self, golden_model, mutate):
        doc = self._doc(golden_model)
        mutate(doc)
        with pytest.raises(ModelError):
            load_model(doc)

    def test_bad_json(self):
        with pytest.raises(ModelError, match="malformed"):
            load_model("{not json")

    def test_unwritable_destination(self, golden_model, tmp_path):
        with pytest.raises(OSError):
            save_model(golden_model, tmp_path / "missing" / "m.json")
