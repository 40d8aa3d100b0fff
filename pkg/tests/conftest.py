import numpy as np
import pytest

from panfis.model import Config, Model, Rule

# Printed example rule: centre, inverse covariance and consequent weights.
GOLDEN_CENTER = [0.290, 0.292]
GOLDEN_INV_COV = [[7.4, 0.19], [0.19, 7.4]]
GOLDEN_WEIGHTS = [0.03, 0.17, 0.04]


def random_spd(rng, u, scale=1.0):
    a = rng.normal(size=(u, u))
    return scale * (a @ a.T + u * np.eye(u))


def make_rule(center, inv_cov, weights=None, support=1, omega=1e5):
    center = np.asarray(center, dtype=float)
    u = center.size
    return Rule(center=center, inv_cov=np.asarray(inv_cov, dtype=float), support=support,
                weights=np.zeros(u + 1) if weights is None else np.asarray(weights, dtype=float),
                rls_cov=omega * np.eye(u + 1))


@pytest.fixture
def golden_rule():
    return make_rule(GOLDEN_CENTER, GOLDEN_INV_COV, GOLDEN_WEIGHTS)


@pytest.fixture
def golden_model(golden_rule):
    return Model(config=Config(input_dim=2, mahalanobis_r=0.3), rules=[golden_rule], samples_seen=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in test_acceptance.RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
