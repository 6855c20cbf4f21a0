"""Shared fixtures: preset corpora and a small trained classifier.

Session scope keeps the expensive pieces (simulation, forest training) to
one build per run.
"""
import pytest

from aircontext.fingerprint import step_counts
from aircontext.forest import RandomForest
from aircontext.presets import demo_home, six_app_home, testbed, training_samples

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def testbed_corpus():
    return testbed()


@pytest.fixture(scope="session")
def demo():
    return demo_home()


@pytest.fixture(scope="session")
def six_app():
    return six_app_home()


@pytest.fixture(scope="session")
def small_forest(testbed_corpus):
    """A quick 24-tree forest over the 19-type testbed, plus its step table."""
    _, templates = testbed_corpus
    samples = training_samples(templates, per_class=12, seed=31)
    clf = RandomForest.train(samples, n_trees=24, seed=7)
    return clf, step_counts(samples)
