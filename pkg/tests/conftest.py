"""
Shared fixtures for the test suite
"""

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

# Add the parent directory to the path so we can import the package
sys.path.insert(0, os.path.abspath(os.path.dirname(os.path.dirname(__file__))))

from src.model import Instance, Task, Valuation, COVERAGE

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exact oracles on the larger acceptance sizes")


def make_instance(*specs, budget=1.0):
    """Instance from (cost, prob, value) triples"""
    tasks = tuple(Task(i, float(c), float(p), float(v)) for i, (c, p, v) in enumerate(specs))
    return Instance(tasks=tasks, budget=budget)


def make_coverage(costs_probs, weights, covers, budget=1.0):
    tasks = tuple(Task(i, float(c), float(p)) for i, (c, p) in enumerate(costs_probs))
    valuation = Valuation(COVERAGE, tuple(float(w) for w in weights), tuple(tuple(c) for c in covers))
    return Instance(tasks=tasks, valuation=valuation, budget=budget)


@pytest.fixture
def single_task():
    """c = 0.1, p = 0.5, v = 1"""
    return make_instance((0.1, 0.5, 1.0))


@pytest.fixture
def pair_half():
    """Two tasks with p = 0.5 and c = 0.1"""
    return make_instance((0.1, 0.5, 1.0), (0.1, 0.5, 1.0))


@pytest.fixture
def x_tasks():
    """Tasks with p/2c well above 11"""
    return make_instance((0.01, 0.8, 1.0), (0.02, 0.9, 2.0), (0.015, 0.7, 1.5))


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch, tmp_path):
    """Keep stray config files and KSS_* variables out of the tests"""
    for key in list(os.environ):
        if key.startswith("KSS_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(tmp_path)
