import numpy as np
import pytest

from etfs.model import intervals_from_patterns, make_instance, normalize_sensitive_set

EX1_WORD = "ecabaaaaabbbadf"
EX1_PATTERNS = ["aba", "baa", "aaa", "aab", "bba"]
EX2_PATTERNS = ["aba", "aa", "abbba"]


def build(word, k, patterns, weights=None):
    inst = make_instance(word, k) if weights is None else make_instance(word, k, weights)
    return inst, normalize_sensitive_set(intervals_from_patterns(inst, patterns), inst)


@pytest.fixture
def example1():
    return build(EX1_WORD, 3, EX1_PATTERNS)


@pytest.fixture
def example2():
    return build(EX1_WORD, 3, EX2_PATTERNS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
