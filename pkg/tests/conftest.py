import numpy as np
import pytest

from fdmotor.synth import MotorSpec, gen_corpus

CORPUS_SEED = 2024


@pytest.fixture(scope="session")
def corpus():
    return gen_corpus(MotorSpec(), seed=CORPUS_SEED)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion lines collected by test_acceptance, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
