import numpy as np
import pytest

from absa import synthetic
from absa.features import FeatureSpace, PosTagSet, SenticLexicon


@pytest.fixture(scope="session")
def syn_embeddings():
    return synthetic.make_embeddings()


@pytest.fixture(scope="session")
def syn_sentic():
    return SenticLexicon(synthetic.make_sentic())


@pytest.fixture(scope="session")
def tagset():
    return PosTagSet()


@pytest.fixture(scope="session")
def full_features(syn_embeddings, syn_sentic, tagset):
    return FeatureSpace(syn_embeddings, syn_sentic, tagset)


@pytest.fixture(scope="session")
def syn_corpus():
    return synthetic.make_corpus(100)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
