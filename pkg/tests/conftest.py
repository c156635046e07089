import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synth import planted_corpus, protocol_corpus, tiny_corpus  # noqa: E402

from claimcheck.providers import make_providers  # noqa: E402


@pytest.fixture(scope="session")
def protocol_corpus_14():
    return protocol_corpus(seed=11)


@pytest.fixture(scope="session")
def planted_corpus_3():
    return planted_corpus(seed=7)


@pytest.fixture()
def small_corpus():
    return tiny_corpus(seed=3)


@pytest.fixture()
def mock_providers():
    return make_providers("mock")
