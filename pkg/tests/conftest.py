import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return DATA / "mini" / "corpus.conllu"


@pytest.fixture(scope="session")
def mini_gold_path() -> Path:
    return DATA / "mini" / "gold.tsv"


@pytest.fixture(scope="session")
def demo_path() -> Path:
    return DATA / "demo" / "extraction_demo.conllu"


@pytest.fixture(scope="session")
def mini_corpus(mini_corpus_path):
    from termforge.corpus import load_corpus
    return load_corpus(mini_corpus_path)


@pytest.fixture(scope="session")
def mini_gold(mini_gold_path):
    from termforge.evaluation import load_gold_standard
    return load_gold_standard(mini_gold_path)
