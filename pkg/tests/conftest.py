"""Shared fixtures: a tiny hand-checked corpus and campaign helpers."""
import pytest

from transpick.corpus import Corpus, Example, save_corpus
from transpick.engine import AcquisitionConfig, CampaignConfig, run_campaign
from transpick.synthetic import generate_corpus

# Four geography questions over two relations (next_to:t / loc:t) and two
# entities.  Small enough that co-occurrence rows, tf-idf weights, and
# coverage numbers can be checked against hand calculations.
TOY4_ROWS = [
    (
        "ex1",
        "( answer ( state ( next_to:t texas ) ) )",
        "which states border texas",
        "welche staaten grenzen an texas",
    ),
    (
        "ex2",
        "( answer ( state ( next_to:t montana ) ) )",
        "which states border montana",
        "welche staaten grenzen an montana",
    ),
    (
        "ex3",
        "( answer ( river ( loc:t texas ) ) )",
        "name the rivers in texas",
        "nenne die fluesse in texas",
    ),
    (
        "ex4",
        "( answer ( city ( loc:t montana ) ) )",
        "how many cities are in montana",
        "wie viele staedte liegen in montana",
    ),
]


def build_toy4() -> Corpus:
    return Corpus(
        [
            Example(ex_id, lf, {"en": en, "de": de})
            for ex_id, lf, en, de in TOY4_ROWS
        ],
        "en",
        "de",
    )


@pytest.fixture
def toy4():
    return build_toy4()


@pytest.fixture
def toy4_path(tmp_path):
    path = tmp_path / "toy4.jsonl"
    save_corpus(build_toy4(), str(path))
    return str(path)


@pytest.fixture(scope="session")
def synthetic120():
    """120 generated examples (6 templates x 20); shared read-only."""
    return generate_corpus(n_templates=6, per_template=20, seed=0)


@pytest.fixture(scope="session")
def synthetic600():
    """The default generated corpus (30 templates x 20); shared read-only."""
    return generate_corpus(seed=0)


def campaign_metrics(corpus, strategy: str, seed: int):
    """Run one full campaign with default settings and return its state.

    This is the exact configuration the end-to-end expectations (and the
    pinned golden files) were derived from, so tests and the golden
    generator must both go through it.
    """
    config = CampaignConfig(
        acquisition=AcquisitionConfig(strategy=strategy), seed=seed
    )
    return run_campaign(corpus, config)
