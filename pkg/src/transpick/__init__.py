"""Budget-constrained selection of semantic-parsing examples for human
translation, plus the simulation/annotation machinery around it."""

from .corpus import Corpus, CorpusError, Example, SplitSpec, load_corpus, save_corpus, split
from .engine import (
    AcquisitionConfig,
    CampaignConfig,
    CampaignState,
    TuningGrid,
    TuningResult,
    budget_sizes,
    load_campaign_config,
    run_campaign,
    tune_hyperparameters,
)
from .lftree import LfNode, LfParseError, extract_atoms, extract_compounds, lf_units, parse_lf, render_lf
from .parsers import ExternalParser, SurrogateParser, exact_match_accuracy
from .synthetic import generate_corpus
from .translation import GoldRevealOracle, NoisyLexiconTranslator, fit_target_distribution

__all__ = [
    "AcquisitionConfig",
    "CampaignConfig",
    "CampaignState",
    "Corpus",
    "CorpusError",
    "Example",
    "ExternalParser",
    "GoldRevealOracle",
    "LfNode",
    "LfParseError",
    "NoisyLexiconTranslator",
    "SplitSpec",
    "SurrogateParser",
    "TuningGrid",
    "TuningResult",
    "budget_sizes",
    "exact_match_accuracy",
    "extract_atoms",
    "extract_compounds",
    "fit_target_distribution",
    "generate_corpus",
    "lf_units",
    "load_campaign_config",
    "load_corpus",
    "parse_lf",
    "render_lf",
    "run_campaign",
    "save_corpus",
    "split",
    "tune_hyperparameters",
]

__version__ = "0.1.0"
