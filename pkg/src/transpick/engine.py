"""Round-based selection campaigns.

A campaign walks a budget ladder: each round scores the untranslated
pool with the configured strategy, picks a batch, obtains target
translations for it, retrains the parser on everything gathered so
far, and records evaluation metrics.  Also home to the grid search for
the combined strategy's mixing weights, which runs entirely on
source-language data.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import acquisition as acq
from .corpus import Corpus, Example, SplitSpec, round_half_up, split
from .features import (
    HashedTrigramEmbedder,
    PrecomputedEmbedder,
    cached_units,
    fit_cooccurrence,
    fit_tfidf,
)
from .parsers import SurrogateParser, make_parser
from .rng import derive_seed
from .translation import (
    GoldRevealOracle,
    NoisyLexiconTranslator,
    fit_target_distribution,
    load_lexicon,
)

STRATEGIES = (
    "LFSD",
    "LCD",
    "LFS_LC_D",
    "RANDOM",
    "S2S_FW",
    "MAX_COMPOUND",
    "AMSP_NBEST",
    "AMSP_MAX",
)

DEFAULT_BUDGET_PERCENTS = [1, 2, 4, 8, 16, 32]


def normalize_strategy(name: str) -> str:
    canonical = name.strip().upper().replace("-", "_")
    if canonical not in STRATEGIES:
        raise ValueError(f"unknown strategy {name!r}; expected one of {', '.join(STRATEGIES)}")
    return canonical


@dataclass
class AcquisitionConfig:
    strategy: str = "LFS_LC_D"
    alpha: float = 0.75
    beta: float = 0.5
    unit: str = "both"
    n_best: int = 5
    amsp_coefficients: dict[str, float] = field(
        default_factory=lambda: {"bias": 1.0, "error": 1.0, "density": 1.0, "semdiv": 1.0}
    )
    bandwidth: float | None = None
    backtranslate_max: bool = False

    def validated(self) -> "AcquisitionConfig":
        out = replace(self, strategy=normalize_strategy(self.strategy))
        if out.alpha < 0.0:
            raise ValueError("alpha must be >= 0")
        if not 0.0 <= out.beta < 1.0:
            raise ValueError("beta must be in [0, 1)")
        if out.unit not in ("atoms", "compounds", "both"):
            raise ValueError(f"unknown unit {out.unit!r}")
        if out.n_best < 1:
            raise ValueError("n_best must be >= 1")
        unknown = set(out.amsp_coefficients) - {"bias", "error", "density", "semdiv"}
        if unknown:
            raise ValueError(f"unknown aggregate components: {sorted(unknown)}")
        if not out.amsp_coefficients:
            raise ValueError("aggregate needs at least one component")
        for name, coeff in out.amsp_coefficients.items():
            if coeff < 0.0:
                raise ValueError(f"coefficient for {name!r} must be >= 0")
        if out.bandwidth is not None and out.bandwidth <= 0.0:
            raise ValueError("bandwidth must be positive")
        return out


@dataclass
class CampaignConfig:
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    budget_percents: list[float] = field(default_factory=lambda: list(DEFAULT_BUDGET_PERCENTS))
    seed: int = 0
    mode: str = "al-msp"
    warm_start: bool = False
    parser_spec: object = "surrogate"
    oracle_spec: str = "gold"
    mt_dropout: float = 0.1
    lexicon_path: str | None = None
    embeddings_path: str | None = None
    source_lang: str = "en"
    target_lang: str = "de"
    corpus_path: str | None = None
    eval_corpus_path: str | None = None
    show_lf: bool = False

    def validated(self) -> "CampaignConfig":
        out = replace(self, acquisition=self.acquisition.validated())
        if out.mode not in ("al-msp", "amsp"):
            raise ValueError(f"unknown mode {out.mode!r}")
        if out.acquisition.strategy in ("AMSP_NBEST", "AMSP_MAX") and out.mode != "amsp":
            raise ValueError(
                f"strategy {out.acquisition.strategy} needs machine translations; set mode = amsp"
            )
        if not out.budget_percents:
            raise ValueError("budget_percents must be non-empty")
        prev = 0.0
        for p in out.budget_percents:
            if p <= prev:
                raise ValueError("budget_percents must be strictly increasing and positive")
            prev = p
        if out.budget_percents[-1] > 100.0:
            raise ValueError("budget_percents may not exceed 100")
        if not 0.0 <= out.mt_dropout < 1.0:
            raise ValueError("mt_dropout must be in [0, 1)")
        if out.source_lang == out.target_lang:
            raise ValueError("source and target language must differ")
        return out


def budget_sizes(n: int, percents: list[float]) -> tuple[list[int], list[int]]:
    """Cumulative budgets and per-round batch sizes for a pool of n.

    Each percent maps to max(1, round-half-up(p * n / 100)); batch q is
    the difference from the previous cumulative budget (possibly 0 when
    rounding collapses two rungs).
    """
    if n < 1:
        raise ValueError("pool size must be >= 1")
    prev = 0.0
    for p in percents:
        if p <= prev:
            raise ValueError("budget percents must be strictly increasing and positive")
        prev = p
    cumulative = [max(1, round_half_up(p * n / 100.0)) for p in percents]
    if cumulative[-1] > n:
        raise ValueError(f"final budget {cumulative[-1]} exceeds the pool size {n}")
    batches = []
    last = 0
    for c in cumulative:
        batches.append(c - last)
        last = c
    return cumulative, batches


@dataclass
class CampaignState:
    round: int
    pool_ids: list[str]
    selected_rounds: list[list[str]]
    translations: dict[str, str]
    machine_translations: dict[str, str]
    metrics: list[dict]
    cluster_rounds: list[dict[str, int] | None]
    cumulative_budgets: list[int]

    @property
    def translated_ids(self) -> list[str]:
        return [ex_id for batch in self.selected_rounds for ex_id in batch]


def _compound_coverage(corpus: Corpus, translated_ids) -> float:
    total = {u for ex in corpus for u in cached_units(ex.lf, "compounds")}
    if not total:
        return 1.0
    covered = {
        u for ex_id in translated_ids for u in cached_units(corpus.by_id(ex_id).lf, "compounds")
    }
    return len(covered) / len(total)


class _CampaignRun:
    def __init__(self, corpus, config, oracle, parser, parser_factory, eval_corpus, on_round):
        self.corpus = corpus
        self.config = config
        self.acq_config = config.acquisition
        self.src = config.source_lang
        self.tgt = config.target_lang
        self.eval_corpus = eval_corpus or corpus
        self.on_round = on_round
        if parser is not None:
            self.parser_factory = lambda: parser
        elif parser_factory is not None:
            self.parser_factory = parser_factory
        else:
            self.parser_factory = lambda: make_parser(config.parser_spec)
        self.parser = None
        self.oracle = oracle or GoldRevealOracle(corpus)
        lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else None
        self.translator = NoisyLexiconTranslator(
            derive_seed(config.seed, "mt"), config.mt_dropout, lexicon
        )
        if config.embeddings_path:
            self.embedder = PrecomputedEmbedder(config.embeddings_path)
        else:
            self.embedder = HashedTrigramEmbedder()

        self.tfidf = fit_tfidf(corpus.examples, unit=self.acq_config.unit)
        self.lf_vectors = {ex.id: self.tfidf.featurize(ex.lf) for ex in corpus}
        self.cooc = fit_cooccurrence(corpus.examples, self.src, unit=self.acq_config.unit)
        self._embeddings: dict[str, object] = {}

        machine = {}
        if config.mode == "amsp":
            machine = {
                ex.id: self.translator.forward(ex.utterances[self.src]) for ex in corpus
            }
        self.state = CampaignState(
            round=0,
            pool_ids=corpus.ids(),
            selected_rounds=[],
            translations={},
            machine_translations=machine,
            metrics=[],
            cluster_rounds=[],
            cumulative_budgets=[],
        )

    # -- helpers ------------------------------------------------------

    def embedding(self, ex_id: str):
        vec = self._embeddings.get(ex_id)
        if vec is None:
            ex = self.corpus.by_id(ex_id)
            vec = self.embedder.embed_example(ex_id, ex.utterances[self.src])
            self._embeddings[ex_id] = vec
        return vec

    def training_corpus(self) -> Corpus:
        examples = []
        for ex in self.corpus:
            utts = {self.src: ex.utterances[self.src]}
            if ex.id in self.state.translations:
                utts[self.tgt] = self.state.translations[ex.id]
            elif ex.id in self.state.machine_translations:
                utts[self.tgt] = self.state.machine_translations[ex.id]
            examples.append(Example(ex.id, ex.lf, utts))
        return Corpus(examples, self.src, self.tgt)

    def selected_units(self) -> set[str]:
        units: set[str] = set()
        for ex_id in self.state.translated_ids:
            units.update(cached_units(self.corpus.by_id(ex_id).lf, self.acq_config.unit))
        return units

    def retrain_and_record(self, round_index: int, cumulative: int):
        if self.parser is None or not self.config.warm_start:
            self.parser = self.parser_factory()
        self.parser.train(self.training_corpus())
        source_eval = self.eval_corpus.restrict_language(self.src)
        source_acc = self.parser.evaluate(source_eval)
        target_eval = self.eval_corpus.restrict_language(self.tgt)
        target_acc = self.parser.evaluate(target_eval) if len(target_eval) else None
        record = {
            "round": round_index,
            "cumulative_budget": cumulative,
            "source_accuracy": source_acc,
            "target_accuracy": target_acc,
            "compound_coverage": _compound_coverage(self.corpus, self.state.translated_ids),
            "strategy": self.acq_config.strategy,
            "seed": self.config.seed,
        }
        self.state.metrics.append(record)
        self.state.round = round_index
        self.state.cumulative_budgets.append(cumulative)
        if self.on_round:
            self.on_round(self.state, record)

    # -- strategy dispatch --------------------------------------------

    def score_and_select(self, round_index: int, k: int) -> list[str]:
        cfg = self.acq_config
        strategy = cfg.strategy
        pool_ids = list(self.state.pool_ids)
        pool_examples = [self.corpus.by_id(i) for i in pool_ids]
        round_seed = derive_seed(self.config.seed, "round", round_index)
        self.state.cluster_rounds.append(None)

        if strategy == "RANDOM":
            return acq.select_batch(acq.random_scores(pool_ids, round_seed), k)

        if strategy == "S2S_FW":
            return acq.select_batch(
                acq.s2s_fw_scores(self.parser, pool_examples, self.src), k
            )

        if strategy == "MAX_COMPOUND":
            return acq.select_max_compound(pool_examples, self.selected_units(), k, cfg.unit)

        if strategy in ("LFSD", "LFS_LC_D"):
            untranslated = [(i, self.lf_vectors[i]) for i in pool_ids]
            translated = [(i, self.lf_vectors[i]) for i in self.state.translated_ids]
            sparse_scores, clustering = acq.lfsd_scores(
                untranslated, translated, k, seed=derive_seed(round_seed, "lfsd")
            )
            self.state.cluster_rounds[-1] = dict(clustering.assignment)
            if strategy == "LFSD":
                return acq.select_with_exclusion(sparse_scores, k, clustering.assignment)
            lex_scores = acq.lcd_scores(
                pool_examples, self.cooc, self.selected_units(), cfg.beta, cfg.unit
            )
            combined = acq.combine_lfs_lc_d(sparse_scores, lex_scores, cfg.alpha)
            return acq.select_with_exclusion(combined, k, clustering.assignment)

        if strategy == "LCD":
            scores = acq.lcd_scores(
                pool_examples, self.cooc, self.selected_units(), cfg.beta, cfg.unit
            )
            return acq.select_batch(scores, k)

        # AMSP_NBEST / AMSP_MAX
        variant = "nbest" if strategy == "AMSP_NBEST" else "max"
        pairs = []
        for ex in self.corpus:
            utt = self.state.translations.get(ex.id) or self.state.machine_translations.get(ex.id)
            if utt:
                pairs.append((ex.lf, utt))
        tdist = fit_target_distribution(pairs)
        components: dict[str, acq.ScoreMap] = {}
        coeffs = cfg.amsp_coefficients
        groups: dict[str, int] = {}
        if "bias" in coeffs:
            components["bias"] = acq.bias_scores(tdist, pool_examples, variant, cfg.n_best)
        if "error" in coeffs:
            components["error"] = acq.error_scores(
                tdist,
                self.translator,
                self.parser,
                pool_examples,
                self.src,
                variant,
                cfg.n_best,
                cfg.backtranslate_max,
            )
        if "density" in coeffs:
            candidates = [(i, self.embedding(i)) for i in pool_ids]
            data = [self.embedding(ex.id) for ex in self.corpus]
            components["density"] = acq.density_scores(
                candidates, data, cfg.bandwidth, seed=derive_seed(self.config.seed, "kde")
            )
        if "semdiv" in coeffs:
            points = [(ex.id, self.embedding(ex.id)) for ex in self.corpus]
            fixed = [self.embedding(i) for i in self.state.translated_ids]
            clustering = acq.incremental_kmeans(
                points, fixed, k, seed=derive_seed(round_seed, "semdiv")
            )
            components["semdiv"] = acq.semdiv_scores(
                clustering, pool_ids, self.state.translated_ids
            )
            groups = dict(clustering.assignment)
            self.state.cluster_rounds[-1] = groups
        aggregate = acq.amsp_aggregate(components, coeffs)
        return acq.select_with_exclusion(aggregate, k, groups)

    # -- main loop ----------------------------------------------------

    def run(self) -> CampaignState:
        cumulative, batches = budget_sizes(len(self.corpus), self.config.budget_percents)
        self.retrain_and_record(0, 0)
        for round_index, (cum, k) in enumerate(zip(cumulative, batches), start=1):
            if k > 0:
                selected = self.score_and_select(round_index, k)
                revealed = self.oracle.translate(selected, self.tgt)
                for ex_id in selected:
                    utt = revealed.get(ex_id)
                    if not utt:
                        raise ValueError(f"oracle returned no translation for {ex_id!r}")
                    self.state.translations[ex_id] = utt
                self.state.selected_rounds.append(list(selected))
                chosen = set(selected)
                self.state.pool_ids = [i for i in self.state.pool_ids if i not in chosen]
            else:
                self.state.selected_rounds.append([])
                self.state.cluster_rounds.append(None)
            self.retrain_and_record(round_index, cum)
        return self.state


def run_campaign(
    corpus: Corpus,
    config: CampaignConfig,
    oracle=None,
    parser=None,
    parser_factory=None,
    eval_corpus: Corpus | None = None,
    on_round=None,
) -> CampaignState:
    """Execute a full campaign; returns the final state with per-round
    selections, revealed translations, and metrics records."""
    config = config.validated()
    run = _CampaignRun(corpus, config, oracle, parser, parser_factory, eval_corpus, on_round)
    return run.run()


# -- hyper-parameter grid search -------------------------------------


@dataclass
class TuningGrid:
    alphas: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])
    betas: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75])
    tuning_rate: float = 16.0
    dev_fraction: float = 0.2


@dataclass
class TuningResult:
    alpha: float
    beta: float
    table: list[dict]
    cycles: int


def tune_hyperparameters(
    corpus: Corpus,
    grid: TuningGrid,
    config: CampaignConfig,
    parser_factory=None,
    on_cycle=None,
) -> TuningResult:
    """Grid search for the combined strategy's alpha and beta.

    Runs entirely on source-language data: the corpus is reduced to its
    source side up front, split into select/dev pools, and for every
    (alpha, beta) pair the budget ladder is walked up to the tuning
    rate, a fresh parser is trained on exactly the selected subset, and
    dev accuracy recorded — one train/evaluate cycle per pair.  The
    winner is the highest accuracy, ties to larger alpha then larger
    beta.
    """
    config = config.validated()
    if not grid.alphas or not grid.betas:
        raise ValueError("tuning grid must be non-empty")
    if not 0.0 < grid.tuning_rate <= 100.0:
        raise ValueError("tuning_rate must be in (0, 100]")
    src = config.source_lang
    source_corpus = corpus.restrict_language(src)
    select_corpus, dev_corpus = split(
        source_corpus, SplitSpec(grid.dev_fraction, derive_seed(config.seed, "tune-split"))
    )
    ladder = [p for p in config.budget_percents if p <= grid.tuning_rate]
    if not ladder:
        ladder = [grid.tuning_rate]
    _, batches = budget_sizes(len(select_corpus), ladder)
    tfidf = fit_tfidf(select_corpus.examples, unit=config.acquisition.unit)
    lf_vectors = {ex.id: tfidf.featurize(ex.lf) for ex in select_corpus}
    cooc = fit_cooccurrence(select_corpus.examples, src, unit=config.acquisition.unit)
    if parser_factory is None:
        parser_factory = SurrogateParser

    table: list[dict] = []
    cycles = 0
    for alpha in grid.alphas:
        for beta in grid.betas:
            selected: list[str] = []
            pool = select_corpus.ids()
            for round_index, k in enumerate(batches, start=1):
                if k <= 0:
                    continue
                untranslated = [(i, lf_vectors[i]) for i in pool]
                translated = [(i, lf_vectors[i]) for i in selected]
                seed = derive_seed(config.seed, "tune-round", round_index)
                sparse_scores, clustering = acq.lfsd_scores(
                    untranslated, translated, k, seed=seed
                )
                selected_units: set[str] = set()
                for ex_id in selected:
                    selected_units.update(
                        cached_units(select_corpus.by_id(ex_id).lf, config.acquisition.unit)
                    )
                pool_examples = [select_corpus.by_id(i) for i in pool]
                lex_scores = acq.lcd_scores(
                    pool_examples, cooc, selected_units, beta, config.acquisition.unit
                )
                combined = acq.combine_lfs_lc_d(sparse_scores, lex_scores, alpha)
                batch = acq.select_with_exclusion(combined, k, clustering.assignment)
                selected.extend(batch)
                chosen = set(batch)
                pool = [i for i in pool if i not in chosen]
            parser = parser_factory()
            parser.train(select_corpus.subset(selected))
            accuracy = parser.evaluate(dev_corpus)
            cycles += 1
            row = {
                "alpha": alpha,
                "beta": beta,
                "dev_accuracy": accuracy,
                "selected": len(selected),
            }
            table.append(row)
            if on_cycle:
                on_cycle(row)
    best = max(table, key=lambda r: (r["dev_accuracy"], r["alpha"], r["beta"]))
    return TuningResult(best["alpha"], best["beta"], table, cycles)


# -- config files ----------------------------------------------------

_CONFIG_KEYS = {
    "corpus",
    "eval_corpus",
    "source_lang",
    "target_lang",
    "strategy",
    "alpha",
    "beta",
    "unit",
    "n_best",
    "seed",
    "mode",
    "budget_percents",
    "parser",
    "oracle",
    "mt_dropout",
    "lexicon",
    "embeddings",
    "bandwidth",
    "backtranslate_max",
    "warm_start",
    "show_lf",
    "amsp.bias",
    "amsp.error",
    "amsp.density",
    "amsp.semdiv",
}

_BOOL_VALUES = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def parse_kv_file(path: str) -> dict[str, str]:
    """`key = value` lines; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(f"line {lineno}: expected key = value")
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.split("#", 1)[0].strip()
            if not key:
                raise ValueError(f"line {lineno}: empty key")
            if key in out:
                raise ValueError(f"line {lineno}: duplicate key {key!r}")
            out[key] = value
    return out


def _parse_bool(value: str, key: str) -> bool:
    try:
        return _BOOL_VALUES[value.strip().lower()]
    except KeyError:
        raise ValueError(f"{key}: expected a boolean, got {value!r}") from None


def config_from_mapping(raw: dict) -> CampaignConfig:
    """Build a validated campaign config from parsed key/value pairs
    (strings from a config file, or typed values from a JSON body)."""
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    def get_float(key, default):
        v = raw.get(key)
        return default if v in (None, "") else float(v)

    def get_int(key, default):
        v = raw.get(key)
        return default if v in (None, "") else int(v)

    def get_bool(key, default):
        v = raw.get(key)
        if v in (None, ""):
            return default
        return v if isinstance(v, bool) else _parse_bool(str(v), key)

    acq_defaults = AcquisitionConfig()
    coeffs = dict(acq_defaults.amsp_coefficients)
    explicit = {
        name: raw[f"amsp.{name}"]
        for name in ("bias", "error", "density", "semdiv")
        if f"amsp.{name}" in raw and raw[f"amsp.{name}"] not in (None, "")
    }
    if explicit:
        coeffs = {name: float(v) for name, v in explicit.items()}
    bandwidth = raw.get("bandwidth")
    percents = raw.get("budget_percents")
    if percents in (None, ""):
        percent_list = list(DEFAULT_BUDGET_PERCENTS)
    elif isinstance(percents, (list, tuple)):
        percent_list = [float(p) for p in percents]
    else:
        percent_list = [float(p.strip()) for p in str(percents).split(",") if p.strip()]
    parser_spec = raw.get("parser") or "surrogate"
    acquisition = AcquisitionConfig(
        strategy=str(raw.get("strategy") or acq_defaults.strategy),
        alpha=get_float("alpha", acq_defaults.alpha),
        beta=get_float("beta", acq_defaults.beta),
        unit=str(raw.get("unit") or acq_defaults.unit),
        n_best=get_int("n_best", acq_defaults.n_best),
        amsp_coefficients=coeffs,
        bandwidth=None if bandwidth in (None, "") else float(bandwidth),
        backtranslate_max=get_bool("backtranslate_max", False),
    )
    config = CampaignConfig(
        acquisition=acquisition,
        budget_percents=percent_list,
        seed=get_int("seed", 0),
        mode=str(raw.get("mode") or "al-msp"),
        warm_start=get_bool("warm_start", False),
        parser_spec=parser_spec,
        oracle_spec=str(raw.get("oracle") or "gold"),
        mt_dropout=get_float("mt_dropout", 0.1),
        lexicon_path=raw.get("lexicon") or None,
        embeddings_path=raw.get("embeddings") or None,
        source_lang=str(raw.get("source_lang") or "en"),
        target_lang=str(raw.get("target_lang") or "de"),
        corpus_path=raw.get("corpus") or None,
        eval_corpus_path=raw.get("eval_corpus") or None,
        show_lf=get_bool("show_lf", False),
    )
    return config.validated()


def load_campaign_config(path: str) -> CampaignConfig:
    return config_from_mapping(parse_kv_file(path))
