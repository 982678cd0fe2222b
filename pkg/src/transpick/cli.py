"""Command-line front end.

    transpick validate <corpus>            check a corpus file
    transpick gen-corpus --out <path>      write a synthetic corpus
    transpick select ...                   one-shot batch selection
    transpick simulate --config <file>     run a full simulated campaign
    transpick tune --corpus ... --grid f   grid-search alpha/beta
    transpick serve --port N               start the annotation service
    transpick report --metrics f ...       aggregate + render figures
"""
from __future__ import annotations

import argparse
import os
import sys

from .corpus import (
    CorpusError,
    load_corpus,
    read_metrics,
    read_selection,
    save_corpus,
    write_metrics,
    write_selection,
)
from .engine import (
    CampaignConfig,
    TuningGrid,
    _CampaignRun,
    config_from_mapping,
    load_campaign_config,
    parse_kv_file,
    run_campaign,
    tune_hyperparameters,
)
from .reporting import render_metrics_figures, aggregate_metrics
from .synthetic import generate_corpus


def _add_lang_args(p):
    p.add_argument("--source-lang", default="en")
    p.add_argument("--target-lang", default="de")


def _cmd_validate(args) -> int:
    try:
        corpus = load_corpus(args.corpus, args.source_lang, args.target_lang)
    except (CorpusError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    print(f"ok: {len(corpus)} examples ({args.corpus})")
    return 0


def _cmd_gen_corpus(args) -> int:
    corpus = generate_corpus(
        n_templates=args.templates,
        per_template=args.per_template,
        n_paraphrases=args.paraphrases,
        n_entities=args.entities,
        seed=args.seed,
        source_lang=args.source_lang,
        target_lang=args.target_lang,
    )
    save_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} examples to {args.out}")
    return 0


def _cmd_select(args) -> int:
    corpus = load_corpus(args.corpus, args.source_lang, args.target_lang)
    mapping = {
        "strategy": args.strategy,
        "alpha": args.alpha,
        "beta": args.beta,
        "unit": args.unit,
        "n_best": args.n_best,
        "seed": args.seed,
        "source_lang": args.source_lang,
        "target_lang": args.target_lang,
    }
    if args.mode:
        mapping["mode"] = args.mode
    config = config_from_mapping({k: v for k, v in mapping.items() if v is not None})
    already = read_selection(args.selected) if args.selected else []
    unknown = [i for i in already if i not in set(corpus.ids())]
    if unknown:
        print(f"error: --selected ids not in corpus: {unknown[:5]}", file=sys.stderr)
        return 1
    run = _CampaignRun(corpus, config, None, None, None, None, None)
    taken = set(already)
    run.state.selected_rounds.append(list(already))
    run.state.pool_ids = [i for i in corpus.ids() if i not in taken]
    strategy = config.acquisition.strategy
    if strategy in ("S2S_FW", "AMSP_NBEST", "AMSP_MAX"):
        run.parser = run.parser_factory()
        run.parser.train(run.training_corpus())
    batch = run.score_and_select(len(already) + 1, args.budget)
    if args.out:
        write_selection(batch, args.out)
        print(f"wrote {len(batch)} ids to {args.out}")
    else:
        for ex_id in batch:
            print(ex_id)
    return 0


def _cmd_simulate(args) -> int:
    config = load_campaign_config(args.config)
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    if not config.corpus_path:
        print("error: config must set `corpus`", file=sys.stderr)
        return 1
    if config.oracle_spec != "gold":
        print("error: simulate needs `oracle = gold` (interactive runs use `serve`)", file=sys.stderr)
        return 1
    corpus = load_corpus(config.corpus_path, config.source_lang, config.target_lang)
    eval_corpus = None
    if config.eval_corpus_path:
        eval_corpus = load_corpus(config.eval_corpus_path, config.source_lang, config.target_lang)
    state = run_campaign(corpus, config, eval_corpus=eval_corpus)
    os.makedirs(args.out_dir, exist_ok=True)
    metrics_path = os.path.join(args.out_dir, "metrics.jsonl")
    write_metrics(state.metrics, metrics_path)
    for q, batch in enumerate(state.selected_rounds, start=1):
        write_selection(batch, os.path.join(args.out_dir, f"selection_round_{q:02d}.txt"))
    for rec in state.metrics:
        tgt = rec["target_accuracy"]
        tgt_text = "n/a" if tgt is None else f"{tgt:.4f}"
        print(
            f"round {rec['round']}: budget={rec['cumulative_budget']} "
            f"source_acc={rec['source_accuracy']:.4f} target_acc={tgt_text} "
            f"coverage={rec['compound_coverage']:.4f}"
        )
    print(f"metrics written to {metrics_path}")
    if args.report:
        for path in render_metrics_figures(state.metrics, args.out_dir):
            print(f"figure written to {path}")
    return 0


def _cmd_tune(args) -> int:
    corpus = load_corpus(args.corpus, args.source_lang, args.target_lang)
    grid = TuningGrid()
    if args.grid:
        raw = parse_kv_file(args.grid)
        unknown = set(raw) - {"alphas", "betas", "tuning_rate", "dev_fraction"}
        if unknown:
            print(f"error: unknown grid keys {sorted(unknown)}", file=sys.stderr)
            return 1
        if raw.get("alphas"):
            grid.alphas = [float(v) for v in raw["alphas"].split(",") if v.strip()]
        if raw.get("betas"):
            grid.betas = [float(v) for v in raw["betas"].split(",") if v.strip()]
        if raw.get("tuning_rate"):
            grid.tuning_rate = float(raw["tuning_rate"])
        if raw.get("dev_fraction"):
            grid.dev_fraction = float(raw["dev_fraction"])
    config = CampaignConfig(
        seed=args.seed, source_lang=args.source_lang, target_lang=args.target_lang
    )
    result = tune_hyperparameters(corpus, grid, config)
    for row in result.table:
        print(
            f"alpha={row['alpha']:<5} beta={row['beta']:<5} "
            f"dev_accuracy={row['dev_accuracy']:.4f} (|selection|={row['selected']})"
        )
    print(f"best: alpha={result.alpha} beta={result.beta} ({result.cycles} cycles)")
    if args.out:
        write_metrics(result.table, args.out)
        print(f"table written to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    print(f"annotation service on http://{args.host}:{args.port}")
    if args.journal:
        print(f"journal dir: {args.journal}")
    serve(args.host, args.port, args.journal)
    return 0


def _cmd_report(args) -> int:
    records = []
    for path in args.metrics:
        records.extend(read_metrics(path))
    if not records:
        print("error: metrics files contain no records", file=sys.stderr)
        return 1
    os.makedirs(args.out_dir, exist_ok=True)
    summary_path = os.path.join(args.out_dir, "summary.jsonl")
    write_metrics(aggregate_metrics(records), summary_path)
    print(f"summary written to {summary_path}")
    for path in render_metrics_figures(records, args.out_dir):
        print(f"figure written to {path}")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transpick",
        description="Budgeted selection of examples for human translation in multilingual semantic parsing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a corpus file")
    p.add_argument("corpus")
    _add_lang_args(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("gen-corpus", help="write a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--templates", type=int, default=30)
    p.add_argument("--per-template", type=int, default=20)
    p.add_argument("--paraphrases", type=int, default=3)
    p.add_argument("--entities", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    _add_lang_args(p)
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("select", help="score the pool and print one batch")
    p.add_argument("--corpus", required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--unit", choices=["atoms", "compounds", "both"])
    p.add_argument("--n-best", type=int, dest="n_best")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["al-msp", "amsp"])
    p.add_argument("--selected", help="file of already-translated ids (one per line)")
    p.add_argument("--out", help="write the batch here instead of stdout")
    _add_lang_args(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("simulate", help="run a campaign against gold translations")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--seed", type=int)
    p.add_argument("--report", action="store_true", help="also render figures")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tune", help="grid-search the combined strategy's weights")
    p.add_argument("--corpus", required=True)
    p.add_argument("--grid", help="key = value file: alphas, betas, tuning_rate, dev_fraction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the result table here")
    _add_lang_args(p)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("serve", help="start the annotation service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--journal", help="directory for per-session journals")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("report", help="aggregate metrics and render figures")
    p.add_argument("--metrics", nargs="+", required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
