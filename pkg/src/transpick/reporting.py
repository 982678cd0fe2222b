"""Campaign reports: aggregate per-round metrics records across seeds
and render the learning curves to image files."""
from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_CURVES = [
    ("source_accuracy", "source exact-match accuracy", "accuracy_source"),
    ("target_accuracy", "target exact-match accuracy", "accuracy_target"),
    ("compound_coverage", "distinct-compound coverage", "coverage"),
]


def aggregate_metrics(records: list[dict]) -> list[dict]:
    """Mean metric values per (strategy, cumulative_budget) across runs."""
    groups: dict[tuple[str, int], list[dict]] = {}
    for rec in records:
        groups.setdefault((rec["strategy"], rec["cumulative_budget"]), []).append(rec)
    out = []
    for (strategy, budget), rows in sorted(groups.items()):
        entry: dict = {"strategy": strategy, "cumulative_budget": budget, "runs": len(rows)}
        for key, _, _ in _CURVES:
            values = [r[key] for r in rows if r.get(key) is not None]
            entry[f"mean_{key}"] = sum(values) / len(values) if values else None
        out.append(entry)
    return out


def render_metrics_figures(records: list[dict], out_dir: str, stem: str = "campaign") -> list[str]:
    """One figure per metric: mean curve over cumulative budget, one
    line per strategy.  Returns the written file paths."""
    if not records:
        raise ValueError("no metrics records to render")
    os.makedirs(out_dir, exist_ok=True)
    aggregated = aggregate_metrics(records)
    strategies = sorted({row["strategy"] for row in aggregated})
    paths = []
    for key, ylabel, suffix in _CURVES:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        drew = False
        for strategy in strategies:
            points = [
                (row["cumulative_budget"], row[f"mean_{key}"])
                for row in aggregated
                if row["strategy"] == strategy and row[f"mean_{key}"] is not None
            ]
            if not points:
                continue
            points.sort()
            ax.plot([p[0] for p in points], [p[1] for p in points], marker="o", label=strategy)
            drew = True
        if not drew:
            plt.close(fig)
            continue
        ax.set_xlabel("translated examples (cumulative)")
        ax.set_ylabel(ylabel)
        ax.set_ylim(-0.02, 1.02)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, f"{stem}_{suffix}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths
