"""Figures rendered next to sweep tables."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first

from .harness import OUTCOMES, ExperimentResult

_OUTCOME_COLORS = {
    "success": "#4c9f70",
    "encoder_failure": "#e0a84c",
    "miss": "#c85c5c",
    "false_decode": "#8e5cc8",
    "training_failure": "#5c7fc8",
}


def render_sweep_figures(axis: str, points: list,
                         out_dir: str | Path) -> list[Path]:
    """Error-rate curve and outcome breakdown for one sweep; returns paths."""
    ok = [(v, r) for v, r in points if isinstance(r, ExperimentResult)]
    if not ok:
        return []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    values = [v for v, _ in ok]
    rates = [r.error_rate for _, r in ok]
    lo = [r.error_rate - r.wilson_low for _, r in ok]
    hi = [r.wilson_high - r.error_rate for _, r in ok]
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(values, rates, yerr=[lo, hi], fmt="o-", capsize=3,
                color="#33557a")
    ax.set_xlabel(axis)
    ax.set_ylabel("error rate")
    ax.set_title(f"Block error rate vs {axis} (Wilson 95%)")
    ax.grid(True, alpha=0.3)
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    path = out / "error_rate.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    bottoms = [0.0] * len(ok)
    xs = range(len(ok))
    for name in OUTCOMES:
        fracs = [r.counts[name] / r.trials for _, r in ok]
        ax.bar(xs, fracs, bottom=bottoms, label=name.replace("_", " "),
               color=_OUTCOME_COLORS[name], width=0.7)
        bottoms = [b + f for b, f in zip(bottoms, fracs)]
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{v:g}" for v in values])
    ax.set_xlabel(axis)
    ax.set_ylabel("fraction of trials")
    ax.set_title("Outcome breakdown")
    ax.legend(fontsize=8, loc="center left", bbox_to_anchor=(1.0, 0.5))
    fig.tight_layout()
    path = out / "outcomes.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written
