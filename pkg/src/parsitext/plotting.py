"""SVG line charts for ROC and learning curves (matplotlib, headless)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_learning_curve", "plot_roc"]

# fixed element ids and no timestamp, so reruns write identical files
_SVG_RC = {"svg.hashsalt": "parsitext", "svg.fonttype": "none"}


def _save(fig, path: Path, stamp: str):
    metadata = {"Date": None, "Description": stamp} if stamp else {"Date": None}
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
    return path


def plot_roc(roc, path, title: str = "ROC", stamp: str = ""):
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot(roc.fpr, roc.tpr, drawstyle="default", lw=1.5, label=f"AUC = {roc.auc:.4f}")
    ax.plot([0, 1], [0, 1], ls="--", lw=0.8, color="grey")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    return _save(fig, Path(path), stamp)


def plot_learning_curve(curve, path, title: str = "Learning curve", stamp: str = ""):
    sizes = [p.size for p in curve.points]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(sizes, [p.train for p in curve.points], marker="o", label="train")
    ax.plot(sizes, [p.val for p in curve.points], marker="s", label="validation")
    ax.set_xlabel("training documents")
    ax.set_ylabel(curve.metric)
    ax.set_ylim(0, 1.02)
    ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    return _save(fig, Path(path), stamp)
