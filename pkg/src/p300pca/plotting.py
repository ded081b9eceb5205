"""Matplotlib figures written next to the CSV/JSON outputs."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}
# keeps PNG output byte-stable across runs
_PNG_META = {"Software": None}


def _save(fig, path):
    fig.savefig(path, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_accuracy_table(table, path, chance=50.0):
    """Grouped bars, one group per column (dataset/config), one bar per method.

    ``table`` maps method -> {column: accuracy percent or None}.
    """
    methods = list(table)
    columns = sorted({c for row in table.values() for c in row})
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(columns) + 2), 3.2))
        width = 0.8 / max(len(methods), 1)
        x = np.arange(len(columns))
        for i, m in enumerate(methods):
            vals = [table[m].get(c) for c in columns]
            heights = [np.nan if v is None else v for v in vals]
            ax.bar(x + (i - (len(methods) - 1) / 2) * width, heights, width, label=m)
        ax.axhline(chance, color="0.4", lw=0.8, ls="--")
        ax.set_xticks(x)
        ax.set_xticklabels(columns)
        ax.set_ylabel("subtrial accuracy (%)")
        ax.set_ylim(0, 100)
        ax.legend(ncol=min(len(methods), 4), frameon=False, loc="upper left")
        return _save(fig, path)


def plot_repetitions(accuracies, path, title=""):
    """Per-repetition accuracy with the running mean."""
    acc = np.array([np.nan if a is None else 100 * a for a in accuracies], dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        reps = np.arange(1, acc.size + 1)
        ax.plot(reps, acc, "o", ms=4, color="C0")
        if np.all(np.isfinite(acc)):
            ax.axhline(acc.mean(), color="C1", lw=1, label=f"mean {acc.mean():.1f}%")
            ax.legend(frameon=False)
        ax.set_xlabel("repetition")
        ax.set_ylabel("accuracy (%)")
        ax.set_ylim(-2, 102)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_selection_curve(step_accuracies, chosen, path):
    acc = 100 * np.asarray(step_accuracies, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.plot(np.arange(1, acc.size + 1), acc, "-o", ms=3)
        ax.axvline(len(chosen), color="C1", lw=0.8, ls="--")
        ax.set_xlabel("components selected")
        ax.set_ylabel("CV accuracy (%)")
        return _save(fig, path)


def plot_grand_average(ds, path):
    """Mean target and non-target epochs across all channel-subtrials."""
    t = np.arange(ds.n_features) / (ds.sampling_rate_hz or 1.0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        for label, name in ((1, "target"), (0, "non-target")):
            rows = ds.X[ds.y == label]
            if rows.size:
                ax.plot(t, rows.mean(axis=0), label=name)
        ax.set_xlabel("time after onset (s)")
        ax.set_ylabel("amplitude")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_components(model, path, n=5, sampling_rate_hz=None):
    k = min(n, model.n_components)
    t = np.arange(model.mean.size) / (sampling_rate_hz or 1.0)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        for i in range(k):
            ax.plot(t, model.components[:, i], lw=1, label=f"PC{i}")
        ax.set_xlabel("time (s)" if sampling_rate_hz else "sample")
        ax.legend(frameon=False, ncol=k)
        return _save(fig, path)
