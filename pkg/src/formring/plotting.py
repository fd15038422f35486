"""Report figures (PNG) for the command-line jobs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.figsize": (6.0, 3.6),
    "figure.dpi": 100,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "svg.hashsalt": "formring",
}


def _save(fig, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return str(path)


def frontier_growth(levels, path: Path, title: str = "closure frontier") -> str:
    """New elements per breadth-first layer, log scale."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        xs = range(len(levels))
        ax.bar(xs, [max(v, 0) for v in levels], color="#4c72b0")
        ax.set_yscale("log")
        ax.set_xlabel("BFS layer")
        ax.set_ylabel("new elements")
        ax.set_title(title)
        return _save(fig, path)


def resolution_bars(summary: dict, path: Path) -> str:
    """Accepted vs unresolved relation patterns per family pair."""
    pairs = sorted(summary)
    acc = [summary[p][0] for p in pairs]
    unres = [summary[p][1] - summary[p][0] for p in pairs]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(pairs, acc, color="#55a868", label="accepted")
        ax.bar(pairs, unres, bottom=acc, color="#c44e52", label="unresolved")
        ax.set_ylabel("patterns")
        ax.set_title("commutator relation table")
        ax.legend(frameon=False)
        return _save(fig, path)


def injectivity_bars(verdicts, path: Path, title: str) -> str:
    """Congruence-subgroup size per k, colored by the injectivity verdict."""
    ks = [str(v["k"]) for v in verdicts]
    sizes = [v["elements"] for v in verdicts]
    colors = ["#55a868" if v["injective"] else "#c44e52" for v in verdicts]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(ks, sizes, color=colors)
        ax.set_xlabel("k")
        ax.set_ylabel("|GQ(R, s^k)|")
        ax.set_title(title)
        return _save(fig, path)


def coset_sizes(counts: dict, path: Path, title: str) -> str:
    """Bar chart of a few named group orders."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        names = list(counts)
        ax.bar(names, [counts[k] for k in names], color="#8172b2")
        ax.set_yscale("log")
        ax.set_title(title)
        return _save(fig, path)
