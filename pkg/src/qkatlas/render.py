"""Matplotlib rendering of Hasse diagrams and verification summaries."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .posets import FinitePoset


def _positions(poset: FinitePoset):
    if poset.rank is not None:
        levels: dict[int, list[int]] = {}
        for i, r in enumerate(poset.rank):
            levels.setdefault(r, []).append(i)
    else:
        # longest-path rank from the minimal elements
        depth = [0] * poset.n
        for i, j in poset.covers():
            depth[j] = max(depth[j], depth[i] + 1)
        levels = {}
        for i, d in enumerate(depth):
            levels.setdefault(d, []).append(i)
    pos = {}
    for r in sorted(levels):
        row = sorted(levels[r], key=lambda i: poset.names[i])
        width = len(row)
        for k, i in enumerate(row):
            pos[i] = (k - (width - 1) / 2.0, r)
    return pos


def render_hasse_png(poset: FinitePoset, path, labels=None, title: str = ""):
    pos = _positions(poset)
    width = max(3.0, 1.1 * (1 + max(x for x, _ in pos.values()) - min(x for x, _ in pos.values())))
    height = max(2.5, 0.9 * (2 + max(y for _, y in pos.values()) - min(y for _, y in pos.values())))
    fig, ax = plt.subplots(figsize=(min(width, 18), min(height, 12)))
    for i, j in poset.covers():
        (x0, y0), (x1, y1) = pos[i], pos[j]
        ax.plot([x0, x1], [y0, y1], color="0.55", lw=0.9, zorder=1)
        if labels is not None and (i, j) in labels:
            t = labels[(i, j)]
            name = t if isinstance(t, str) else t.word_str
            ax.text(
                (x0 + x1) / 2,
                (y0 + y1) / 2,
                name,
                fontsize=5,
                color="tab:red",
                ha="center",
                va="center",
                zorder=3,
            )
    xs = [pos[i][0] for i in range(poset.n)]
    ys = [pos[i][1] for i in range(poset.n)]
    ax.scatter(xs, ys, s=110, color="white", edgecolor="black", zorder=2)
    for i in range(poset.n):
        ax.annotate(
            poset.names[i],
            pos[i],
            fontsize=6,
            ha="center",
            va="center",
            zorder=4,
        )
    ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def render_report_png(rows, path, title: str = "verification summary"):
    """One bar per (label, passed) row."""
    rows = list(rows)
    fig, ax = plt.subplots(figsize=(7, max(1.6, 0.42 * len(rows) + 1)))
    names = [r[0] for r in rows]
    values = [1 for _ in rows]
    colors = ["tab:green" if r[1] else "tab:red" for r in rows]
    ax.barh(range(len(rows)), values, color=colors, height=0.6)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xticks([])
    ax.invert_yaxis()
    for k, r in enumerate(rows):
        ax.text(0.5, k, "pass" if r[1] else "FAIL", ha="center", va="center", fontsize=7)
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
