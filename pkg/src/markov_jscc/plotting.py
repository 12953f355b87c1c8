"""Figure rendering for the curve-producing commands.

The CSV tables remain the primary interface; these helpers draw the same
data the way the reference figures do (bounds on -log P_j against the
exponent and moderate-deviation approximations) and save to a file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SERIES_STYLE = {
    "converse": dict(color="tab:blue", label="converse bound"),
    "direct": dict(color="black", label="direct bound"),
    "exponent": dict(color="gold", label="exponent approximation"),
    "md": dict(color="tab:green", label="moderate-deviation approximation"),
}


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(6.4, 4.0), dpi=150)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _plot_series(ax, series):
    for key, (xs, ys) in series.items():
        pairs = [(x, y) for x, y in zip(xs, ys) if y is not None]
        if not pairs:
            continue
        ax.plot(*zip(*pairs), **SERIES_STYLE[key])


def save_k_sweep(path, ks, direct, converse, n_exponent, md, n):
    """-log P_j(k, n) bounds and approximations against k (figure-1 layout).

    ``direct``/``converse`` carry log-probability bounds and are negated
    here; vacuous entries (None) are skipped.
    """
    fig, ax = _new_axes("k (source symbols)", f"-log P_j(k, n), n = {n}")
    series = {
        "converse": (ks, [None if v is None else -v for v in converse]),
        "direct": (ks, [None if v is None else -v for v in direct]),
        "exponent": (ks, n_exponent),
        "md": (ks, md),
    }
    _plot_series(ax, series)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_n_sweep(path, ns, direct_norm, converse_norm, exponent, md_norm, ratio):
    """-(1/n) log P_j(ratio*n, n) against n (figure-2 layout), log-x."""
    fig, ax = _new_axes("n (blocklength)", f"-(1/n) log P_j({ratio} n, n)")
    series = {
        "converse": (ns, converse_norm),
        "direct": (ns, direct_norm),
        "exponent": (ns, exponent),
        "md": (ns, md_norm),
    }
    _plot_series(ax, series)
    ax.set_xscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_bound_rows(path, rows, n):
    """Generic renderer for bound_curve rows (one line per bound kind)."""
    fig, ax = _new_axes("k (source symbols)", f"-log P_j(k, n), n = {n}")
    by_kind = {}
    for row in rows:
        if row.log_prob_bound is None:
            continue
        by_kind.setdefault(row.kind, ([], []))
        by_kind[row.kind][0].append(row.k)
        by_kind[row.kind][1].append(-row.log_prob_bound)
    for kind, (ks, values) in sorted(by_kind.items()):
        style = SERIES_STYLE["converse" if "converse" in kind else "direct"]
        ax.plot(ks, values, label=kind, color=style["color"],
                linestyle="--" if kind.endswith("a1") else "-")
    if by_kind:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
