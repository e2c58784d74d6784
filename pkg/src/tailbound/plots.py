"""Figure rendering for the analysis pipeline.

Renders the tail comparison plot (empirical survival frequency, the
fitted Pareto tails, and the empirical bound curve) to an image file.
Import is deferred so the rest of the package works without a display
stack.
"""
from __future__ import annotations

import math


def render_tail_plot(plot_data: dict, out_path: str, log_scale: bool = True) -> None:
    """Draw the tail comparison curves contained in ``plot_data``.

    ``plot_data`` is the column dictionary produced by
    ``returns.emit_tail_plot_data``: a ``nu`` grid plus one probability
    column per curve. NaN entries are simply not drawn.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    nu = plot_data["nu"]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    styles = {
        "empirical": dict(color="black", lw=1.6, label="empirical frequency"),
        "eb": dict(color="tab:red", lw=1.4, ls="--", label="empirical bound"),
    }
    palette = ("tab:blue", "tab:green", "tab:orange", "tab:purple")
    model_idx = 0
    for name, ys in plot_data.items():
        if name == "nu":
            continue
        if name in styles:
            style = styles[name]
        else:
            style = dict(color=palette[model_idx % len(palette)], lw=1.2,
                         label=name)
            model_idx += 1
        xs = [x for x, y in zip(nu, ys) if not math.isnan(y)]
        vals = [y for y in ys if not math.isnan(y)]
        if vals:
            ax.plot(xs, vals, **style)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("loss threshold (percent)")
    ax.set_ylabel("exceedance probability")
    ax.legend(loc="upper right", fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
