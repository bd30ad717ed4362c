"""Figure rendering for benchmark results (file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchResult

__all__ = ["render_benchmark_figure"]

_STYLE = {
    "zero": dict(color="0.5", linestyle=":"),
    "mle": dict(color="tab:red", marker="o"),
    "mvue": dict(color="tab:blue", marker="s"),
    "be": dict(color="tab:green", marker="^"),
    "sure": dict(color="tab:purple", marker="d"),
}


def render_benchmark_figure(result: BenchResult, path, title: str | None = None):
    """Normalized MSE vs sample size, one error-bar series per estimator."""
    if not result.rows:
        raise ValueError("benchmark result is empty; nothing to plot")
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    estimators = []
    for row in result.rows:
        if row.estimator not in estimators:
            estimators.append(row.estimator)
    for est in estimators:
        picked = sorted(
            (r for r in result.rows if r.estimator == est), key=lambda r: r.n
        )
        style = _STYLE.get(est, dict(marker="x"))
        ax.errorbar(
            [r.n for r in picked],
            [r.nmse_mean for r in picked],
            yerr=[r.nmse_stderr for r in picked],
            label=est,
            capsize=3,
            **style,
        )
    ax.set_xlabel("sample size n")
    ax.set_ylabel("normalized MSE")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    models = {row.model for row in result.rows}
    ax.set_title(title if title is not None else ", ".join(sorted(models)))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
