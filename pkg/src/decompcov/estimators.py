"""Closed-form concentration estimators for decomposable models.

Every estimator here is a weighted clique/separator sum

    sum_k [ a_k * inv(S_k) ]^0  -  sum_k [ b_k * inv(S_[k]) ]^0

differing only in the coefficients:

    maximum likelihood   a_k = n            b_k = n
    minimum-variance     a_k = n - c_k - 1  b_k = n - s_k - 1
      unbiased (MVUE)
    tuned family         a_k = n - c_k - 1 - d,  b_k = n - s_k - 1 - d

plus a trace-shrunk variant of the MVUE that subtracts ``I / tr(scatter)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ._linalg import frob2, inv_spd, spd_cholesky, sym
from .errors import NotPositiveDefinite, SingularBlock, TooFewSamples, ZeroTrace
from .graph import _indices
from .stats import SufficientStats

__all__ = [
    "ConcentrationEstimate",
    "clique_sum",
    "mle",
    "mvue",
    "be",
    "sure_tuned",
    "local_consistency_residual",
]


@dataclass(eq=False)
class ConcentrationEstimate:
    """Pattern-conforming symmetric estimate with method metadata.

    ``psd`` is a tri-state: True (verified PSD), False (verified not PSD),
    None (unchecked).  ``pattern_exact`` records whether off-pattern entries
    are structural zeros; projections onto the PSD cone may break it.
    """

    matrix: np.ndarray
    method: str
    n_used: int
    psd: bool | None = None
    d: float | None = None
    pattern_exact: bool = True
    projection: str | None = None


def _require_samples(stats: SufficientStats) -> None:
    max_c = stats.graph.max_clique_size()
    if stats.n < max_c:
        raise TooFewSamples(stats.n, max_c)


def block_inverses(stats: SufficientStats):
    """Inverses of all clique and separator blocks (empty separators skipped
    as None).  Raises SingularBlock naming the offending block."""
    cliques = []
    for k, block in enumerate(stats.clique_blocks):
        cliques.append(
            inv_spd(block, exc=SingularBlock, what=f"clique {k + 1} block")
        )
    seps = []
    for k, block in enumerate(stats.sep_blocks):
        if block.shape[0] == 0:
            seps.append(None)
        else:
            seps.append(
                inv_spd(block, exc=SingularBlock, what=f"separator {k + 2} block")
            )
    return cliques, seps


def clique_sum(
    stats: SufficientStats,
    alpha: Sequence[float],
    beta: Sequence[float],
) -> np.ndarray:
    """Assemble ``sum_k [alpha_k inv(S_k)]^0 - sum_k [beta_k inv(S_[k])]^0``.

    ``alpha`` has one entry per clique, ``beta`` one per separator; empty
    separators contribute nothing regardless of their coefficient.
    """
    graph = stats.graph
    alpha = list(alpha)
    beta = list(beta)
    if len(alpha) != graph.n_cliques or len(beta) != graph.n_cliques - 1:
        raise ValueError(
            f"need {graph.n_cliques} clique and {graph.n_cliques - 1} separator "
            f"coefficients, got {len(alpha)} and {len(beta)}"
        )
    inv_cliques, inv_seps = block_inverses(stats)
    out = np.zeros((graph.p, graph.p))
    for c, a_k, inv_block in zip(graph.cliques, alpha, inv_cliques):
        idx = _indices(c)
        out[np.ix_(idx, idx)] += a_k * inv_block
    for s, b_k, inv_block in zip(graph.separators, beta, inv_seps):
        if inv_block is None:
            continue
        idx = _indices(s)
        out[np.ix_(idx, idx)] -= b_k * inv_block
    return out


def _psd_flag(matrix: np.ndarray) -> bool:
    return bool(np.linalg.eigvalsh(matrix)[0] >= 0.0)


def mle(stats: SufficientStats) -> ConcentrationEstimate:
    """Maximum likelihood estimate; positive definite whenever it exists."""
    _require_samples(stats)
    n = float(stats.n)
    k = stats.graph.n_cliques
    matrix = clique_sum(stats, [n] * k, [n] * (k - 1))
    # PD is guaranteed once every clique block is invertible; no eigencheck.
    return ConcentrationEstimate(matrix=matrix, method="mle", n_used=stats.n, psd=True)


def mvue(stats: SufficientStats) -> ConcentrationEstimate:
    """Minimum variance unbiased estimate.

    Exists for n >= max clique size but can be indefinite; a warning is
    emitted when n <= p + 1, where positive definiteness cannot hold with
    probability one.
    """
    _require_samples(stats)
    if stats.n <= stats.graph.p + 1:
        warnings.warn(
            f"unbiased estimate with n = {stats.n} <= p + 1 = {stats.graph.p + 1} "
            "cannot be positive definite with probability one",
            RuntimeWarning,
            stacklevel=2,
        )
    n = float(stats.n)
    alpha = [n - len(c) - 1 for c in stats.graph.cliques]
    beta = [n - len(s) - 1 for s in stats.graph.separators]
    matrix = clique_sum(stats, alpha, beta)
    return ConcentrationEstimate(
        matrix=matrix, method="mvue", n_used=stats.n, psd=_psd_flag(matrix)
    )


def be(stats: SufficientStats) -> ConcentrationEstimate:
    """Trace-shrunk biased estimate: MVUE minus ``I / tr(scatter)``.

    Dominates the MVUE in mean squared error.
    """
    if stats.diag_trace <= 0.0:
        raise ZeroTrace(f"scatter trace must be positive, got {stats.diag_trace}")
    base = mvue(stats)
    matrix = base.matrix - np.eye(stats.graph.p) / stats.diag_trace
    return ConcentrationEstimate(
        matrix=matrix, method="be", n_used=stats.n, psd=_psd_flag(matrix)
    )


def sure_tuned(stats: SufficientStats) -> ConcentrationEstimate:
    """Member of the tuned family with the risk-minimizing coefficient d."""
    from .sure import compute_d

    _require_samples(stats)
    d = compute_d(stats).d
    n = float(stats.n)
    alpha = [n - len(c) - 1 - d for c in stats.graph.cliques]
    beta = [n - len(s) - 1 - d for s in stats.graph.separators]
    matrix = clique_sum(stats, alpha, beta)
    return ConcentrationEstimate(
        matrix=matrix, method="sure", n_used=stats.n, psd=_psd_flag(matrix), d=d
    )


def local_consistency_residual(
    est: ConcentrationEstimate, stats: SufficientStats
) -> float:
    """Worst-clique mismatch between ``inv(estimate)`` and the scaled scatter.

    Returns ``max_k || [inv(K_hat)]_{C_k,C_k} - S_k / n ||_F``; approximately
    zero for the maximum likelihood estimate and generally positive for the
    others.
    """
    inv_est = inv_spd(est.matrix, what="estimate")
    worst = 0.0
    for c, block in zip(stats.graph.cliques, stats.clique_blocks):
        idx = _indices(c)
        diff = inv_est[np.ix_(idx, idx)] - block / float(stats.n)
        worst = max(worst, float(np.sqrt(frob2(diff))))
    return worst
