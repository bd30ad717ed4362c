"""Unbiased risk estimation machinery for the clique-sum estimators.

The central object is the graphical differential operator acting on the
incomplete scatter: d/dS_ii on the diagonal, (1/2) d/dS_ij on off-diagonal
edges, zero elsewhere.  Traces of that operator applied to block inverses
have a closed form,

    tr(grad inv(B)) = -(tr(B^-2) + tr(B^-1)^2) / 2,

which drives the risk identities, the dominance gap, and the tuned
shrinkage coefficient.  A central-difference evaluation is kept alongside
as an independent numeric oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from ._linalg import frob2, inv_spd
from .errors import SingularBlock
from .estimators import clique_sum, mle, mvue
from .graph import _indices
from .models import GroundTruth, sample_gaussian
from .stats import SufficientStats, scatter_matrix, stats_from_scatter, sufficient_stats

__all__ = [
    "NablaReport",
    "TunedD",
    "DominanceGap",
    "nabla_trace_inverse",
    "numeric_nabla_trace",
    "nabla_report",
    "compute_d",
    "sure_risk_proxy",
    "dominance_gap_mle",
    "appendix_c_check",
    "sure_identity_mc",
]


@dataclass(frozen=True)
class NablaReport:
    """Analytic vs numeric evaluation of one differential-operator trace."""

    analytic: float
    numeric: float
    abs_err: float
    rel_err: float


def nabla_report(analytic: float, numeric: float) -> NablaReport:
    abs_err = abs(analytic - numeric)
    denom = max(abs(analytic), abs(numeric))
    return NablaReport(
        analytic=float(analytic),
        numeric=float(numeric),
        abs_err=float(abs_err),
        rel_err=float(abs_err / denom) if denom > 0 else 0.0,
    )


class TunedD(NamedTuple):
    """Risk-minimizing coefficient with its numerator/denominator detail."""

    d: float
    numerator: float
    denominator: float


class DominanceGap(NamedTuple):
    """Pathwise unbiased-vs-ML risk gap and the operator trace behind it."""

    gap: float
    trace_nabla_h: float


def nabla_trace_inverse(block) -> float:
    """Closed-form ``tr(grad inv(B))`` for an SPD block B."""
    inv_block = inv_spd(block, what="block")
    return -0.5 * (frob2(inv_block) + float(np.trace(inv_block)) ** 2)


def numeric_nabla_trace(
    h: Callable[[SufficientStats], np.ndarray],
    stats: SufficientStats,
    step: float | None = None,
) -> float:
    """Central-difference evaluation of ``tr(grad H)``.

    One logical variable per unordered edge: perturbing edge (i, j) moves
    both stored symmetric positions, and off-diagonal contributions carry
    the operator's 1/2 weight.  Non-edges contribute nothing.
    """
    graph = stats.graph
    base = scatter_matrix(stats)

    def h_at(scatter: np.ndarray) -> np.ndarray:
        return np.asarray(h(stats_from_scatter(scatter, stats.n, graph)), dtype=float)

    total = 0.0
    for i, j in sorted(graph.edge_set):
        a, b = i - 1, j - 1
        width = step if step is not None else 1e-5 * (1.0 + abs(base[a, b]))
        plus = base.copy()
        minus = base.copy()
        plus[a, b] += width
        minus[a, b] -= width
        if a != b:
            plus[b, a] += width
            minus[b, a] -= width
        diff = (h_at(plus) - h_at(minus)) / (2.0 * width)
        if a == b:
            total += diff[a, a]
        else:
            total += 0.5 * (diff[a, b] + diff[b, a])
    return float(total)


def _block_trace_terms(stats: SufficientStats):
    """Per-block ``tr(inv^2) + tr(inv)^2`` for cliques and separators."""
    clique_terms = []
    for k, block in enumerate(stats.clique_blocks):
        inv_block = inv_spd(block, exc=SingularBlock, what=f"clique {k + 1} block")
        clique_terms.append(frob2(inv_block) + float(np.trace(inv_block)) ** 2)
    sep_terms = []
    for k, block in enumerate(stats.sep_blocks):
        if block.shape[0] == 0:
            sep_terms.append(0.0)
            continue
        inv_block = inv_spd(block, exc=SingularBlock, what=f"separator {k + 2} block")
        sep_terms.append(frob2(inv_block) + float(np.trace(inv_block)) ** 2)
    return clique_terms, sep_terms


def _d_matrix(stats: SufficientStats) -> np.ndarray:
    """Unit-coefficient clique sum: the direction of the tuned family."""
    k = stats.graph.n_cliques
    return clique_sum(stats, [1.0] * k, [1.0] * (k - 1))


def compute_d(stats: SufficientStats) -> TunedD:
    """Risk-minimizing coefficient of the tuned family.

    Equals ``-2 tr(grad D) / ||D||^2`` where D is the unit-coefficient
    clique sum; always strictly positive on valid inputs.
    """
    clique_terms, sep_terms = _block_trace_terms(stats)
    numerator = float(sum(clique_terms) - sum(sep_terms))
    denominator = frob2(_d_matrix(stats))
    return TunedD(d=numerator / denominator, numerator=numerator, denominator=denominator)


def _tuned_trace_nabla(stats: SufficientStats, coeff_d: float) -> float:
    """Analytic ``tr(grad K_hat_d)`` via the per-block closed form."""
    clique_terms, sep_terms = _block_trace_terms(stats)
    n = float(stats.n)
    total = 0.0
    for c, term in zip(stats.graph.cliques, clique_terms):
        total += (n - len(c) - 1 - coeff_d) * (-0.5 * term)
    for s, term in zip(stats.graph.separators, sep_terms):
        total -= (n - len(s) - 1 - coeff_d) * (-0.5 * term)
    return total


def sure_risk_proxy(coeff_d: float, stats: SufficientStats) -> float:
    """Unbiased risk estimate (up to an additive constant independent of d)
    for the tuned-family member with coefficient ``coeff_d``:

        ||K_d||^2 - 2 tr(K_d K_mvue) - 4 tr(grad K_d)
    """
    base = mvue(stats).matrix
    k_d = base - coeff_d * _d_matrix(stats)
    return float(
        frob2(k_d)
        - 2.0 * float(np.sum(k_d * base))
        - 4.0 * _tuned_trace_nabla(stats, coeff_d)
    )


def dominance_gap_mle(stats: SufficientStats) -> DominanceGap:
    """Pathwise quantity whose expectation is MSE(MVUE) - MSE(MLE).

    With H the MVUE-minus-MLE difference, returns ``-||H||^2 - 4 tr(grad H)``
    together with ``tr(grad H)``; the trace is nonnegative pathwise, so the
    gap is nonpositive pathwise.
    """
    graph = stats.graph
    alpha = [-(len(c) + 1.0) for c in graph.cliques]
    beta = [-(len(s) + 1.0) for s in graph.separators]
    h_mat = clique_sum(stats, alpha, beta)
    clique_terms, sep_terms = _block_trace_terms(stats)
    trace_nabla_h = 0.0
    for a_k, term in zip(alpha, clique_terms):
        trace_nabla_h += a_k * (-0.5 * term)
    for b_k, term in zip(beta, sep_terms):
        trace_nabla_h -= b_k * (-0.5 * term)
    return DominanceGap(
        gap=float(-frob2(h_mat) - 4.0 * trace_nabla_h),
        trace_nabla_h=float(trace_nabla_h),
    )


def appendix_c_check(block, sep_positions) -> tuple[bool, bool]:
    """Trace inequalities between an SPD block and a principal submatrix.

    ``sep_positions`` are 0-based positions into the block.  Returns the
    truth of ``tr(inv(B)) >= tr(inv(B_sep))`` and the same for the squared
    inverses; both hold for every SPD block.
    """
    block = np.asarray(block, dtype=float)
    pos = sorted(int(q) for q in sep_positions)
    if not pos:
        raise ValueError("separator position set is empty")
    if pos[0] < 0 or pos[-1] >= block.shape[0]:
        raise ValueError(f"positions {pos} outside block of dim {block.shape[0]}")
    inv_full = inv_spd(block, what="clique block")
    sub = block[np.ix_(pos, pos)]
    inv_sub = inv_spd(sub, what="separator block")
    first = float(np.trace(inv_full)) >= float(np.trace(inv_sub))
    second = frob2(inv_full) >= frob2(inv_sub)
    return first, second


# Named H-functions for the Monte Carlo identity check.  Each entry maps a
# tag to (H(stats), analytic tr(grad H)(stats)).
def _h_i_over_trace(stats: SufficientStats) -> np.ndarray:
    return np.eye(stats.graph.p) / stats.diag_trace


def _trace_nabla_i_over_trace(stats: SufficientStats) -> float:
    return -stats.graph.p / stats.diag_trace**2


def _trace_nabla_d(stats: SufficientStats) -> float:
    clique_terms, sep_terms = _block_trace_terms(stats)
    return -0.5 * float(sum(clique_terms) - sum(sep_terms))


H_FAMILIES = {
    "i_over_trace": (_h_i_over_trace, _trace_nabla_i_over_trace),
    "d_matrix": (_d_matrix, _trace_nabla_d),
    "mle": (
        lambda stats: mle(stats).matrix,
        lambda stats: float(stats.n) * _trace_nabla_d(stats),
    ),
}


def sure_identity_mc(
    truth: GroundTruth,
    n: int,
    trials: int,
    seed: int,
    h_kinds=("i_over_trace", "d_matrix", "mle"),
) -> list[dict]:
    """Monte Carlo check of the identity E tr(H K) = E[tr(H K_mvue) + 2 tr(grad H)].

    Returns one record per H family with both empirical means, standard
    errors, and a pass flag at four combined standard errors.
    """
    unknown = [h for h in h_kinds if h not in H_FAMILIES]
    if unknown:
        raise ValueError(f"unknown H families {unknown}; choose from {sorted(H_FAMILIES)}")
    lhs = {h: np.empty(trials) for h in h_kinds}
    rhs = {h: np.empty(trials) for h in h_kinds}
    for t in range(trials):
        data = sample_gaussian(truth, n, np.random.SeedSequence([seed, n, t]))
        stats = sufficient_stats(data, truth.graph)
        base = mvue(stats).matrix
        for h in h_kinds:
            h_fn, tr_fn = H_FAMILIES[h]
            h_mat = h_fn(stats)
            lhs[h][t] = float(np.sum(h_mat * truth.k_true))
            rhs[h][t] = float(np.sum(h_mat * base)) + 2.0 * tr_fn(stats)
    out = []
    for h in h_kinds:
        lhs_se = float(np.std(lhs[h], ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        rhs_se = float(np.std(rhs[h], ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        diff = float(np.mean(lhs[h]) - np.mean(rhs[h]))
        combined = float(np.hypot(lhs_se, rhs_se))
        out.append(
            {
                "h": h,
                "lhs_mean": float(np.mean(lhs[h])),
                "lhs_stderr": lhs_se,
                "rhs_mean": float(np.mean(rhs[h])),
                "rhs_stderr": rhs_se,
                "diff": diff,
                "combined_stderr": combined,
                "pass_4sigma": bool(abs(diff) <= 4.0 * combined),
            }
        )
    return out
