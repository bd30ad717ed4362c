"""Sufficient statistics and likelihood evaluation for decomposable models.

The scatter matrix here is the *unnormalized* sum of outer products
``sum_i x_i x_i^T`` (no 1/n); every coefficient formula downstream assumes
that convention.  Only the clique and separator blocks of the scatter are
retained: entries outside the edge set are never part of the statistic.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.special import multigammaln

from ._linalg import inv_spd, logdet_spd, spd_cholesky, sym
from .errors import NotPositiveDefinite, PatternViolation, TooFewSamples
from .graph import DecomposableGraph, _indices

__all__ = [
    "SufficientStats",
    "sufficient_stats",
    "stats_from_scatter",
    "scatter_matrix",
    "hyper_wishart_logpdf",
    "conditional_cov",
    "read_data_csv",
    "read_matrix_csv",
    "write_matrix_csv",
]

# Maximum relative asymmetry tolerated when reading a matrix from disk.
SYMMETRY_RTOL = 1e-9


@dataclass(eq=False)
class SufficientStats:
    """Clique/separator blocks of the unnormalized scatter matrix.

    ``clique_blocks[k]`` is the scatter restricted to clique ``k`` (nodes in
    ascending order); ``sep_blocks[k-1]`` likewise for separator ``k``
    (0-by-0 for empty separators).  ``diag_trace`` is the full trace, which
    is always identified because diagonal entries lie in every edge set.
    """

    n: int
    graph: DecomposableGraph
    clique_blocks: tuple[np.ndarray, ...]
    sep_blocks: tuple[np.ndarray, ...]
    diag_trace: float


def stats_from_scatter(scatter, n: int, graph: DecomposableGraph) -> SufficientStats:
    """Slice an explicit scatter matrix into its sufficient blocks."""
    scatter = np.asarray(scatter, dtype=float)
    if scatter.shape != (graph.p, graph.p):
        raise ValueError(
            f"scatter shape {scatter.shape} does not match p = {graph.p}"
        )
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    cliques = []
    for c in graph.cliques:
        idx = _indices(c)
        cliques.append(scatter[np.ix_(idx, idx)].copy())
    seps = []
    for s in graph.separators:
        idx = _indices(s)
        seps.append(scatter[np.ix_(idx, idx)].copy())
    return SufficientStats(
        n=int(n),
        graph=graph,
        clique_blocks=tuple(cliques),
        sep_blocks=tuple(seps),
        diag_trace=float(np.trace(scatter)),
    )


def sufficient_stats(data, graph: DecomposableGraph) -> SufficientStats:
    """Compute the sufficient statistic of an n-by-p data matrix."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != graph.p:
        raise ValueError(
            f"data must be n x {graph.p}, got shape {tuple(data.shape)}"
        )
    if data.shape[0] < 1:
        raise ValueError("data must contain at least one row")
    if not np.all(np.isfinite(data)):
        raise ValueError("data contains non-finite entries")
    # One gemm for the whole scatter keeps overlapping block entries
    # bit-identical across cliques.
    scatter = sym(data.T @ data)
    return stats_from_scatter(scatter, data.shape[0], graph)


def scatter_matrix(stats: SufficientStats) -> np.ndarray:
    """Reassemble the scatter on the edge set (zeros elsewhere)."""
    out = np.zeros((stats.graph.p, stats.graph.p))
    for c, block in zip(stats.graph.cliques, stats.clique_blocks):
        idx = _indices(c)
        out[np.ix_(idx, idx)] = block
    return out


def _wishart_logpdf(s_block: np.ndarray, n: int, concentration: np.ndarray) -> float:
    """Log density of a Wishart with n degrees of freedom, concentration
    parameterization:

        log |S|^((n-q-1)/2) + log |K|^(n/2) - (nq/2) log 2
          - log Gamma_q(n/2) - tr(K S)/2
    """
    q = s_block.shape[0]
    logdet_s = logdet_spd(s_block, what="scatter block")
    logdet_k = logdet_spd(concentration, what="concentration block")
    return (
        0.5 * (n - q - 1) * logdet_s
        + 0.5 * n * logdet_k
        - 0.5 * n * q * np.log(2.0)
        - multigammaln(0.5 * n, q)
        - 0.5 * float(np.sum(concentration * s_block))
    )


def hyper_wishart_logpdf(stats: SufficientStats, concentration) -> float:
    """Joint log density of the clique/separator blocks.

    Equals the sum of clique-marginal Wishart log densities minus the sum of
    separator-marginal ones, each with n degrees of freedom and the matching
    marginal concentration ``([K^{-1}]_{block})^{-1}``.
    """
    graph = stats.graph
    k_mat = np.asarray(concentration, dtype=float)
    if k_mat.shape != (graph.p, graph.p):
        raise ValueError(
            f"concentration shape {k_mat.shape} does not match p = {graph.p}"
        )
    off = graph.off_pattern_values(k_mat)
    if off.size and np.any(off != 0.0):
        raise PatternViolation(
            "concentration has nonzero entries outside the edge set"
        )
    max_c = graph.max_clique_size()
    if stats.n < max_c:
        raise TooFewSamples(stats.n, max_c)
    sigma = inv_spd(k_mat, what="concentration")

    total = 0.0
    for c, s_block in zip(graph.cliques, stats.clique_blocks):
        idx = _indices(c)
        marg = inv_spd(sigma[np.ix_(idx, idx)], what=f"clique {c} covariance")
        total += _wishart_logpdf(s_block, stats.n, marg)
    for s, s_block in zip(graph.separators, stats.sep_blocks):
        if not s:
            continue
        idx = _indices(s)
        marg = inv_spd(sigma[np.ix_(idx, idx)], what=f"separator {s} covariance")
        total -= _wishart_logpdf(s_block, stats.n, marg)
    return float(total)


def conditional_cov(sigma, i: int, j: int) -> float:
    """Covariance of variables i and j conditioned on all the others.

    For a Gaussian with covariance ``sigma`` this is
    ``sigma_ij - sigma_i,rest (sigma_rest,rest)^{-1} sigma_rest,j`` and it
    vanishes exactly when entry (i, j) of the concentration matrix does.
    """
    sigma = np.asarray(sigma, dtype=float)
    p = sigma.shape[0]
    if i == j:
        raise ValueError("i and j must differ")
    if not (1 <= i <= p and 1 <= j <= p):
        raise ValueError(f"indices ({i}, {j}) outside 1..{p}")
    spd_cholesky(sigma, what="covariance")
    a, b = i - 1, j - 1
    rest = [k for k in range(p) if k not in (a, b)]
    if not rest:
        return float(sigma[a, b])
    s_rr = sigma[np.ix_(rest, rest)]
    factor = cho_factor(s_rr, lower=True)
    solved = cho_solve(factor, sigma[rest, b])
    return float(sigma[a, b] - sigma[a, rest] @ solved)


def read_data_csv(path) -> np.ndarray:
    """Read an n-by-p headerless CSV of real values."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            rows.append([float(v) for v in row])
    if not rows:
        raise ValueError(f"data file {path} is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"ragged rows in {path}: widths {sorted(widths)}")
    return np.asarray(rows, dtype=float)


def read_matrix_csv(path) -> np.ndarray:
    """Read a dense square matrix, enforcing symmetry on load."""
    mat = read_data_csv(path)
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"matrix in {path} is {mat.shape}, expected square")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if float(np.max(np.abs(mat - mat.T))) > SYMMETRY_RTOL * scale:
        raise ValueError(f"matrix in {path} is not symmetric")
    return sym(mat)


def write_matrix_csv(matrix, path) -> None:
    """Write a dense matrix with full round-trip decimal precision."""
    matrix = np.asarray(matrix, dtype=float)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])
