"""Synthetic ground-truth concentration matrices and Gaussian sampling.

Structures cover the usual decomposable motifs (block-diagonal, coupled
blocks, banded, differential banding, arrow, multiscale trees) plus three
fixed large presets matching published call-center model dimensions.
Generation draws uniform(-1, 1) entries on the off-diagonal edges and
shifts the diagonal to guarantee a positive-definiteness margin, so the
sparsity pattern is exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ._linalg import inv_spd, sym
from .graph import DecomposableGraph, build_graph, from_pattern

__all__ = ["ModelSpec", "GroundTruth", "make_model", "sample_gaussian", "MODEL_KINDS"]

MODEL_KINDS = (
    "block-diagonal",
    "two-coupled-blocks",
    "banded",
    "differential-banded",
    "arrow",
    "multiscale",
    "paper-two-cliques",
    "paper-banded",
    "paper-diffband",
)

# Fixed dimensions of the three large presets.
PRESET_P = {"paper-two-cliques": 100, "paper-banded": 239, "paper-diffband": 239}


@dataclass(frozen=True)
class ModelSpec:
    """Recipe for a ground-truth model.

    ``params`` is kind-specific:
      block-diagonal:      block_sizes (list summing to p) or n_blocks
      two-coupled-blocks:  c1 (first clique size), overlap
      banded:              band (L; cliques {j..j+L})
      differential-banded: n_head, l_head, l_tail (head starts use bandwidth
                           l_head, the rest l_tail; nested spans absorbed)
      arrow:               hub (global block size), block (local block size)
      multiscale:          branching (tree arity)
    The three fixed presets take no params and pin p (100 / 239 / 239).
    ``conditioning`` is the guaranteed lower bound on the smallest
    eigenvalue of the generated concentration matrix.
    """

    kind: str
    p: int
    params: Mapping[str, object] = field(default_factory=dict)
    seed: int = 0
    conditioning: float = 1.0


@dataclass(eq=False)
class GroundTruth:
    graph: DecomposableGraph
    k_true: np.ndarray
    # Cholesky factor of the covariance, filled lazily by sample_gaussian.
    _cov_chol: np.ndarray | None = None


def _blocks_partition(p: int, params) -> list[list[int]]:
    sizes = params.get("block_sizes")
    if sizes is None:
        n_blocks = int(params.get("n_blocks", 2))
        if not 1 <= n_blocks <= p:
            raise ValueError(f"n_blocks must be in 1..{p}, got {n_blocks}")
        base, extra = divmod(p, n_blocks)
        sizes = [base + (1 if i < extra else 0) for i in range(n_blocks)]
    sizes = [int(s) for s in sizes]
    if any(s < 1 for s in sizes) or sum(sizes) != p:
        raise ValueError(f"block sizes {sizes} must be positive and sum to {p}")
    out, start = [], 1
    for s in sizes:
        out.append(list(range(start, start + s)))
        start += s
    return out


def _cliques_two_coupled(p: int, params) -> list[list[int]]:
    if p < 3:
        raise ValueError("two-coupled-blocks needs p >= 3")
    c1 = int(params.get("c1", max(2, round(0.7 * p))))
    overlap = int(params.get("overlap", max(1, round(0.1 * p))))
    if not (1 <= overlap < c1 < p) or c1 - overlap < 1:
        raise ValueError(
            f"invalid two-coupled-blocks shape: c1 = {c1}, overlap = {overlap}, p = {p}"
        )
    return [list(range(1, c1 + 1)), list(range(c1 - overlap + 1, p + 1))]


def _cliques_banded(p: int, band: int) -> list[list[int]]:
    if band < 0 or band + 1 > p:
        raise ValueError(f"bandwidth {band} invalid for p = {p}")
    if band == 0:
        return [[j] for j in range(1, p + 1)]
    return [list(range(j, j + band + 1)) for j in range(1, p - band + 1)]


def _diffband_pattern(p: int, n_head: int, l_head: int, l_tail: int) -> np.ndarray:
    """Union of banded spans {k..k+L_k}; nested spans are absorbed later."""
    if min(l_head, l_tail) < 1 or n_head < 0:
        raise ValueError("differential banding needs positive bandwidths")
    mask = np.eye(p, dtype=bool)
    for k in range(1, p + 1):
        width = l_head if k <= n_head else l_tail
        hi = min(p, k + width)
        idx = np.arange(k - 1, hi)
        mask[np.ix_(idx, idx)] = True
    return mask


def _cliques_arrow(p: int, params) -> list[list[int]]:
    hub = int(params.get("hub", 1))
    block = int(params.get("block", 1))
    if not (1 <= hub < p) or block < 1:
        raise ValueError(f"invalid arrow shape: hub = {hub}, block = {block}, p = {p}")
    head = list(range(1, hub + 1))
    cliques = []
    start = hub + 1
    while start <= p:
        stop = min(p, start + block - 1)
        cliques.append(head + list(range(start, stop + 1)))
        start = stop + 1
    return cliques


def _multiscale_pattern(p: int, branching: int) -> np.ndarray:
    if branching < 2:
        raise ValueError(f"branching must be >= 2, got {branching}")
    mask = np.eye(p, dtype=bool)
    for parent in range(1, p + 1):
        for c in range(branching):
            child = branching * (parent - 1) + 2 + c
            if child <= p:
                mask[parent - 1, child - 1] = True
                mask[child - 1, parent - 1] = True
    return mask


def _structure(spec: ModelSpec) -> DecomposableGraph:
    kind, p, params = spec.kind, spec.p, spec.params
    if kind in PRESET_P:
        expect = PRESET_P[kind]
        if p not in (0, expect):
            raise ValueError(f"{kind} fixes p = {expect}, got p = {p}")
        p = expect
    if p < 1:
        raise ValueError(f"model dimension must be positive, got p = {p}")

    if kind == "block-diagonal":
        return build_graph(_blocks_partition(p, params), p)
    if kind == "two-coupled-blocks":
        return build_graph(_cliques_two_coupled(p, params), p)
    if kind == "banded":
        return build_graph(_cliques_banded(p, int(params.get("band", 1))), p)
    if kind == "differential-banded":
        n_head = int(params.get("n_head", max(1, round(p * 58 / 239))))
        l_head = int(params.get("l_head", max(2, round(p * 14 / 239))))
        l_tail = int(params.get("l_tail", max(1, round(p * 4 / 239))))
        return from_pattern(_diffband_pattern(p, n_head, l_head, l_tail))
    if kind == "arrow":
        return build_graph(_cliques_arrow(p, params), p)
    if kind == "multiscale":
        if p == 1:
            return build_graph([[1]], 1)
        return from_pattern(_multiscale_pattern(p, int(params.get("branching", 2))))
    if kind == "paper-two-cliques":
        return build_graph([list(range(1, 71)), list(range(61, 101))], 100)
    if kind == "paper-banded":
        return build_graph(_cliques_banded(239, 20), 239)
    if kind == "paper-diffband":
        return from_pattern(_diffband_pattern(239, 58, 14, 4))
    raise ValueError(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")


def make_model(spec: ModelSpec) -> GroundTruth:
    """Draw a pattern-exact positive definite concentration matrix.

    Off-diagonal edge entries are i.i.d. uniform(-1, 1); the diagonal is then
    shifted by ``|lambda_min| + conditioning`` so the smallest eigenvalue is
    at least ``conditioning``.
    """
    if spec.conditioning <= 0:
        raise ValueError(f"conditioning must be > 0, got {spec.conditioning}")
    graph = _structure(spec)
    p = graph.p
    rng = np.random.default_rng(spec.seed)
    k_mat = np.zeros((p, p))
    off_edges = sorted((i, j) for (i, j) in graph.edge_set if i != j)
    if off_edges:
        vals = rng.uniform(-1.0, 1.0, size=len(off_edges))
        for (i, j), v in zip(off_edges, vals):
            k_mat[i - 1, j - 1] = v
            k_mat[j - 1, i - 1] = v
    lam_min = float(np.linalg.eigvalsh(k_mat)[0])
    k_mat[np.diag_indices(p)] += abs(lam_min) + spec.conditioning
    return GroundTruth(graph=graph, k_true=k_mat)


def sample_gaussian(truth: GroundTruth, n: int, seed) -> np.ndarray:
    """n i.i.d. zero-mean Gaussian rows with covariance ``k_true^{-1}``.

    Deterministic given ``seed`` (an int or a numpy SeedSequence).
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    if truth._cov_chol is None:
        sigma = inv_spd(truth.k_true, what="ground-truth concentration")
        truth._cov_chol = np.linalg.cholesky(sym(sigma))
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, truth.graph.p))
    return z @ truth._cov_chol.T
