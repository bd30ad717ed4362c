"""Feasibility restoration for indefinite or off-pattern estimates.

Two routes: eigenvalue clipping onto the PSD cone (cheap, may break the
sparsity pattern), and Dykstra alternating projections onto the
intersection of the PSD cone with the pattern subspace (the constraint set
the estimators live in).  Both are metric projections onto convex sets, so
neither can increase the distance to any feasible matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._linalg import frob2, sym
from .errors import NotConverged
from .estimators import ConcentrationEstimate
from .graph import DecomposableGraph

__all__ = ["ProjectionReport", "positive_part", "project_to_pattern_psd"]


@dataclass(frozen=True)
class ProjectionReport:
    iterations: int
    final_change: float
    converged: bool
    input_error: float | None = None
    output_error: float | None = None


def _eig_clip(matrix: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(matrix)
    clipped = np.clip(vals, 0.0, None)
    return sym((vecs * clipped) @ vecs.T)


def positive_part(est: ConcentrationEstimate) -> ConcentrationEstimate:
    """Project the estimate onto the PSD cone by clipping negative eigenvalues.

    Already-PSD inputs are returned unchanged.  Clipping mixes eigenvectors,
    so the output generally has (small) nonzero entries off the pattern;
    ``pattern_exact`` is cleared to record that.
    """
    matrix = np.asarray(est.matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise ValueError("estimate contains non-finite entries")
    vals = np.linalg.eigvalsh(matrix)
    if vals[0] >= 0.0:
        return replace(est, psd=True)
    return replace(
        est,
        matrix=_eig_clip(matrix),
        psd=True,
        pattern_exact=False,
        projection="positive-part",
    )


def project_to_pattern_psd(
    est: ConcentrationEstimate,
    graph: DecomposableGraph,
    tol: float = 1e-8,
    max_iter: int = 5000,
    k_true: np.ndarray | None = None,
) -> tuple[ConcentrationEstimate, ProjectionReport]:
    """Dykstra projection onto {pattern-conforming PSD matrices}.

    Alternates eigenvalue clipping with exact zeroing of off-pattern
    entries, with Dykstra correction terms so the iterates converge to the
    metric projection.  The pattern step runs last, so the output pattern is
    exact; convergence additionally requires the smallest eigenvalue to be
    >= -tol.  Raises NotConverged (carrying the best iterate) at max_iter.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    mask = graph.pattern_mask()
    x = sym(np.asarray(est.matrix, dtype=float))
    input_error = float(np.sqrt(frob2(x - k_true))) if k_true is not None else None

    def finish(z: np.ndarray, iterations: int, change: float, converged: bool):
        out_err = float(np.sqrt(frob2(z - k_true))) if k_true is not None else None
        report = ProjectionReport(
            iterations=iterations,
            final_change=change,
            converged=converged,
            input_error=input_error,
            output_error=out_err,
        )
        new_est = replace(
            est,
            matrix=z,
            psd=True,
            pattern_exact=True,
            projection="pattern-psd",
        )
        return new_est, report

    # Feasible inputs pass through untouched.
    if not np.any(x[~mask]) and float(np.linalg.eigvalsh(x)[0]) >= 0.0:
        return finish(x.copy(), 1, 0.0, True)

    cone_corr = np.zeros_like(x)
    plane_corr = np.zeros_like(x)
    z_prev = x
    for it in range(1, max_iter + 1):
        y = _eig_clip(x + cone_corr)
        cone_corr = x + cone_corr - y
        z = (y + plane_corr) * mask
        plane_corr = y + plane_corr - z
        change = float(np.sqrt(frob2(z - z_prev)))
        if change <= tol and float(np.linalg.eigvalsh(z)[0]) >= -tol:
            return finish(z, it, change, True)
        z_prev = z
        x = z
    best, report = finish(z_prev, max_iter, change, False)
    raise NotConverged(
        f"projection did not converge within {max_iter} iterations "
        f"(last change {change:.3e})",
        estimate=best,
        report=report,
    )
