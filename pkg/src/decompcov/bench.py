"""Monte Carlo benchmark harness: normalized MSE versus sample size.

Protocol per (sample size, trial): draw Gaussian data from a ground-truth
model, form the sufficient statistic, run each requested estimator, fall
back to the positive-part projection when an estimate fails the PSD check
(optional, on by default), and record ``||K_hat - K||^2 / ||K||^2``.
Per-trial seeds are derived from (master seed, n, trial), so results are
bit-identical regardless of worker count.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ._linalg import frob2
from .errors import DecompCovError
from .estimators import be, mle, mvue, sure_tuned
from .models import GroundTruth, ModelSpec, make_model, sample_gaussian
from .projection import positive_part
from .stats import sufficient_stats

__all__ = [
    "BenchConfig",
    "BenchRow",
    "BenchResult",
    "run_benchmark",
    "write_results",
    "read_results",
    "emit_plot_data",
    "model_tag",
    "config_from_mapping",
]

RESULT_COLUMNS = (
    "model",
    "estimator",
    "n",
    "trials",
    "nmse_mean",
    "nmse_stderr",
    "psd_failure_rate",
)

_ESTIMATOR_FNS = {"mle": mle, "mvue": mvue, "be": be, "sure": sure_tuned}
_ALIASES = {
    "mle": "mle",
    "mvue": "mvue",
    "be": "be",
    "sure": "sure",
    "sure_d": "sure",
    "zero": "zero",
}


def canonical_estimators(names: Sequence[str]) -> tuple[str, ...]:
    out = []
    for name in names:
        key = str(name).strip().lower()
        if key not in _ALIASES:
            raise ValueError(
                f"unknown estimator {name!r}; choose from mle, mvue, be, sure, zero"
            )
        tag = _ALIASES[key]
        if tag not in out:
            out.append(tag)
    if not out:
        raise ValueError("estimator list is empty")
    return tuple(out)


@dataclass(frozen=True)
class BenchConfig:
    model: ModelSpec
    n_grid: tuple[int, ...]
    trials: int
    estimators: tuple[str, ...] = ("mle", "mvue", "be", "sure")
    master_seed: int = 0
    positive_part_fallback: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError(f"n_grid entries must be >= 1, got {self.n_grid}")
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(
            self, "estimators", canonical_estimators(self.estimators)
        )


@dataclass(frozen=True)
class BenchRow:
    model: str
    estimator: str
    n: int
    trials: int
    nmse_mean: float
    nmse_stderr: float
    psd_failure_rate: float


@dataclass(frozen=True)
class BenchResult:
    rows: tuple[BenchRow, ...]


def model_tag(spec: ModelSpec) -> str:
    return f"{spec.kind}-p{spec.p}" if spec.p else spec.kind


def config_from_mapping(payload: Mapping) -> BenchConfig:
    """Build a config from a parsed JSON mapping."""
    model = payload["model"]
    spec = ModelSpec(
        kind=model["kind"],
        p=int(model.get("p", 0)),
        params=dict(model.get("params", {})),
        seed=int(model.get("seed", payload.get("master_seed", 0))),
        conditioning=float(model.get("conditioning", 1.0)),
    )
    return BenchConfig(
        model=spec,
        n_grid=tuple(int(n) for n in payload["n_grid"]),
        trials=int(payload["trials"]),
        estimators=tuple(payload.get("estimators", ("mle", "mvue", "be", "sure"))),
        master_seed=int(payload.get("master_seed", 0)),
        positive_part_fallback=bool(payload.get("positive_part_fallback", True)),
    )


def _run_trial(truth: GroundTruth, n: int, seed_key, estimators, fallback, k_norm2):
    """One (n, trial) cell: returns {estimator: (nmse, raw_nmse, psd_failed, ok)}."""
    data = sample_gaussian(truth, n, np.random.SeedSequence(seed_key))
    stats = sufficient_stats(data, truth.graph)
    out = {}
    for tag in estimators:
        if tag == "zero":
            out[tag] = (1.0, 1.0, False, True)
            continue
        try:
            est = _ESTIMATOR_FNS[tag](stats)
        except DecompCovError:
            out[tag] = (np.nan, np.nan, False, False)
            continue
        raw = frob2(est.matrix - truth.k_true) / k_norm2
        psd_failed = est.psd is False
        if psd_failed and fallback:
            adjusted = positive_part(est)
            nmse = frob2(adjusted.matrix - truth.k_true) / k_norm2
        else:
            nmse = raw
        out[tag] = (nmse, raw, psd_failed, True)
    return out


def _trial_star(args):
    return _run_trial(*args)


def run_benchmark(config: BenchConfig, workers: int = 1) -> BenchResult:
    """Run the full grid.  ``workers > 1`` fans trials out to processes;
    the result is identical either way."""
    import warnings

    truth = make_model(config.model)
    k_norm2 = frob2(truth.k_true)
    tag = model_tag(config.model)
    max_c = truth.graph.max_clique_size()
    rows: list[BenchRow] = []

    for n in config.n_grid:
        active = [
            e for e in config.estimators if e == "zero" or n >= max_c
        ]
        if not active:
            continue
        args = [
            (
                truth,
                n,
                (config.master_seed, n, t),
                tuple(active),
                config.positive_part_fallback,
                k_norm2,
            )
            for t in range(config.trials)
        ]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if workers > 1:
                chunk = max(1, config.trials // (8 * workers))
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    per_trial = list(pool.map(_trial_star, args, chunksize=chunk))
            else:
                per_trial = [_run_trial(*a) for a in args]

        for est in active:
            cells = [per_trial[t][est] for t in range(config.trials)]
            ok = np.array([c[3] for c in cells], dtype=bool)
            nmse = np.array([c[0] for c in cells])[ok]
            raw = np.array([c[1] for c in cells])[ok]
            failed = np.array([c[2] for c in cells])[ok]
            count = int(ok.sum())
            if count == 0:
                continue
            rows.append(
                BenchRow(
                    model=tag,
                    estimator=est,
                    n=n,
                    trials=count,
                    nmse_mean=float(np.mean(nmse)),
                    nmse_stderr=_stderr(nmse),
                    psd_failure_rate=float(np.mean(failed)),
                )
            )
            if config.positive_part_fallback and bool(failed.any()):
                # Unadjusted companion series, for judging the fallback's effect.
                rows.append(
                    BenchRow(
                        model=tag,
                        estimator=f"{est}_raw",
                        n=n,
                        trials=count,
                        nmse_mean=float(np.mean(raw)),
                        nmse_stderr=_stderr(raw),
                        psd_failure_rate=float(np.mean(failed)),
                    )
                )
    return BenchResult(rows=tuple(rows))


def _stderr(values: np.ndarray) -> float:
    if values.size <= 1:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(values.size))


def write_results(result: BenchResult, path) -> None:
    """CSV with the fixed header; floats at full round-trip precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in result.rows:
            writer.writerow(
                [
                    row.model,
                    row.estimator,
                    row.n,
                    row.trials,
                    repr(row.nmse_mean),
                    repr(row.nmse_stderr),
                    repr(row.psd_failure_rate),
                ]
            )


def read_results(path) -> BenchResult:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(RESULT_COLUMNS):
            raise ValueError(f"unexpected results header in {path}: {header}")
        rows = [
            BenchRow(
                model=rec[0],
                estimator=rec[1],
                n=int(rec[2]),
                trials=int(rec[3]),
                nmse_mean=float(rec[4]),
                nmse_stderr=float(rec[5]),
                psd_failure_rate=float(rec[6]),
            )
            for rec in reader
            if rec
        ]
    return BenchResult(rows=tuple(rows))


def emit_plot_data(result: BenchResult, path) -> None:
    """Plot-ready JSON: one (n, nmse, stderr) series per estimator.

    Layout::

        {"model": tag,
         "series": [{"estimator": tag,
                     "n": [...], "nmse": [...], "stderr": [...]}, ...]}
    """
    models = sorted({row.model for row in result.rows})
    model = models[0] if len(models) == 1 else models
    series = []
    seen: list[str] = []
    for row in result.rows:
        if row.estimator not in seen:
            seen.append(row.estimator)
    for est in seen:
        picked = sorted(
            (r for r in result.rows if r.estimator == est), key=lambda r: r.n
        )
        series.append(
            {
                "estimator": est,
                "n": [r.n for r in picked],
                "nmse": [r.nmse_mean for r in picked],
                "stderr": [r.nmse_stderr for r in picked],
            }
        )
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"model": model, "series": series}, fh, indent=2)
        fh.write("\n")
