"""Command-line frontend.

Subcommands: graph-check, simulate, estimate, bench, sure-check.
Exit codes: 0 success, 1 validation error (bad inputs, non-chordal
patterns, too few samples, ...), 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bench import (
    BenchConfig,
    config_from_mapping,
    emit_plot_data,
    model_tag,
    run_benchmark,
    write_results,
)
from .errors import DecompCovError, NotConverged
from .estimators import be, mle, mvue, sure_tuned
from .graph import from_pattern, read_graph_json, write_graph_json
from .models import MODEL_KINDS, ModelSpec, make_model, sample_gaussian
from .projection import positive_part, project_to_pattern_psd
from .stats import read_data_csv, read_matrix_csv, sufficient_stats, write_matrix_csv
from .sure import sure_identity_mc

_METHODS = {"mle": mle, "mvue": mvue, "be": be, "sure": sure_tuned}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decompcov",
        description=(
            "Inverse covariance estimation in decomposable Gaussian "
            "graphical models: validation, simulation, estimation, "
            "benchmarking, and risk-identity diagnostics."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser(
        "graph-check",
        help="validate a sparsity pattern or clique list and print the clique order",
    )
    g.add_argument(
        "--pattern",
        required=True,
        help="graph JSON ({'p':..,'cliques':[[..]]}) or 0/1 adjacency CSV",
    )
    g.add_argument("--out", help="write the normalized graph JSON here")

    s = sub.add_parser("simulate", help="draw Gaussian data from a synthetic model")
    _add_model_flags(s)
    s.add_argument("--n", required=True, type=int, help="number of samples")
    s.add_argument("--seed", required=True, type=int, help="sampling seed")
    s.add_argument("--out-data", required=True, help="output data CSV (n rows)")
    s.add_argument("--out-truth", required=True, help="output true concentration CSV")
    s.add_argument("--out-graph", required=True, help="output graph JSON")

    e = sub.add_parser("estimate", help="estimate a concentration matrix from data")
    e.add_argument(
        "--method", required=True, choices=sorted(_METHODS), help="estimator"
    )
    e.add_argument("--graph", required=True, help="graph JSON file")
    e.add_argument("--data", required=True, help="data CSV (n rows, p columns)")
    proj = e.add_mutually_exclusive_group()
    proj.add_argument(
        "--positive-part",
        action="store_true",
        help="clip negative eigenvalues when the estimate is not PSD",
    )
    proj.add_argument(
        "--project-full",
        action="store_true",
        help="project onto the pattern-conforming PSD set (Dykstra)",
    )
    e.add_argument("--tol", type=float, default=1e-8, help="projection tolerance")
    e.add_argument(
        "--max-iter", type=int, default=5000, help="projection iteration cap"
    )
    e.add_argument("--out", required=True, help="output estimate CSV (+ .json sidecar)")

    b = sub.add_parser("bench", help="Monte Carlo normalized-MSE benchmark")
    b.add_argument("--config", help="benchmark config JSON (overrides inline flags)")
    _add_model_flags(b, required=False)
    b.add_argument("--n-grid", help="comma-separated sample sizes, e.g. 25,50,100")
    b.add_argument("--trials", type=int, help="Monte Carlo trials per grid point")
    b.add_argument("--seed", type=int, help="master seed")
    b.add_argument(
        "--estimators",
        default="mle,mvue,be,sure",
        help="comma-separated subset of mle,mvue,be,sure,zero",
    )
    b.add_argument(
        "--no-positive-part-fallback",
        action="store_true",
        help="record raw estimates even when they fail the PSD check",
    )
    b.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    b.add_argument("--out", required=True, help="results CSV")
    b.add_argument("--plot-json", help="also write plot-ready JSON here")
    b.add_argument("--plot", help="also render a PNG figure here")

    c = sub.add_parser(
        "sure-check",
        help="Monte Carlo check of the unbiased-risk identity on a synthetic model",
    )
    _add_model_flags(c)
    c.add_argument("--n", required=True, type=int, help="samples per trial")
    c.add_argument("--trials", required=True, type=int, help="Monte Carlo trials")
    c.add_argument("--seed", required=True, type=int, help="master seed")
    c.add_argument("--report", required=True, help="output report JSON")
    return parser


def _add_model_flags(sub, required: bool = True) -> None:
    sub.add_argument(
        "--model", required=required, choices=MODEL_KINDS, help="model structure"
    )
    sub.add_argument(
        "--p", type=int, default=0, help="dimension (fixed for paper-* presets)"
    )
    sub.add_argument("--band", type=int, help="bandwidth L for banded models")
    sub.add_argument(
        "--params",
        help="JSON object of extra structure parameters, e.g. '{\"hub\": 2}'",
    )
    sub.add_argument(
        "--conditioning",
        type=float,
        default=1.0,
        help="lower bound on the smallest eigenvalue of the true concentration",
    )


def _model_spec(args, seed: int) -> ModelSpec:
    params = json.loads(args.params) if args.params else {}
    if args.band is not None:
        params.setdefault("band", args.band)
    return ModelSpec(
        kind=args.model,
        p=args.p,
        params=params,
        seed=seed,
        conditioning=args.conditioning,
    )


def _cmd_graph_check(args) -> int:
    if args.pattern.endswith(".json"):
        graph = read_graph_json(args.pattern)
    else:
        mat = read_matrix_csv(args.pattern)
        graph = from_pattern(mat != 0.0)
    print(f"p = {graph.p}, cliques = {graph.n_cliques}")
    print("cliques (perfect elimination order):")
    for k, c in enumerate(graph.cliques, start=1):
        sep = graph.separators[k - 2] if k >= 2 else ()
        sep_txt = f"  separator {set(sep) if sep else '{}'}" if k >= 2 else ""
        print(f"  C{k} = {set(c)}{sep_txt}")
    total_c = sum(graph.clique_sizes())
    total_s = sum(graph.separator_sizes())
    print(
        f"cardinality identity: sum|C| - sum|S| = {total_c} - {total_s} "
        f"= {total_c - total_s} (p = {graph.p})"
    )
    if args.out:
        write_graph_json(graph, args.out)
        print(f"wrote {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    spec = _model_spec(args, seed=args.seed)
    truth = make_model(spec)
    data = sample_gaussian(truth, args.n, args.seed)
    np.savetxt(args.out_data, data, delimiter=",", fmt="%.17g")
    write_matrix_csv(truth.k_true, args.out_truth)
    write_graph_json(truth.graph, args.out_graph)
    print(
        f"simulated {args.n} x {truth.graph.p} samples from "
        f"{model_tag(spec)} (seed {args.seed})"
    )
    return 0


def _cmd_estimate(args) -> int:
    graph = read_graph_json(args.graph)
    data = read_data_csv(args.data)
    stats = sufficient_stats(data, graph)
    est = _METHODS[args.method](stats)
    sidecar = {"method": est.method, "n": est.n_used, "psd": est.psd}
    if est.d is not None:
        sidecar["d"] = est.d
    try:
        if args.positive_part:
            est = positive_part(est)
            sidecar["projection"] = "positive-part"
        elif args.project_full:
            est, report = project_to_pattern_psd(
                est, graph, tol=args.tol, max_iter=args.max_iter
            )
            sidecar["projection"] = "pattern-psd"
            sidecar["projection_iterations"] = report.iterations
            sidecar["projection_final_change"] = report.final_change
    except NotConverged as err:
        # Keep the best iterate as partial output, flag the failure.
        est = err.estimate
        sidecar["projection"] = "pattern-psd"
        sidecar["error"] = "NotConverged"
        sidecar["projection_iterations"] = err.report.iterations
        sidecar["projection_final_change"] = err.report.final_change
        _write_estimate(args.out, est, sidecar)
        print(str(err), file=sys.stderr)
        return 2
    sidecar["psd"] = est.psd
    sidecar["pattern_exact"] = est.pattern_exact
    _write_estimate(args.out, est, sidecar)
    print(f"wrote {args.out} (+ sidecar {args.out}.json)")
    return 0


def _write_estimate(out, est, sidecar) -> None:
    write_matrix_csv(est.matrix, out)
    with open(f"{out}.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")


def _cmd_bench(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = config_from_mapping(json.load(fh))
    else:
        missing = [
            flag
            for flag, val in (
                ("--model", args.model),
                ("--n-grid", args.n_grid),
                ("--trials", args.trials),
                ("--seed", args.seed),
            )
            if val is None
        ]
        if missing:
            raise ValueError(
                f"bench needs --config or inline flags; missing {', '.join(missing)}"
            )
        config = BenchConfig(
            model=_model_spec(args, seed=args.seed),
            n_grid=tuple(int(v) for v in args.n_grid.split(",")),
            trials=args.trials,
            estimators=tuple(args.estimators.split(",")),
            master_seed=args.seed,
            positive_part_fallback=not args.no_positive_part_fallback,
        )
    result = run_benchmark(config, workers=args.workers)
    write_results(result, args.out)
    print(f"wrote {args.out} ({len(result.rows)} rows)")
    if args.plot_json:
        emit_plot_data(result, args.plot_json)
        print(f"wrote {args.plot_json}")
    if args.plot:
        from .plots import render_benchmark_figure

        render_benchmark_figure(result, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _cmd_sure_check(args) -> int:
    spec = _model_spec(args, seed=args.seed)
    truth = make_model(spec)
    checks = sure_identity_mc(truth, args.n, args.trials, args.seed)
    report = {
        "model": model_tag(spec),
        "p": truth.graph.p,
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "checks": checks,
        "all_pass": all(c["pass_4sigma"] for c in checks),
    }
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    for c in checks:
        status = "PASS" if c["pass_4sigma"] else "FAIL"
        print(
            f"{status} H={c['h']}: lhs {c['lhs_mean']:.6g} vs rhs {c['rhs_mean']:.6g} "
            f"(diff {c['diff']:.3g}, 4*combined stderr "
            f"{4 * c['combined_stderr']:.3g})"
        )
    return 0 if report["all_pass"] else 2


_COMMANDS = {
    "graph-check": _cmd_graph_check,
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "bench": _cmd_bench,
    "sure-check": _cmd_sure_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (DecompCovError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
