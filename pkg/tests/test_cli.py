import json

import numpy as np
import pytest

from decompcov import read_matrix_csv, read_results
from decompcov.cli import build_parser, main


def run(argv):
    return main([str(a) for a in argv])


def write_tridiagonal_pattern(path, p=4):
    mask = np.eye(p)
    for i in range(p - 1):
        mask[i, i + 1] = mask[i + 1, i] = 1.0
    np.savetxt(path, mask, delimiter=",", fmt="%d")


def test_graph_check_json(tmp_path, capsys):
    src = tmp_path / "g.json"
    src.write_text(json.dumps({"p": 5, "cliques": [[3, 4], [1, 2], [2, 3], [4, 5]]}))
    out = tmp_path / "normalized.json"
    assert run(["graph-check", "--pattern", src, "--out", out]) == 0
    printed = capsys.readouterr().out
    assert "cardinality identity" in printed
    payload = json.loads(out.read_text())
    assert payload["p"] == 5 and len(payload["cliques"]) == 4


def test_graph_check_csv_pattern(tmp_path):
    src = tmp_path / "pattern.csv"
    write_tridiagonal_pattern(src)
    assert run(["graph-check", "--pattern", src]) == 0


def test_graph_check_four_cycle_exits_one(tmp_path, capsys):
    src = tmp_path / "cycle.csv"
    mask = np.eye(4)
    for i, j in [(0, 1), (1, 2), (2, 3), (0, 3)]:
        mask[i, j] = mask[j, i] = 1.0
    np.savetxt(src, mask, delimiter=",", fmt="%d")
    assert run(["graph-check", "--pattern", src]) == 1
    assert "chordal" in capsys.readouterr().err


def test_estimate_mvue_hand_value(tmp_path):
    # Data rows engineered so the scatter is exactly 10 * I_3.
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"p": 3, "cliques": [[1, 2], [2, 3]]}))
    data = np.zeros((10, 3))
    data[:3, :] = np.sqrt(10.0) * np.eye(3)
    data_path = tmp_path / "d.csv"
    np.savetxt(data_path, data, delimiter=",", fmt="%.17g")
    out = tmp_path / "est.csv"
    assert run(["estimate", "--method", "mvue", "--graph", graph,
                "--data", data_path, "--out", out]) == 0
    est = read_matrix_csv(out)
    np.testing.assert_allclose(est, np.diag([0.7, 0.6, 0.7]), atol=1e-12)
    sidecar = json.loads((tmp_path / "est.csv.json").read_text())
    assert sidecar["method"] == "mvue"
    assert sidecar["n"] == 10
    assert sidecar["psd"] is True
    assert sidecar["pattern_exact"] is True


def test_estimate_sure_records_d(tmp_path):
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"p": 3, "cliques": [[1, 2], [2, 3]]}))
    data = np.zeros((10, 3))
    data[:3, :] = np.sqrt(10.0) * np.eye(3)
    data_path = tmp_path / "d.csv"
    np.savetxt(data_path, data, delimiter=",", fmt="%.17g")
    out = tmp_path / "est.csv"
    assert run(["estimate", "--method", "sure", "--graph", graph,
                "--data", data_path, "--out", out]) == 0
    sidecar = json.loads((tmp_path / "est.csv.json").read_text())
    assert sidecar["d"] == pytest.approx(10.0 / 3.0, abs=1e-12)


def test_full_pipeline_simulate_estimate_bench(tmp_path):
    data = tmp_path / "data.csv"
    truth = tmp_path / "truth.csv"
    graph = tmp_path / "graph.json"
    assert run(["simulate", "--model", "banded", "--p", 10, "--band", 2,
                "--n", 40, "--seed", 3,
                "--out-data", data, "--out-truth", truth,
                "--out-graph", graph]) == 0
    loaded = np.loadtxt(data, delimiter=",")
    assert loaded.shape == (40, 10)
    k_true = read_matrix_csv(truth)
    assert np.linalg.eigvalsh(k_true)[0] > 0

    est = tmp_path / "est.csv"
    assert run(["estimate", "--method", "mle", "--graph", graph,
                "--data", data, "--out", est]) == 0
    assert read_matrix_csv(est).shape == (10, 10)

    results = tmp_path / "bench.csv"
    plot_json = tmp_path / "bench.json"
    plot_png = tmp_path / "bench.png"
    assert run(["bench", "--model", "banded", "--p", 10, "--band", 2,
                "--n-grid", "15,30", "--trials", 8, "--seed", 5,
                "--estimators", "mle,mvue,zero",
                "--out", results, "--plot-json", plot_json,
                "--plot", plot_png]) == 0
    res = read_results(results)
    assert {r.estimator for r in res.rows} >= {"mle", "mvue", "zero"}
    assert plot_json.exists() and plot_png.exists() and plot_png.stat().st_size > 0


def test_simulate_deterministic_given_seed(tmp_path):
    out = []
    for tag in ("a", "b"):
        data = tmp_path / f"{tag}.csv"
        run(["simulate", "--model", "arrow", "--p", 6, "--n", 12, "--seed", 9,
             "--out-data", data, "--out-truth", tmp_path / f"t{tag}.csv",
             "--out-graph", tmp_path / f"g{tag}.json"])
        out.append(data.read_text())
    assert out[0] == out[1]


def test_bench_config_file(tmp_path):
    config = {
        "model": {"kind": "banded", "p": 5, "params": {"band": 1}, "seed": 2},
        "n_grid": [10],
        "trials": 6,
        "estimators": ["mle", "zero"],
        "master_seed": 4,
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / "r.csv"
    assert run(["bench", "--config", cfg, "--out", out]) == 0
    assert len(read_results(out).rows) == 2


def test_bench_missing_flags_is_validation_error(tmp_path, capsys):
    assert run(["bench", "--out", tmp_path / "r.csv"]) == 1
    assert "missing" in capsys.readouterr().err


def test_sure_check_report(tmp_path):
    report = tmp_path / "report.json"
    assert run(["sure-check", "--model", "two-coupled-blocks", "--p", 5,
                "--params", '{"c1": 3, "overlap": 1}',
                "--n", 12, "--trials", 400, "--seed", 21,
                "--report", report]) == 0
    payload = json.loads(report.read_text())
    assert payload["all_pass"] is True
    assert len(payload["checks"]) == 3
    for check in payload["checks"]:
        assert set(check) >= {
            "h", "lhs_mean", "lhs_stderr", "rhs_mean", "rhs_stderr",
            "diff", "combined_stderr", "pass_4sigma",
        }


def test_estimate_with_projection_flags(tmp_path):
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"p": 6, "cliques": [[1, 2, 3, 4], [4, 5, 6]]}))
    rng = np.random.default_rng(0)
    found = None
    for seed in range(60):
        data = rng.standard_normal((5, 6))
        from decompcov import build_graph, mvue, sufficient_stats
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            est = mvue(sufficient_stats(data, build_graph([[1, 2, 3, 4], [4, 5, 6]], 6)))
        if est.psd is False:
            found = data
            break
    assert found is not None, "no indefinite draw found"
    data_path = tmp_path / "d.csv"
    np.savetxt(data_path, found, delimiter=",", fmt="%.17g")

    out_pp = tmp_path / "pp.csv"
    assert run(["estimate", "--method", "mvue", "--graph", graph,
                "--data", data_path, "--positive-part", "--out", out_pp]) == 0
    sidecar = json.loads((tmp_path / "pp.csv.json").read_text())
    assert sidecar["projection"] == "positive-part"
    assert sidecar["pattern_exact"] is False
    assert np.linalg.eigvalsh(read_matrix_csv(out_pp))[0] >= -1e-12

    out_full = tmp_path / "full.csv"
    assert run(["estimate", "--method", "mvue", "--graph", graph,
                "--data", data_path, "--project-full", "--tol", 1e-9,
                "--out", out_full]) == 0
    sidecar = json.loads((tmp_path / "full.csv.json").read_text())
    assert sidecar["projection"] == "pattern-psd"
    assert sidecar["pattern_exact"] is True
    mat = read_matrix_csv(out_full)
    assert mat[0, 4] == 0.0 and mat[0, 5] == 0.0
    assert np.linalg.eigvalsh(mat)[0] >= -1e-8


def test_unknown_flag_rejected(tmp_path):
    code = run(["graph-check", "--pattern", tmp_path / "x.json", "--bogus"])
    assert code != 0


def test_exit_code_for_missing_file(tmp_path, capsys):
    assert run(["graph-check", "--pattern", tmp_path / "missing.json"]) == 2
    assert "error" in capsys.readouterr().err.lower()


def test_help_documents_every_flag():
    parser = build_parser()
    subparsers = next(
        a for a in parser._actions
        if isinstance(a, type(parser._subparsers._group_actions[0]))
    )
    for name, sub in subparsers.choices.items():
        text = sub.format_help()
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in text, f"{name} help missing {opt}"


def test_mutually_exclusive_projection_flags(tmp_path, capsys):
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"p": 2, "cliques": [[1, 2]]}))
    data_path = tmp_path / "d.csv"
    np.savetxt(data_path, np.eye(2) * 2, delimiter=",", fmt="%.17g")
    code = run(["estimate", "--method", "mle", "--graph", graph,
                "--data", data_path, "--positive-part", "--project-full",
                "--out", tmp_path / "e.csv"])
    assert code != 0
