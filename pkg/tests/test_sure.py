import numpy as np
import pytest

from decompcov import (
    ModelSpec,
    appendix_c_check,
    build_graph,
    clique_sum,
    compute_d,
    dominance_gap_mle,
    make_model,
    mle,
    mvue,
    nabla_trace_inverse,
    numeric_nabla_trace,
    sample_gaussian,
    stats_from_scatter,
    sufficient_stats,
    sure_identity_mc,
    sure_risk_proxy,
    sure_tuned,
    zero_fill,
)
from decompcov._linalg import frob2
from decompcov.errors import NotPositiveDefinite

P1 = build_graph([{1}], 1)
TWO_CLIQUE = build_graph([{1, 2}, {2, 3}], 3)


def random_spd(dim, rng, spread=1.0):
    a = rng.standard_normal((dim, dim))
    return a @ a.T + (spread + dim) * np.eye(dim)


def random_stats(graph, n, seed):
    rng = np.random.default_rng(seed)
    return sufficient_stats(rng.standard_normal((n, graph.p)), graph)


def test_nabla_trace_inverse_hand_values():
    assert nabla_trace_inverse(np.eye(2)) == pytest.approx(-3.0, abs=1e-12)
    assert nabla_trace_inverse(np.array([[5.0]])) == pytest.approx(-0.04, abs=1e-12)


def test_nabla_trace_inverse_requires_spd():
    with pytest.raises(NotPositiveDefinite):
        nabla_trace_inverse(np.diag([1.0, -2.0]))


def test_nabla_trace_inverse_matches_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(5):
        block = random_spd(4, rng)
        g = build_graph([{1, 2, 3, 4}], 4)
        st = stats_from_scatter(block, 10, g)

        def h(stats):
            return zero_fill(np.linalg.inv(stats.clique_blocks[0]), {1, 2, 3, 4}, 4)

        numeric = numeric_nabla_trace(h, st, step=1e-5)
        analytic = nabla_trace_inverse(block)
        assert numeric == pytest.approx(analytic, rel=1e-5)


def test_numeric_nabla_identity_over_trace():
    st = stats_from_scatter(10 * np.eye(3), 10, TWO_CLIQUE)

    def h(stats):
        return np.eye(3) / stats.diag_trace

    # analytic value -p / tr^2 = -3/900
    assert numeric_nabla_trace(h, st) == pytest.approx(-3.0 / 900.0, rel=1e-6)


def test_numeric_nabla_constant_function_is_zero():
    st = random_stats(TWO_CLIQUE, 12, 1)
    const = np.ones((3, 3))
    assert numeric_nabla_trace(lambda s: const, st) == 0.0


def test_numeric_nabla_clique_inverse_cross_check():
    g = build_graph([{1, 2}, {2, 3}, {3, 4}], 4)
    st = random_stats(g, 20, 2)

    def h(stats):
        return zero_fill(np.linalg.inv(stats.clique_blocks[1]), g.cliques[1], 4)

    numeric = numeric_nabla_trace(h, st)
    analytic = nabla_trace_inverse(st.clique_blocks[1])
    assert numeric == pytest.approx(analytic, rel=1e-5)


def test_compute_d_scalar_and_two_clique():
    st1 = stats_from_scatter(np.array([[5.0]]), 10, P1)
    out = compute_d(st1)
    assert out.d == pytest.approx(2.0, abs=1e-12)
    assert out.numerator == pytest.approx(0.08, abs=1e-14)
    assert out.denominator == pytest.approx(0.04, abs=1e-14)

    st2 = stats_from_scatter(10 * np.eye(3), 10, TWO_CLIQUE)
    out2 = compute_d(st2)
    assert out2.d == pytest.approx(10.0 / 3.0, abs=1e-12)
    assert out2.numerator == pytest.approx(0.10, abs=1e-14)
    assert out2.denominator == pytest.approx(0.03, abs=1e-14)


def test_compute_d_positive_and_matches_numeric_oracle():
    rng = np.random.default_rng(3)
    kinds = [
        ("banded", 5, {"band": 1}),
        ("banded", 6, {"band": 2}),
        ("two-coupled-blocks", 6, {}),
        ("arrow", 5, {}),
    ]
    for trial in range(12):
        kind, p, params = kinds[trial % len(kinds)]
        g = make_model(ModelSpec(kind=kind, p=p, params=params, seed=trial)).graph
        st = random_stats(g, p + 8, 100 + trial)
        out = compute_d(st)
        assert out.d > 0.0

        def d_fn(stats):
            k = stats.graph.n_cliques
            return clique_sum(stats, [1.0] * k, [1.0] * (k - 1))

        numeric = -2.0 * numeric_nabla_trace(d_fn, st) / out.denominator
        assert out.d == pytest.approx(numeric, rel=1e-4)


def test_risk_proxy_minimized_at_computed_d():
    st = random_stats(build_graph([{1, 2}, {2, 3}, {3, 4}], 4), 25, 4)
    d_star = compute_d(st).d
    grid = np.linspace(d_star - 2.0, d_star + 2.0, 401)
    vals = [sure_risk_proxy(d, st) for d in grid]
    assert grid[int(np.argmin(vals))] == pytest.approx(d_star, abs=0.011)


def test_risk_proxy_quadratic_identity():
    st = random_stats(build_graph([{1, 2, 3}, {3, 4}], 4), 18, 5)
    tuning = compute_d(st)
    # tr(grad D) = -numerator / 2
    tr_nabla_d = -tuning.numerator / 2.0
    for d in (0.5, 1.0, 3.25):
        delta = sure_risk_proxy(d, st) - sure_risk_proxy(0.0, st)
        expect = d**2 * tuning.denominator + 4.0 * d * tr_nabla_d
        assert delta == pytest.approx(expect, rel=1e-9)


def test_risk_proxy_unbiased_for_mse_monte_carlo():
    # Oracle: E[proxy(d) + ||K||^2] equals E||K_d - K||^2 (fixed d = 1).
    truth = make_model(ModelSpec(kind="two-coupled-blocks", p=3,
                                 params={"c1": 2, "overlap": 1}, seed=6))
    n, trials, d_fix = 12, 20000, 1.0
    k2 = frob2(truth.k_true)
    proxy = np.empty(trials)
    loss = np.empty(trials)
    for t in range(trials):
        data = sample_gaussian(truth, n, np.random.SeedSequence([31, t]))
        st = sufficient_stats(data, truth.graph)
        proxy[t] = sure_risk_proxy(d_fix, st) + k2
        base = mvue(st).matrix
        k = st.graph.n_cliques
        k_d = base - d_fix * clique_sum(st, [1.0] * k, [1.0] * (k - 1))
        loss[t] = frob2(k_d - truth.k_true)
    se = np.hypot(proxy.std(ddof=1), loss.std(ddof=1)) / np.sqrt(trials)
    assert abs(proxy.mean() - loss.mean()) <= 4 * se


def test_dominance_gap_scalar_hand_value():
    st = stats_from_scatter(np.array([[5.0]]), 10, P1)
    out = dominance_gap_mle(st)
    assert out.trace_nabla_h == pytest.approx(0.08, abs=1e-14)
    assert out.gap == pytest.approx(-0.48, abs=1e-13)


def test_dominance_gap_pathwise_signs():
    rng = np.random.default_rng(7)
    kinds = [
        ("banded", 6, {"band": 1}),
        ("banded", 8, {"band": 2}),
        ("two-coupled-blocks", 7, {}),
        ("arrow", 6, {"hub": 2}),
        ("block-diagonal", 6, {}),
    ]
    for trial in range(50):
        kind, p, params = kinds[trial % len(kinds)]
        g = make_model(ModelSpec(kind=kind, p=p, params=params, seed=trial)).graph
        st = random_stats(g, p + int(rng.integers(3, 20)), 500 + trial)
        out = dominance_gap_mle(st)
        assert out.trace_nabla_h >= 0.0
        assert out.gap <= 0.0


def test_dominance_gap_matches_mse_difference_monte_carlo():
    truth = make_model(ModelSpec(kind="banded", p=3, params={"band": 1}, seed=8))
    n, trials = 10, 20000
    gaps = np.empty(trials)
    diffs = np.empty(trials)
    for t in range(trials):
        data = sample_gaussian(truth, n, np.random.SeedSequence([77, t]))
        st = sufficient_stats(data, truth.graph)
        gaps[t] = dominance_gap_mle(st).gap
        diffs[t] = frob2(mvue(st).matrix - truth.k_true) - frob2(
            mle(st).matrix - truth.k_true
        )
    se = np.hypot(gaps.std(ddof=1), diffs.std(ddof=1)) / np.sqrt(trials)
    assert abs(gaps.mean() - diffs.mean()) <= 4 * se


def test_appendix_c_hand_cases():
    assert appendix_c_check(np.eye(3), [2]) == (True, True)
    block = np.diag([2.0, 5.0])
    assert appendix_c_check(block, [1]) == (True, True)


def test_appendix_c_random_blocks():
    rng = np.random.default_rng(9)
    for _ in range(200):
        dim = int(rng.integers(2, 7))
        block = random_spd(dim, rng, spread=float(rng.uniform(0.1, 2.0)))
        k = int(rng.integers(1, dim))
        pos = rng.choice(dim, size=k, replace=False)
        assert appendix_c_check(block, pos) == (True, True)


def test_sure_identity_monte_carlo_all_h_families():
    truth = make_model(ModelSpec(kind="two-coupled-blocks", p=5,
                                 params={"c1": 3, "overlap": 1}, seed=10))
    checks = sure_identity_mc(truth, n=14, trials=4000, seed=202)
    assert {c["h"] for c in checks} == {"i_over_trace", "d_matrix", "mle"}
    for c in checks:
        assert c["pass_4sigma"], c


def test_sure_tuned_d_matches_compute_d():
    st = random_stats(build_graph([{1, 2}, {2, 3}], 3), 15, 11)
    assert sure_tuned(st).d == compute_d(st).d
