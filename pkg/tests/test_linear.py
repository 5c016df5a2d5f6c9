import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dmgwalk import linear
from dmgwalk.graph import GraphError, canonicalize, new_graph
from dmgwalk.linear import LinearSystemError, WeightedLinearSystem
from dmgwalk.testbench import random_graph


def params(s):
    b, l = s.beta_matrix, s.lambda_matrix
    return b, l


def test_fig1b_printed_covariances(fig1b, rng):
    for _ in range(5):
        s = linear.random_weights(fig1b, rng)
        b, l = params(s)
        S = linear.covariance_closed_form(s)
        var3 = l[2, 2] + l[0, 0] * b[0, 2] ** 2 + l[1, 1] * b[1, 2] ** 2
        assert S[0, 3] == pytest.approx(l[0, 3] + l[0, 0] * b[0, 2] * b[2, 3], abs=1e-12)
        assert S[2, 2] == pytest.approx(var3, abs=1e-12)
        assert S[2, 3] == pytest.approx(l[0, 3] * b[0, 2] + var3 * b[2, 3], abs=1e-12)


def test_fig1b_marginal_coefficients(fig1b, rng):
    s = linear.random_weights(fig1b, rng)
    b, _ = params(s)
    m = linear.marginal_system(s, ["V1", "V2", "V4", "V5"])
    bt = m.beta_matrix
    assert bt[0, 2] == pytest.approx(b[0, 2] * b[2, 3])
    assert bt[0, 3] == pytest.approx(b[0, 2] * b[2, 4])
    assert bt[1, 2] == pytest.approx(b[1, 2] * b[2, 3])
    assert bt[1, 3] == pytest.approx(b[1, 4] + b[1, 2] * b[2, 4])
    assert bt[2, 3] == pytest.approx(b[3, 4])


def test_sigma_of_printed_trek_set(fig1, rng):
    s = linear.random_weights(fig1, rng)
    b, l = params(s)
    T = linear.trek_rule_covariance(s)
    assert linear.sigma_of(T.treks[0, 3], s) == pytest.approx(l[0, 3] + l[0, 0] * b[0, 2] * b[2, 3])


def test_zero_beta_echoes_lambda(fig1, rng):
    s = linear.random_weights(fig1, rng)
    s0 = WeightedLinearSystem(fig1, {}, s.lam)
    assert np.allclose(linear.covariance_closed_form(s0), s.lambda_matrix)


def test_weights_must_sit_on_edges(fig1):
    with pytest.raises(LinearSystemError):
        WeightedLinearSystem(fig1, {("V1", "V2"): 1.0})
    with pytest.raises(LinearSystemError):
        WeightedLinearSystem(fig1, lam={("V2", "V3"): 1.0})
    with pytest.raises(LinearSystemError):
        WeightedLinearSystem.from_matrices(fig1, np.ones((5, 5)), np.eye(5))


def test_lambda_pairs_are_unordered(fig1):
    s = WeightedLinearSystem(fig1, lam={("V4", "V1"): 0.3, ("V1", "V1"): 1.0})
    assert s.lam == {(0, 3): 0.3, (0, 0): 1.0}
    assert s.lambda_matrix[3, 0] == 0.3


def test_singular_system():
    g = canonicalize(new_graph(["A", "B"], [("A", "B"), ("B", "A")]))
    s = WeightedLinearSystem(g, {("A", "B"): 1.0, ("B", "A"): 1.0},
                             {("A", "A"): 1.0, ("B", "B"): 1.0})
    flags = linear.check_regularity(s)
    assert not flags.nonsingular and not flags.stable
    with pytest.raises(LinearSystemError):
        linear.covariance_closed_form(s)


def test_regularity_of_random_weights(rng):
    for _ in range(10):
        g = random_graph(5, "canonical", 0.5, rng)
        f = linear.check_regularity(linear.random_weights(g, rng))
        assert f.stable and f.principally_stable and f.nonsingular and f.lambda_pd


def test_random_weights_zero_rows_without_loops(rng):
    g = new_graph(["A", "B"], [("A", "B")], [("A", "A")])
    s = linear.random_weights(g, rng)
    assert s.lambda_matrix[1].tolist() == [0.0, 0.0]
    assert linear.check_regularity(s).lambda_psd
    assert not linear.check_regularity(s).lambda_pd


def test_neumann_series_converges(rng):
    g = random_graph(4, "canonical", 0.6, rng)
    s = linear.random_weights(g, rng)
    inv = np.linalg.inv(np.eye(4) - s.beta_matrix)
    assert np.allclose(linear.neumann_truncated(s, 200), inv)


def test_symbolic_and_power_truncations_agree(rng):
    # cyclic: walk enumeration and matrix powers must give the same partial sums
    g = canonicalize(new_graph(["A", "B", "C"], [("A", "B"), ("B", "C"), ("C", "A")],
                               [("A", "C")]))
    s = linear.random_weights(g, rng)
    for n in (1, 2, 4, 6):
        T = linear.trek_rule_covariance(s, n)
        assert not T.exact
        assert np.allclose(T.values, linear.trek_sum_by_length(s, n), atol=1e-13)


def test_path_analysis_requires_acyclic():
    g = canonicalize(new_graph(["A", "B"], [("A", "B"), ("B", "A")]))
    s = linear.random_weights(g, 0)
    with pytest.raises(GraphError):
        linear.path_analysis_covariance(s, "A", "B")


def test_regression_coefficient_matches_least_squares(fig1b, rng):
    s = linear.random_weights(fig1b, rng)
    S = linear.covariance_closed_form(s)
    for j, k in itertools.permutations(range(5), 2):
        rest = [v for v in range(5) if v not in (j, k)]
        for L in ([], rest[:1], rest[:2]):
            X = [j] + list(L)
            coef = np.linalg.solve(S[np.ix_(X, X)], S[X, k])
            assert linear.regression_coefficient(s, k, j, L) == pytest.approx(coef[0], abs=1e-12)


def test_total_effect_matches_inverse(fig1b, rng):
    s = linear.random_weights(fig1b, rng)
    inv = np.linalg.inv(np.eye(5) - s.beta_matrix)
    for j, k in itertools.permutations(range(5), 2):
        assert linear.total_causal_effect(s, j, k) == pytest.approx(inv[j, k], abs=1e-13)


def test_conditional_independence(fig1, rng):
    s = linear.random_weights(fig1, rng)
    ok, stat = linear.conditionally_independent(s, "V1", "V2")
    assert ok and stat < 1e-12
    ok, stat = linear.conditionally_independent(s, "V1", "V2", ["V3"])
    assert not ok
    with pytest.raises(LinearSystemError):
        linear.conditionally_independent(s, "V1", "V1")


def test_backdoor_free_toy(rng):
    g = canonicalize(new_graph(["A", "B"], [("A", "B")]))
    s = linear.random_weights(g, rng)
    assert linear.adjustment_criterion_marginal(g, "A", "B") == (True, True)
    assert linear.adjustment_criterion(g, "A", "B") == (True, True, True)
    assert linear.symmetric_no_confounding(g, "A", "B")
    assert linear.regression_coefficient(s, "B", "A") == pytest.approx(s.beta[(0, 1)])


def test_fig1b_direct_confounding(fig1b):
    for r in range(4):
        for L in itertools.combinations(["V2", "V3", "V5"], r):
            assert linear.adjustment_criterion(fig1b, "V1", "V4", L)[0] is False


def test_symmetric_criterion_fig1b(fig1b):
    assert linear.symmetric_no_confounding(fig1b, "V2", "V5", ["V3"]) is False


def test_criteria_need_canonical_acyclic(fig1):
    from dmgwalk.graph import trim

    with pytest.raises(GraphError):
        linear.adjustment_criterion(trim(fig1), "V1", "V4")


def test_marginal_system_full_keep(fig1b, rng):
    s = linear.random_weights(fig1b, rng)
    m = linear.marginal_system(s, fig1b.labels)
    assert np.allclose(m.beta_matrix, s.beta_matrix)
    assert np.allclose(m.lambda_matrix, s.lambda_matrix)


@given(st.integers(0, 2**32 - 1))
def test_trek_rule_matches_closed_form(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(int(rng.integers(1, 7)), "canonical_acyclic", 0.5, rng)
    s = linear.random_weights(g, rng)
    T = linear.trek_rule_covariance(s)
    assert T.exact
    assert np.allclose(T.values, linear.covariance_closed_form(s), atol=1e-10)
    if g.d > 1:
        assert np.allclose(linear.path_analysis_matrix(s), T.values, atol=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_marginal_covariance_is_submatrix(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(int(rng.integers(2, 7)), "canonical", 0.4, rng)
    s = linear.random_weights(g, rng)
    keep = sorted(rng.choice(g.d, int(rng.integers(1, g.d + 1)), replace=False).tolist())
    try:
        m = linear.marginal_system(s, keep)
    except GraphError:
        return  # a directed self-loop would appear; no graph to carry the system
    S = linear.covariance_closed_form(s)
    assert np.allclose(linear.covariance_closed_form(m), S[np.ix_(keep, keep)], atol=1e-10)
