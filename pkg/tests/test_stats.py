import math

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from egodiversity import stats
from egodiversity.stats import (
    ConvergenceError,
    SingularDesignError,
    add_intercept,
    betainc_reg,
    bootstrap_ci,
    f_sf,
    fit_logistic,
    max_diversity_treated,
    minmax_normalize,
    ols,
    one_way_anova,
    paired_t_test,
    propensity_match,
    student_t_ppf,
    student_t_sf,
)


# ---- special functions -------------------------------------------------------


@pytest.mark.parametrize(
    "a,b",
    [(0.5, 0.5), (1.0, 3.0), (2.5, 30.0), (50.5, 0.5), (117415.5, 0.5), (5.0, 5.0)],
)
def test_betainc_against_scipy(a, b):
    for x in np.linspace(0.001, 0.999, 23):
        assert betainc_reg(a, b, float(x)) == pytest.approx(
            scipy.special.betainc(a, b, x), abs=1e-12
        )


def test_betainc_edges():
    assert betainc_reg(2.0, 3.0, 0.0) == 0.0
    assert betainc_reg(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        betainc_reg(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        betainc_reg(1.0, 1.0, 1.5)


@pytest.mark.parametrize("df", [1, 3, 10, 100, 15862])
def test_t_distribution_against_scipy(df):
    for t in (-4.0, -1.3, 0.0, 0.5, 2.2, 22.1):
        assert student_t_sf(t, df) == pytest.approx(scipy.stats.t.sf(t, df), abs=1e-12)
    for q in (0.6, 0.9, 0.975, 0.999):
        assert student_t_ppf(q, df) == pytest.approx(
            scipy.stats.t.ppf(q, df), rel=1e-9, abs=1e-9
        )


def test_f_distribution_against_scipy():
    for f, d1, d2 in [(0.5, 2, 10), (3.2, 4, 40), (6636.8, 2, 234831)]:
        assert f_sf(f, d1, d2) == pytest.approx(scipy.stats.f.sf(f, d1, d2), abs=1e-12)


# ---- normalization ------------------------------------------------------------


def test_minmax_examples():
    assert minmax_normalize([1, 2, 3]).tolist() == [0.0, 0.5, 1.0]
    assert minmax_normalize([5, 5]).tolist() == [0.0, 0.0]
    rng = np.random.default_rng(1)
    v = minmax_normalize(rng.random(100))
    assert v.min() == 0.0 and v.max() == 1.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
def test_minmax_idempotent_on_non_constant(xs):
    v = minmax_normalize(xs)
    if np.ptp(np.asarray(xs)) > 0:
        assert np.allclose(minmax_normalize(v), v, atol=1e-12)


# ---- OLS -----------------------------------------------------------------------


def test_ols_exact_line():
    x = np.linspace(0, 1, 20)
    res = ols(x.copy(), add_intercept(x))
    assert res.coefficients == pytest.approx([0.0, 1.0], abs=1e-12)
    assert res.r_squared == pytest.approx(1.0)


def test_ols_exact_affine_zero_se():
    x = np.linspace(-2, 3, 25)
    res = ols(2 * x + 1, add_intercept(x))
    assert res.coefficients == pytest.approx([1.0, 2.0], abs=1e-10)
    assert np.all(res.std_errors < 1e-8)
    for (lo, hi), c in zip(res.ci95, res.coefficients):
        assert lo <= c <= hi


def test_ols_recovers_planted_effect_and_matches_pinv():
    rng = np.random.default_rng(7)
    X = rng.random((10_000, 2))
    y = 0.9 * X[:, 0] - 0.2 * X[:, 1] + rng.normal(0, 0.05, 10_000)
    Xd = add_intercept(X)
    res = ols(y, Xd)
    oracle = np.linalg.pinv(Xd) @ y
    assert np.max(np.abs(res.coefficients - oracle)) < 1e-10
    assert abs(res.coefficients[1] - 0.9) < 3 * res.std_errors[1]
    assert abs(res.coefficients[2] + 0.2) < 3 * res.std_errors[2]
    # inference sanity against the classical textbook formulas
    resid = y - Xd @ res.coefficients
    sigma2 = resid @ resid / (len(y) - 3)
    se = np.sqrt(np.diag(sigma2 * np.linalg.inv(Xd.T @ Xd)))
    assert res.std_errors == pytest.approx(se, rel=1e-10)


def test_ols_residuals_orthogonal_to_design():
    rng = np.random.default_rng(21)
    X = add_intercept(rng.random((500, 3)))
    y = rng.random(500)
    res = ols(y, X)
    resid = y - X @ res.coefficients
    dots = X.T @ resid
    assert np.max(np.abs(dots)) < 1e-8 * max(1.0, float(np.abs(y).sum()))


def test_ols_scale_invariance_of_fit_quality():
    rng = np.random.default_rng(4)
    X = add_intercept(rng.random((300, 2)))
    y = X @ np.array([0.3, 1.0, -0.5]) + rng.normal(0, 0.1, 300)
    a = ols(y, X)
    b = ols(3.5 * y, X)
    assert b.coefficients == pytest.approx(3.5 * a.coefficients, rel=1e-10)
    assert b.r_squared == pytest.approx(a.r_squared, rel=1e-12)
    assert b.p_values == pytest.approx(a.p_values, rel=1e-9, abs=1e-300)


def test_ols_singular_design():
    x = np.linspace(0, 1, 30)
    X = np.column_stack([np.ones(30), x, x])  # duplicated column
    with pytest.raises(SingularDesignError):
        ols(x, X)


def test_ols_requires_more_rows_than_params():
    with pytest.raises(ValueError):
        ols(np.ones(2), np.ones((2, 2)))


def test_regression_result_invariants():
    rng = np.random.default_rng(11)
    X = add_intercept(rng.random((200, 2)))
    y = rng.random(200)
    res = ols(y, X)
    assert 0.0 <= res.r_squared <= 1.0
    assert res.adj_r_squared <= res.r_squared
    assert res.n_obs == 200
    for (lo, hi), c in zip(res.ci95, res.coefficients):
        assert lo <= c <= hi


# ---- bootstrap -----------------------------------------------------------------


def test_bootstrap_constant_vector():
    assert bootstrap_ci(np.full(50, 2.5), resamples=200, seed=0) == (2.5, 2.5)


def test_bootstrap_deterministic_per_seed():
    rng = np.random.default_rng(5)
    x = rng.normal(0, 1, 400)
    assert bootstrap_ci(x, resamples=1000, seed=42) == bootstrap_ci(
        x, resamples=1000, seed=42
    )
    assert bootstrap_ci(x, resamples=1000, seed=42) != bootstrap_ci(
        x, resamples=1000, seed=43
    )


def test_bootstrap_close_to_normal_theory():
    rng = np.random.default_rng(8)
    n = 10_000
    x = rng.normal(0, 1, n)
    lo, hi = bootstrap_ci(x, resamples=10_000, seed=1)
    half = (hi - lo) / 2
    expect = 1.96 * x.std(ddof=1) / math.sqrt(n)
    assert abs(half - expect) <= 0.2 * expect


# ---- ANOVA and paired t ---------------------------------------------------------


def test_anova_identical_groups():
    res = one_way_anova([[3.0, 3.0, 3.0], [3.0, 3.0], [3.0, 3.0, 3.0]])
    assert res.f == 0.0 and res.p == 1.0


def test_anova_f_equals_t_squared_for_two_groups():
    rng = np.random.default_rng(12)
    a = rng.normal(0, 1, 50)
    b = rng.normal(0.4, 1, 45)
    res = one_way_anova([a, b])
    n1, n2 = len(a), len(b)
    sp = math.sqrt(((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / (n1 + n2 - 2))
    t = (a.mean() - b.mean()) / (sp * math.sqrt(1 / n1 + 1 / n2))
    assert res.f == pytest.approx(t * t, abs=1e-9)
    assert res.df1 == 1 and res.df2 == n1 + n2 - 2
    ref = scipy.stats.f_oneway(a, b)
    assert res.f == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_anova_three_groups_matches_scipy():
    rng = np.random.default_rng(13)
    groups = [rng.normal(i * 0.1, 1, 80 + i) for i in range(3)]
    res = one_way_anova(groups)
    ref = scipy.stats.f_oneway(*groups)
    assert res.f == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p == pytest.approx(ref.pvalue, rel=1e-9)


def test_anova_validation():
    with pytest.raises(ValueError):
        one_way_anova([[1.0]])
    with pytest.raises(ValueError):
        one_way_anova([[1.0], []])


def test_paired_t_identical():
    res = paired_t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert res.t == 0.0 and res.p == 1.0 and res.zero_variance


def test_paired_t_constant_shift_flags_zero_variance():
    res = paired_t_test([2.0, 3.0, 4.0], [1.0, 2.0, 3.0])
    assert math.isinf(res.t) and res.t > 0
    assert res.p == 0.0
    assert res.zero_variance


def test_paired_t_matches_one_sample_oracle():
    rng = np.random.default_rng(14)
    a = rng.normal(0, 1, 60)
    b = a + rng.normal(0.2, 0.4, 60)
    res = paired_t_test(a, b)
    ref = scipy.stats.ttest_rel(a, b)
    assert res.t == pytest.approx(ref.statistic, rel=1e-12)
    assert res.p == pytest.approx(ref.pvalue, rel=1e-9)
    assert res.df == 59


def test_paired_t_validation():
    with pytest.raises(ValueError):
        paired_t_test([1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        paired_t_test([1.0], [1.0])


# ---- matching -------------------------------------------------------------------


def test_match_identical_groups_perfect():
    X = np.array([[1.0, 5.0], [2.0, 7.0], [3.0, 6.0]] * 2)
    treated = np.array([True] * 3 + [False] * 3)
    res = propensity_match(X, treated, names=["a", "b"])
    assert res.n_matched == 3
    assert all(v == 0.0 for v in res.smd_per_covariate.values())
    # every treated row got the control with its exact covariates
    for a, b in res.pairs:
        assert np.array_equal(X[a], X[b])


def test_match_n_bounded():
    rng = np.random.default_rng(15)
    X = rng.random((40, 2))
    treated = np.zeros(40, dtype=bool)
    treated[:25] = True
    res = propensity_match(X, treated)
    assert res.n_matched <= min(25, 15)
    assert res.n_matched == 15


def test_match_pairs_unique():
    rng = np.random.default_rng(16)
    X = rng.random((60, 3))
    treated = rng.random(60) < 0.5
    res = propensity_match(X, treated)
    used = [b for _, b in res.pairs]
    assert len(used) == len(set(used))
    t_used = [a for a, _ in res.pairs]
    assert len(t_used) == len(set(t_used))


def test_match_with_ids_and_reporting():
    X = np.array([[0.0], [1.0], [0.1], [0.9]])
    treated = np.array([True, True, False, False])
    ids = [101, 202, 303, 404]
    res = propensity_match(X, treated, ids=ids, names=["score_feature"])
    assert set(a for a, _ in res.pairs) <= {101, 202}
    assert set(b for _, b in res.pairs) <= {303, 404}


def test_match_tiny_instances_equal_bruteforce_assignment():
    """Frozen tiny instances where greedy matching attains the optimal
    1:1 assignment; the oracle enumerates all assignments."""
    import itertools

    for seed in (3, 5, 11, 21):
        rng = np.random.default_rng(seed)
        nt, nc = 3, 3
        X = rng.normal(0, 1, size=(nt + nc, 1))
        treated = np.array([True] * nt + [False] * nc)
        res = propensity_match(X, treated)
        score = res.propensity_scores
        t_idx = np.flatnonzero(treated)
        c_idx = np.flatnonzero(~treated)
        best_cost = math.inf
        for perm in itertools.permutations(range(nc)):
            cost = sum(abs(score[t_idx[i]] - score[c_idx[perm[i]]]) for i in range(nt))
            best_cost = min(best_cost, cost)
        got_cost = sum(abs(score[a] - score[b]) for a, b in res.pairs)
        assert got_cost == pytest.approx(best_cost, abs=1e-12), seed


def test_match_validation():
    X = np.ones((4, 1))
    with pytest.raises(ValueError):
        propensity_match(X, [True, True, True, True])
    with pytest.raises(ValueError):
        propensity_match(np.array([[np.nan]] * 4), [True, False, True, False])


def test_logistic_nonconvergence_diagnostic():
    # an iteration budget too small to settle raises with the count
    rng = np.random.default_rng(29)
    x = rng.normal(0, 1, 200)
    y = (rng.random(200) < 1 / (1 + np.exp(-2 * x))).astype(float)
    with pytest.raises(ConvergenceError) as err:
        fit_logistic(add_intercept(x), y, max_iter=1)
    assert err.value.iterations == 1


def test_logistic_recovers_coefficients():
    rng = np.random.default_rng(30)
    X = add_intercept(rng.normal(0, 1, size=(20_000, 2)))
    beta_true = np.array([0.3, 1.2, -0.7])
    p = 1 / (1 + np.exp(-(X @ beta_true)))
    y = (rng.random(20_000) < p).astype(float)
    beta = fit_logistic(X, y)
    assert np.max(np.abs(beta - beta_true)) < 0.12


def test_max_diversity_predicate():
    got = max_diversity_treated([3, 5, 2], [3, 4, 2])
    assert got.tolist() == [True, False, True]
