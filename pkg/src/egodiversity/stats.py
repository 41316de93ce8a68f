"""Regression and experiment machinery.

Everything here is deterministic given a seed.  Student-t and F tail
probabilities are computed from the regularized incomplete beta function
(continued-fraction evaluation), so the package carries no statistical
library dependency; the test suite checks those special functions against
an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np


class SingularDesignError(ValueError):
    """Design matrix is rank deficient (e.g. collinear predictors)."""


class ConvergenceError(RuntimeError):
    """Iterative fit failed to converge; carries the iteration count."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


# ---- special functions -----------------------------------------------------

_BETA_EPS = 3e-16
_BETA_FPMIN = 1e-300
_BETA_MAXIT = 300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETA_FPMIN:
        d = _BETA_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETA_FPMIN:
            d = _BETA_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETA_FPMIN:
            c = _BETA_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_EPS:
            break
    return h


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with ``df`` degrees of freedom."""
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    p_two = betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return p_two / 2.0 if t >= 0 else 1.0 - p_two / 2.0


def student_t_two_tailed(t: float, df: float) -> float:
    """Two-tailed p-value for a t statistic."""
    if math.isinf(t):
        return 0.0
    return betainc_reg(df / 2.0, 0.5, df / (df + t * t))


def student_t_ppf(q: float, df: float) -> float:
    """Quantile of Student's t (bisection on the monotone CDF)."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly inside (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -student_t_ppf(1.0 - q, df)
    target_sf = 1.0 - q
    hi = 1.0
    while student_t_sf(hi, df) > target_sf:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_sf(mid, df) > target_sf:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def f_sf(f: float, df1: float, df2: float) -> float:
    """P(F > f) for the F distribution."""
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    return betainc_reg(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f))


# ---- normalization and regression ------------------------------------------


def minmax_normalize(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """(x - min) / (max - min); a constant vector maps to all zeros."""
    x = np.asarray(v, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot normalize an empty vector")
    lo = float(x.min())
    hi = float(x.max())
    if hi == lo:
        return np.zeros_like(x)
    return (x - lo) / (hi - lo)


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    std_errors: np.ndarray
    ci95: tuple[tuple[float, float], ...]
    p_values: np.ndarray
    r_squared: float
    adj_r_squared: float
    n_obs: int


def ols(y: np.ndarray, X: np.ndarray) -> RegressionResult:
    """Ordinary least squares with t-based inference.

    ``X`` must already contain the intercept column (first).  Standard
    errors come from sigma^2 (X'X)^-1; confidence intervals and two-tailed
    p-values use the t distribution with n - p degrees of freedom.
    """
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    n, p = X.shape
    if len(y) != n:
        raise ValueError("y and X disagree on the number of observations")
    if n <= p:
        raise ValueError(f"need more observations ({n}) than parameters ({p})")
    if np.linalg.matrix_rank(X) < p:
        raise SingularDesignError("design matrix is rank deficient")

    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rss = float(resid @ resid)
    dof = n - p
    sigma2 = rss / dof
    cov = sigma2 * np.linalg.inv(X.T @ X)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    tcrit = student_t_ppf(0.975, dof)
    ci: list[tuple[float, float]] = []
    pvals = np.empty(p)
    for i in range(p):
        if se[i] == 0.0:
            pvals[i] = 0.0 if coef[i] != 0.0 else 1.0
            ci.append((float(coef[i]), float(coef[i])))
        else:
            t = coef[i] / se[i]
            pvals[i] = student_t_two_tailed(abs(t), dof)
            ci.append((float(coef[i] - tcrit * se[i]), float(coef[i] + tcrit * se[i])))

    tss = float(((y - y.mean()) ** 2).sum())
    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-300 else 0.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    return RegressionResult(
        coefficients=coef,
        std_errors=se,
        ci95=tuple(ci),
        p_values=pvals,
        r_squared=r2,
        adj_r_squared=adj,
        n_obs=n,
    )


def add_intercept(X: np.ndarray) -> np.ndarray:
    """Prepend a column of ones."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(len(X)), X])


# ---- resampling and classical tests ----------------------------------------


def bootstrap_ci(
    values: Sequence[float] | np.ndarray,
    resamples: int = 10_000,
    level: float = 0.95,
    seed: Optional[int] = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean; deterministic per seed."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot bootstrap an empty vector")
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    n = len(x)
    means = np.empty(resamples)
    chunk = max(1, min(resamples, 10_000_000 // max(n, 1)))
    done = 0
    while done < resamples:
        take = min(chunk, resamples - done)
        idx = rng.integers(0, n, size=(take, n))
        means[done:done + take] = x[idx].mean(axis=1)
        done += take
    alpha = (1.0 - level) / 2.0
    lo, hi = np.percentile(means, [100.0 * alpha, 100.0 * (1.0 - alpha)])
    return float(lo), float(hi)


class AnovaResult(NamedTuple):
    f: float
    p: float
    df1: int
    df2: int


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classic between/within mean-square ratio across >= 2 groups."""
    gs = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(gs) < 2:
        raise ValueError("need at least two groups")
    if any(len(g) < 1 for g in gs):
        raise ValueError("every group needs at least one observation")
    n_total = sum(len(g) for g in gs)
    k = len(gs)
    df1 = k - 1
    df2 = n_total - k
    if df2 < 1:
        raise ValueError("not enough observations for a within-group estimate")
    grand = sum(float(g.sum()) for g in gs) / n_total
    ssb = sum(len(g) * (float(g.mean()) - grand) ** 2 for g in gs)
    ssw = sum(float(((g - g.mean()) ** 2).sum()) for g in gs)
    if ssb == 0.0:
        return AnovaResult(0.0, 1.0, df1, df2)
    if ssw == 0.0:
        return AnovaResult(math.inf, 0.0, df1, df2)
    f = (ssb / df1) / (ssw / df2)
    return AnovaResult(f, f_sf(f, df1, df2), df1, df2)


class PairedTResult(NamedTuple):
    t: float
    p: float
    df: int
    zero_variance: bool


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> PairedTResult:
    """One-sample t test on the paired differences a - b (two-tailed)."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    if len(x) < 2:
        raise ValueError("need at least two pairs")
    d = x - y
    n = len(d)
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return PairedTResult(0.0, 1.0, n - 1, True)
        return PairedTResult(math.copysign(math.inf, mean), 0.0, n - 1, True)
    t = mean / (sd / math.sqrt(n))
    return PairedTResult(t, student_t_two_tailed(abs(t), n - 1), n - 1, False)


# ---- propensity score matching ----------------------------------------------


def fit_logistic(
    X: np.ndarray,
    y: np.ndarray,
    max_iter: int = 100,
    tol: float = 1e-8,
) -> np.ndarray:
    """Logistic regression by iteratively reweighted least squares.

    ``X`` includes the intercept column.  Raises :class:`ConvergenceError`
    with the iteration count when IRLS does not settle (e.g. separable
    data).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    beta = np.zeros(p)
    for it in range(1, max_iter + 1):
        eta = np.clip(X @ beta, -30.0, 30.0)
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = np.maximum(mu * (1.0 - mu), 1e-10)
        z = eta + (y - mu) / w
        A = X.T @ (X * w[:, None])
        rhs = X.T @ (w * z)
        try:
            new = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"IRLS normal equations singular: {exc}", it) from exc
        if not np.all(np.isfinite(new)):
            raise ConvergenceError("IRLS produced non-finite coefficients", it)
        if np.max(np.abs(new - beta)) < tol:
            return new
        beta = new
    raise ConvergenceError("logistic regression did not converge", max_iter)


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[int, int], ...]
    smd_per_covariate: dict[str, float]
    n_matched: int
    propensity_scores: np.ndarray


def max_diversity_treated(indegree_values, kclip_values) -> np.ndarray:
    """Treatment predicate: the clip diversity value equals indegree."""
    a = np.asarray(indegree_values)
    b = np.asarray(kclip_values)
    return a == b


def _smd(t_col: np.ndarray, c_col: np.ndarray) -> float:
    num = abs(float(t_col.mean()) - float(c_col.mean()))
    if num == 0.0:
        return 0.0
    vt = float(t_col.var(ddof=1)) if len(t_col) > 1 else 0.0
    vc = float(c_col.var(ddof=1)) if len(c_col) > 1 else 0.0
    denom = math.sqrt((vt + vc) / 2.0)
    if denom == 0.0:
        return math.inf
    return num / denom


def propensity_match(
    features: np.ndarray,
    treated: Sequence[bool] | np.ndarray,
    seed: Optional[int] = None,
    *,
    ids: Optional[Sequence[int]] = None,
    names: Optional[Sequence[str]] = None,
    caliper: Optional[float] = None,
) -> MatchResult:
    """Greedy 1:1 nearest-neighbor matching on logistic propensity scores.

    Treated units are processed in descending score order; each takes the
    unused control with the closest score (distance ties go to the
    lower-score side), without replacement.  Balance is
    reported as the standardized mean difference per covariate over the
    matched sample.  The matcher itself is fully deterministic; ``seed`` is
    accepted for interface stability and echoed nowhere.
    """
    X0 = np.asarray(features, dtype=np.float64)
    if X0.ndim == 1:
        X0 = X0[:, None]
    t = np.asarray(treated, dtype=bool)
    if len(t) != len(X0):
        raise ValueError("features and treated flags disagree on length")
    if not np.all(np.isfinite(X0)):
        raise ValueError("features must be finite")
    n_treated = int(t.sum())
    n_control = int((~t).sum())
    if n_treated == 0 or n_control == 0:
        raise ValueError("both treated and control groups must be non-empty")

    cov_names = list(names) if names is not None else [f"x{j}" for j in range(X0.shape[1])]
    if len(cov_names) != X0.shape[1]:
        raise ValueError("names must match the number of covariates")

    score = _propensity_scores(X0, t)

    treated_rows = np.flatnonzero(t)
    control_rows = np.flatnonzero(~t)
    # treated by descending score, stable on row index
    t_order = treated_rows[np.lexsort((treated_rows, -score[treated_rows]))]
    # controls sorted ascending by (score, row index)
    c_order = control_rows[np.lexsort((control_rows, score[control_rows]))]
    c_scores = score[c_order].tolist()

    nc = len(c_order)
    # lazy skip pointers over the sorted controls: nxt[i] = first alive
    # position >= i (nc = none), prv[i+1] = last alive position <= i
    nxt = list(range(nc + 1))
    prv = list(range(-1, nc))

    def find_next(i: int) -> int:
        while nxt[i] != i:
            nxt[i] = nxt[nxt[i]]
            i = nxt[i]
        return i

    def find_prev(i: int) -> int:
        while i >= 0 and prv[i + 1] != i:
            i = prv[i + 1]
        return i

    pairs: list[tuple[int, int]] = []
    matched_controls: list[int] = []
    matched_treated: list[int] = []
    remaining = nc
    for trow in t_order:
        if remaining == 0:
            break
        s = float(score[trow])
        j = int(np.searchsorted(c_scores, s))
        right = find_next(j) if j < nc else nc
        left = find_prev(min(j, nc) - 1)
        if left < 0 and right >= nc:
            break
        if left < 0:
            pick = right
        elif right >= nc:
            pick = left
        else:
            dl = abs(s - c_scores[left])
            dr = abs(c_scores[right] - s)
            pick = left if dl <= dr else right
        if caliper is not None and abs(c_scores[pick] - s) > caliper:
            continue
        crow = int(c_order[pick])
        pairs.append((int(trow), crow))
        matched_treated.append(int(trow))
        matched_controls.append(crow)
        nxt[pick] = pick + 1
        prv[pick + 1] = pick - 1
        remaining -= 1

    ti = np.asarray(matched_treated, dtype=np.int64)
    ci = np.asarray(matched_controls, dtype=np.int64)
    smd = {
        name: _smd(X0[ti, j], X0[ci, j]) if len(ti) else math.inf
        for j, name in enumerate(cov_names)
    }
    if ids is not None:
        ids_arr = np.asarray(ids)
        out_pairs = tuple((int(ids_arr[a]), int(ids_arr[b])) for a, b in pairs)
    else:
        out_pairs = tuple(pairs)
    return MatchResult(
        pairs=out_pairs,
        smd_per_covariate=smd,
        n_matched=len(pairs),
        propensity_scores=score,
    )


def _propensity_scores(X0: np.ndarray, t: np.ndarray) -> np.ndarray:
    X = add_intercept(X0)
    beta = fit_logistic(X, t.astype(np.float64))
    eta = np.clip(X @ beta, -30.0, 30.0)
    return 1.0 / (1.0 + np.exp(-eta))
