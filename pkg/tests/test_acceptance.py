"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Every tolerance is
pinned here; the random instances use fixed seeds so results never vary
between runs.
"""

import functools
import json
import math
import time

import numpy as np
import pytest
from click.testing import CliRunner

from egodiversity import stats
from egodiversity.bridges import BridgeConfig, bridged_k_clip_diversity
from egodiversity.cli import main as cli_main
from egodiversity.diversity import weak_diversity
from egodiversity.graph import (
    FollowGraph,
    ego_neighborhood,
    strong_components,
    weak_components,
)
from egodiversity.kclip import ClipConfig, k_clip_decompose, k_clip_diversity
from egodiversity.reputation import index_from_matrix, nmf
from egodiversity.synthgen import PopulationGenSpec, gen_population, planted_design

from oracles import random_neighborhood, strong_blocks_oracle, weak_blocks_oracle
from test_bridges import four_follower_instance, nine_follower_instance
from test_kclip import hub_instance


def criterion(num, desc):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[criterion {num}] FAIL - {desc}")
                raise
            print(f"[criterion {num}] PASS - {desc}")
        return wrapper
    return deco


@criterion(1, "component oracles on 500 random digraphs (<= 12 nodes, < 5 s)")
def test_criterion_1_component_oracles():
    start = time.perf_counter()
    for seed in range(500):
        n = random_neighborhood(seed, max_nodes=12)
        assert list(weak_components(n).blocks) == weak_blocks_oracle(n)
        assert list(strong_components(n).blocks) == strong_blocks_oracle(n)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"


def _chain_corpus():
    for seed in range(1000):
        yield random_neighborhood(seed, max_nodes=200, min_nodes=2)


@criterion(2, "clip chain weak <= d_k <= d_(k-1) <= indegree on 1000 neighborhoods (< 30 s)")
def test_criterion_2_chain():
    start = time.perf_counter()
    violations = 0
    for n in _chain_corpus():
        w = weak_diversity(n)
        prev = n.n_members
        for k in range(10, 1, -1):
            d = k_clip_diversity(n, ClipConfig(k=k, mode="single"))
            if not (w <= d <= n.n_members):
                violations += 1
            # ascending k gives non-increasing d; walking k downward the
            # current d must be >= the previous (larger-k) value
            if d < 0:
                violations += 1
        values = [k_clip_diversity(n, ClipConfig(k=k, mode="single")) for k in range(2, 11)]
        for larger_k_value, smaller_k_value in zip(values[1:], values):
            if larger_k_value > smaller_k_value:
                violations += 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 30.0, f"took {elapsed:.2f}s"


@criterion(3, "k = max_outdegree + 1 degenerates to weak diversity (exact)")
def test_criterion_3_degeneracy():
    for seed in range(300):
        n = random_neighborhood(seed, max_nodes=60, min_nodes=2)
        max_out = int(np.bincount(n.edge_src, minlength=n.n_members).max())
        trace = k_clip_decompose(n, ClipConfig(k=max_out + 1))
        assert trace.steps == ()
        assert trace.d_k == weak_diversity(n)


@criterion(4, "worked instances: hub removal order, 4-follower and 9-follower bridging")
def test_criterion_4_worked_instances():
    # 8 followers, 1 weak / 6 strong components; at k=3 the outdegree-6 hub
    # goes first, then the outdegree-3 node; 6 survivors in 4 components
    g, ego = hub_instance()
    n = ego_neighborhood(g, ego)
    assert n.n_members == 8
    assert weak_diversity(n) == 1
    assert len(strong_components(n)) == 6
    trace = k_clip_decompose(n, ClipConfig(k=3))
    assert [s.removed for s in trace.steps] == [(0,), (1,)]
    assert [s.outdegrees for s in trace.steps] == [(6,), (3,)]
    assert trace.remaining.n_members == 6
    assert trace.d_k == 4

    # 4 followers: clip diversity 3, one bridge above threshold merges to 2
    g, ego = four_follower_instance()
    n = ego_neighborhood(g, ego)
    assert n.n_members == 4
    assert k_clip_diversity(n, ClipConfig(k=5)) == 3
    assert bridged_k_clip_diversity(n, g, ClipConfig(k=5), BridgeConfig()) == 2

    # 9 followers: 7 clip components; the 0.48 pair bridges at 0.2, the
    # 0.12 pair does not -> 6
    from egodiversity.bridges import jaccard_similarity

    g, ego, u = nine_follower_instance()
    n = ego_neighborhood(g, ego)
    j12 = jaccard_similarity(set(g.followees(u[0])), set(g.followees(u[1])))
    j34 = jaccard_similarity(set(g.followees(u[2])), set(g.followees(u[3])))
    assert j12 == 0.48
    assert j34 == 0.12
    assert k_clip_diversity(n, ClipConfig(k=5)) == 7
    assert bridged_k_clip_diversity(n, g, ClipConfig(k=5), BridgeConfig(threshold=0.2)) == 6


def _bridging_case(seed):
    rng = np.random.default_rng(seed)
    ego = 0
    nf = int(rng.integers(2, 14))
    followers = list(range(1, nf + 1))
    edges = [(f, ego) for f in followers]
    for u in followers:
        for v in followers:
            if u != v and rng.random() < 0.12:
                edges.append((u, v))
    for u in followers:
        n_ext = int(rng.integers(0, 8))
        edges += [(u, 1000 + int(t)) for t in rng.integers(0, 40, size=n_ext)]
    return FollowGraph.from_edge_list(edges), ego


@criterion(5, "bridging bounds and threshold monotonicity on 500 egos (zero violations)")
def test_criterion_5_bridging_bounds():
    clip = ClipConfig(k=5)
    for seed in range(500):
        g, ego = _bridging_case(seed)
        n = ego_neighborhood(g, ego)
        kc = k_clip_diversity(n, clip)
        prev = None
        for t in np.linspace(0.0, 1.0, 21):
            v = bridged_k_clip_diversity(n, g, clip, BridgeConfig(threshold=float(t)))
            assert 1 <= v <= kc
            if prev is not None:
                assert v >= prev
            prev = v
        collapsed = bridged_k_clip_diversity(n, g, clip, BridgeConfig(threshold=0.0))
        assert collapsed == 1


def _power_iteration_oracle(V):
    """Leading singular pair via plain power iteration on V^T V, written
    independently of the library implementation."""
    G = V.T @ V
    v = np.ones(G.shape[0]) / math.sqrt(G.shape[0])
    for _ in range(10_000):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, np.zeros(V.shape[0])
        w /= nw
        if np.linalg.norm(w - v) < 1e-15:
            v = w
            break
        v = w
    sigma2 = float(v @ (G @ v))
    best_err = math.sqrt(max(float((V * V).sum()) - sigma2, 0.0))
    u = V @ v
    nu = np.linalg.norm(u)
    u = np.abs(u / nu) if nu > 0 else u
    return best_err, u


@criterion(6, "rank-1 factorization within 1e-6 of the oracle on 200 matrices; scale invariance 1e-9")
def test_criterion_6_reputation():
    rng = np.random.default_rng(606)
    for _ in range(200):
        V = rng.random((50, 3)) * rng.uniform(0.5, 3.0)
        res = nmf(V, r=1)
        best_err, u = _power_iteration_oracle(V)
        assert abs(res.reconstruction_error - best_err) <= 1e-6 * best_err
        oracle_index = (
            np.zeros(len(u)) if u.max() == u.min()
            else 100.0 * (u - u.min()) / (u.max() - u.min())
        )
        got = index_from_matrix(V)
        assert np.max(np.abs(got - oracle_index)) < 1e-6
    V = rng.random((50, 3))
    base = index_from_matrix(V)
    for c in (0.1, 2.0, 25.0):
        assert np.max(np.abs(index_from_matrix(c * V) - base)) < 1e-9


@criterion(7, "OLS oracle 1e-10; planted 0.9 recovery >= 95/100 seeds; bootstrap and F = t^2")
def test_criterion_7_statistics():
    rng = np.random.default_rng(707)
    # normal-equation oracle agreement on well-conditioned designs
    for _ in range(20):
        n, p = 400, 4
        X = np.column_stack([np.ones(n), rng.random((n, p - 1))])
        y = rng.random(n)
        res = stats.ols(y, X)
        oracle = np.linalg.solve(X.T @ X, X.T @ y)
        assert np.max(np.abs(res.coefficients - oracle)) < 1e-10

    # planted-effect recovery across 100 fixed seeds
    hits = 0
    for seed in range(100):
        spec = PopulationGenSpec(
            n_egos=5000, diversity_effect=0.9, noise_sigma=0.05, seed=seed
        )
        _, records = gen_population(spec)
        z = planted_design(spec)
        from egodiversity.reputation import ensemble_popularity

        y = ensemble_popularity(records)
        res = stats.ols(y, stats.add_intercept(z))
        if abs(res.coefficients[1] - 0.9) <= 3 * res.std_errors[1]:
            hits += 1
    assert hits >= 95, f"only {hits}/100 within 3 SE"

    # bootstrap interval vs normal theory on n = 10,000
    x = np.random.default_rng(7070).normal(0.0, 1.0, 10_000)
    lo, hi = stats.bootstrap_ci(x, resamples=10_000, seed=11)
    half = (hi - lo) / 2.0
    expect = 1.96 * x.std(ddof=1) / math.sqrt(len(x))
    assert abs(half - expect) <= 0.2 * expect

    # two-group ANOVA equals the squared pooled t statistic
    a = np.random.default_rng(7071).normal(0.0, 1.0, 300)
    b = np.random.default_rng(7072).normal(0.25, 1.0, 250)
    res = stats.one_way_anova([a, b])
    n1, n2 = len(a), len(b)
    sp = math.sqrt(((n1 - 1) * a.var(ddof=1) + (n2 - 1) * b.var(ddof=1)) / (n1 + n2 - 2))
    t = (a.mean() - b.mean()) / (sp * math.sqrt(1 / n1 + 1 / n2))
    assert abs(res.f - t * t) < 1e-9


@criterion(8, "matched experiment: SMD < 0.1 and p < 0.05 at n = 5000 in >= 19/20 seeds")
def test_criterion_8_matching(tmp_path):
    runner = CliRunner()
    good = 0
    for seed in range(20):
        base = tmp_path / f"seed{seed}"
        base.mkdir()
        spec = base / "spec.json"
        spec.write_text(json.dumps({
            "kind": "population", "n_egos": 5000, "diversity_effect": 0.9,
            "noise_sigma": 0.05, "seed": seed,
        }))
        r = runner.invoke(cli_main, ["generate", "--spec", str(spec),
                                     "--out-dir", str(base)], catch_exceptions=False)
        assert r.exit_code == 0
        m = base / "metrics.csv"
        r = runner.invoke(cli_main, ["metrics", "--edges", str(base / "edges.tsv"),
                                     "--egos", str(base / "egos.txt"), "--out", str(m)],
                          catch_exceptions=False)
        assert r.exit_code == 0
        rep = base / "rep.csv"
        r = runner.invoke(cli_main, ["reputation", "--popularity",
                                     str(base / "popularity.csv"), "--out", str(rep)],
                          catch_exceptions=False)
        assert r.exit_code == 0
        out = base / "match.json"
        r = runner.invoke(cli_main, ["match", "--metrics", str(m), "--reputation",
                                     str(rep), "--covariate-names", "indegree",
                                     "--resamples", "2000", "--seed", str(seed),
                                     "--out", str(out)], catch_exceptions=False)
        assert r.exit_code == 0
        payload = json.loads(out.read_text())
        balanced = all(v < 0.1 for v in payload["smd_per_covariate"].values())
        significant = (
            payload["paired_t"]["p"] < 0.05
            and payload["group_means"]["treated"]["mean"]
            > payload["group_means"]["control"]["mean"]
        )
        if balanced and significant:
            good += 1
    assert good >= 19, f"only {good}/20 seeds balanced and significant"


@criterion(9, "100k egos over a >= 1M-edge graph: --jobs 4 under 60 s, byte-identical to --jobs 1")
def test_criterion_9_performance(tmp_path):
    runner = CliRunner()
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "kind": "population", "n_egos": 100_000, "diversity_effect": 0.5,
        "noise_sigma": 0.05, "seed": 909,
    }))
    r = runner.invoke(cli_main, ["generate", "--spec", str(spec),
                                 "--out-dir", str(tmp_path)], catch_exceptions=False)
    assert r.exit_code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["n_edges"] >= 1_000_000, manifest["n_edges"]

    out4 = tmp_path / "m4.csv"
    start = time.perf_counter()
    r = runner.invoke(cli_main, ["metrics", "--edges", str(tmp_path / "edges.tsv"),
                                 "--egos", str(tmp_path / "egos.txt"),
                                 "--jobs", "4", "--out", str(out4)],
                      catch_exceptions=False)
    elapsed = time.perf_counter() - start
    assert r.exit_code == 0
    assert elapsed < 60.0, f"metrics --jobs 4 took {elapsed:.1f}s"

    out1 = tmp_path / "m1.csv"
    r = runner.invoke(cli_main, ["metrics", "--edges", str(tmp_path / "edges.tsv"),
                                 "--egos", str(tmp_path / "egos.txt"),
                                 "--jobs", "1", "--out", str(out1)],
                      catch_exceptions=False)
    assert r.exit_code == 0
    assert out4.read_bytes() == out1.read_bytes()
    print(f"    (metrics over 100k egos / {manifest['n_edges']} edges: {elapsed:.1f}s with --jobs 4)")
