"""Command-line front-end.

Subcommands: metrics | reputation | regress | match | generate.
Exit codes: 0 success, 2 input error, 3 infeasible experiment.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import click
import numpy as np

from . import datafiles
from .bridges import BridgeConfig
from .diversity import compute_report
from .graph import FollowGraph, SelfLoopError, UnknownNodeError
from .kclip import ClipConfig
from .reputation import build_matrix, ensemble_popularity, social_reputation_index
from .stats import (
    ConvergenceError,
    SingularDesignError,
    add_intercept,
    bootstrap_ci,
    max_diversity_treated,
    minmax_normalize,
    ols,
    paired_t_test,
    propensity_match,
)
from .synthgen import EgoGenSpec, PopulationGenSpec, gen_ego, gen_population

EXIT_INPUT_ERROR = 2
EXIT_INFEASIBLE = 3

CHUNK_SIZE = 4096  # fixed regardless of --jobs so outputs are identical

# metric columns that hold raw counts and therefore get log10(x+1) before
# normalization in regress/match; *_log and index columns are used as-is
_COUNT_COLUMN_PREFIXES = ("kclip_",)
_COUNT_COLUMNS = ("indegree", "weak", "strong", "bridged_kclip")


def _input_error(msg: str) -> "SystemExit":
    click.echo(f"error: {msg}", err=True)
    return SystemExit(EXIT_INPUT_ERROR)


def _infeasible(msg: str) -> "SystemExit":
    click.echo(f"error: {msg}", err=True)
    return SystemExit(EXIT_INFEASIBLE)


@click.group()
def main() -> None:
    """Structural diversity measures and the reputation pipeline."""


# ---- metrics ----------------------------------------------------------------

_worker_state: dict = {}


def _init_worker(graph, clip, bridge, ks):
    _worker_state["graph"] = graph
    _worker_state["clip"] = clip
    _worker_state["bridge"] = bridge
    _worker_state["ks"] = ks


def _metric_row(g: FollowGraph, ego: int, clip: ClipConfig, bridge: BridgeConfig, ks):
    try:
        rep = compute_report(g, ego, clip=clip, bridge=bridge, ks=ks)
    except UnknownNodeError:
        return (ego, None, None, None) + (None,) * len(ks or [clip.k]) + (None, "unknown-ego")
    k_values = sorted(rep.kclip)
    skipped = "" if rep.bridged_kclip is not None else "bridged:max-followers"
    return (
        (rep.ego, rep.indegree, rep.weak, rep.strong)
        + tuple(rep.kclip[k] for k in k_values)
        + (rep.bridged_kclip, skipped)
    )


def _metric_chunk(egos: Sequence[int]):
    g = _worker_state["graph"]
    clip = _worker_state["clip"]
    bridge = _worker_state["bridge"]
    ks = _worker_state["ks"]
    return [_metric_row(g, e, clip, bridge, ks) for e in egos]


def _parse_sweep(text: Optional[str]) -> list[int]:
    if not text:
        return []
    try:
        vals = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _input_error(f"--k-sweep must be a comma list of integers, got {text!r}")
    if any(v < 1 for v in vals):
        raise _input_error("--k-sweep values must be positive")
    return vals


@main.command()
@click.option("--edges", "edges_path", required=True, type=click.Path(), help="Edge-list file.")
@click.option("--egos", "egos_path", type=click.Path(), default=None,
              help="Ego ids, one per line (default: every node).")
@click.option("--k", default=5, show_default=True, help="Primary clip parameter.")
@click.option("--k-sweep", default=None, help="Extra comma-separated k values to report.")
@click.option("--mode", type=click.Choice(["single", "multiple", "adaptive"]),
              default="single", show_default=True)
@click.option("--multi-removal-threshold", default=1000, show_default=True,
              help="Adaptive mode keeps bulk removals above this many busy nodes.")
@click.option("--jaccard-threshold", default=0.2, show_default=True)
@click.option("--max-followers", default=10000, show_default=True,
              help="Bridging skips egos with more followers than this.")
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="csv",
              show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Worker processes.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output file (default: stdout).")
def metrics(edges_path, egos_path, k, k_sweep, mode, multi_removal_threshold,
            jaccard_threshold, max_followers, fmt, jobs, out_path):
    """Per-ego diversity measures over an edge list."""
    try:
        g = datafiles.read_edge_list(edges_path)
    except (datafiles.EdgeListFormatError, SelfLoopError, OSError, ValueError) as exc:
        raise _input_error(str(exc))

    if egos_path is not None:
        try:
            egos = sorted(set(datafiles.read_ego_list(egos_path)))
        except (datafiles.EdgeListFormatError, OSError) as exc:
            raise _input_error(str(exc))
    else:
        egos = [int(u) for u in g.node_ids]

    try:
        clip = ClipConfig(k=k, mode=mode, adaptive_threshold=multi_removal_threshold)
        bridge = BridgeConfig(threshold=jaccard_threshold, max_followers=max_followers)
    except ValueError as exc:
        raise _input_error(str(exc))
    ks = sorted(set([k] + _parse_sweep(k_sweep)))

    chunks = [egos[i:i + CHUNK_SIZE] for i in range(0, len(egos), CHUNK_SIZE)]
    if jobs > 1 and len(chunks) > 1:
        import multiprocessing as mp

        ctx = mp.get_context("fork")
        with ctx.Pool(jobs, initializer=_init_worker, initargs=(g, clip, bridge, ks)) as pool:
            chunk_rows = pool.map(_metric_chunk, chunks)
    else:
        _init_worker(g, clip, bridge, ks)
        chunk_rows = [_metric_chunk(c) for c in chunks]

    header = ["ego", "indegree", "weak", "strong"] + [f"kclip_{kv}" for kv in ks] \
        + ["bridged_kclip", "skipped"]
    rows = [row for chunk in chunk_rows for row in chunk]
    _emit_table(out_path, fmt, header, rows, datafiles.METRICS_SCHEMA)


def _emit_table(out_path, fmt, header, rows, schema):
    if fmt == "csv":
        if out_path:
            datafiles.write_csv(out_path, header, rows, schema=schema)
        else:
            datafiles.write_csv(sys.stdout, header, rows, schema=schema)
        return
    sink = open(out_path, "w", encoding="utf-8", newline="\n") if out_path else sys.stdout
    try:
        for row in rows:
            obj = {h: (None if v == "" else v) for h, v in zip(header, row)}
            sink.write(json.dumps(obj, separators=(",", ":")) + "\n")
    finally:
        if out_path:
            sink.close()


# ---- reputation ---------------------------------------------------------------


@main.command()
@click.option("--popularity", "popularity_path", required=True, type=click.Path())
@click.option("--out", "out_path", type=click.Path(), default=None)
def reputation(popularity_path, out_path):
    """Reputation index and ensemble measure from a popularity CSV."""
    try:
        records = datafiles.read_popularity(popularity_path)
    except (datafiles.SchemaError, OSError) as exc:
        raise _input_error(str(exc))
    if not records:
        raise _input_error(f"{popularity_path}: no data rows")
    records = sorted(records, key=lambda r: r.user)
    V = build_matrix(records)
    index = social_reputation_index(records)
    ensemble = ensemble_popularity(records)
    header = ["user", "upvotes_log", "thanks_log", "favorites_log",
              "reputation_index", "ensemble_measure"]
    rows = [
        (r.user, float(V[i, 0]), float(V[i, 1]), float(V[i, 2]),
         float(index[i]), float(ensemble[i]))
        for i, r in enumerate(records)
    ]
    _emit_table(out_path, "csv", header, rows, datafiles.REPUTATION_SCHEMA)


# ---- shared table assembly -----------------------------------------------------


@dataclass
class JoinedTable:
    ids: list[int]
    columns: dict[str, np.ndarray]


def _load_joined(metrics_path: str, reputation_path: str, covariates_path: Optional[str]) -> JoinedTable:
    m_header, m_rows = datafiles.read_table(metrics_path, datafiles.METRICS_SCHEMA)
    if "ego" not in m_header:
        raise datafiles.SchemaError(f"{metrics_path}: missing 'ego' column")
    m_rows = [r for r in m_rows if r[m_header.index("skipped")] != "unknown-ego"] \
        if "skipped" in m_header else m_rows

    r_header, r_rows = datafiles.read_table(reputation_path, datafiles.REPUTATION_SCHEMA)
    if "user" not in r_header:
        raise datafiles.SchemaError(f"{reputation_path}: missing 'user' column")

    m_ids = [int(v) for v in datafiles.table_column(m_header, m_rows, "ego")]
    r_ids = [int(v) for v in datafiles.table_column(r_header, r_rows, "user")]
    r_index = {u: i for i, u in enumerate(r_ids)}

    unmatched = [u for u in m_ids if u not in r_index]
    if unmatched:
        shown = ", ".join(str(u) for u in unmatched[:20])
        more = "" if len(unmatched) <= 20 else f" (+{len(unmatched) - 20} more)"
        raise datafiles.SchemaError(f"join mismatch: ids without reputation rows: {shown}{more}")

    ids = m_ids
    columns: dict[str, np.ndarray] = {}
    for name in m_header:
        if name in ("ego", "skipped"):
            continue
        col = datafiles.table_column(m_header, m_rows, name)
        columns[name] = np.array([float(v) if v != "" else math.nan for v in col])
    order = [r_index[u] for u in ids]
    for name in r_header:
        if name == "user":
            continue
        col = datafiles.table_column(r_header, r_rows, name)
        columns[name] = np.array([float(col[i]) for i in order])

    if covariates_path:
        c_header, c_rows = datafiles.read_table(covariates_path)
        if "user" not in c_header:
            raise datafiles.SchemaError(f"{covariates_path}: missing 'user' column")
        c_ids = [int(v) for v in datafiles.table_column(c_header, c_rows, "user")]
        c_index = {u: i for i, u in enumerate(c_ids)}
        missing = [u for u in ids if u not in c_index]
        if missing:
            shown = ", ".join(str(u) for u in missing[:20])
            raise datafiles.SchemaError(f"join mismatch: ids without covariate rows: {shown}")
        order_c = [c_index[u] for u in ids]
        for name in c_header:
            if name == "user":
                continue
            col = datafiles.table_column(c_header, c_rows, name)
            columns[name] = np.array([float(col[i]) for i in order_c])

    return JoinedTable(ids=ids, columns=columns)


def _is_count_column(name: str) -> bool:
    if name in _COUNT_COLUMNS:
        return True
    if any(name.startswith(p) for p in _COUNT_COLUMN_PREFIXES):
        return True
    # covariates default to count semantics unless explicitly log-scaled
    return not (name.endswith("_log") or name in ("reputation_index", "ensemble_measure"))


def _design_column(table: JoinedTable, name: str) -> np.ndarray:
    if name not in table.columns:
        raise datafiles.SchemaError(
            f"unknown variable {name!r} (have: {', '.join(sorted(table.columns))})"
        )
    col = table.columns[name]
    if np.isnan(col).any():
        raise datafiles.SchemaError(
            f"variable {name!r} has missing values (skipped egos?); cannot regress"
        )
    if _is_count_column(name):
        return np.log10(col + 1.0)
    return col


# ---- regress -----------------------------------------------------------------


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path())
@click.option("--reputation", "reputation_path", required=True, type=click.Path())
@click.option("--covariates", "covariates_path", type=click.Path(), default=None)
@click.option("--predictors", required=True, help="Comma-separated predictor names.")
@click.option("--target", default="reputation_index", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def regress(metrics_path, reputation_path, covariates_path, predictors, target, out_path):
    """Normalized OLS of a target on chosen predictors.

    Count predictors are log10(x+1)-transformed, then every variable is
    min-max normalized to [0, 1]; the JSON output carries the pre-normalization
    ranges so coefficients can be mapped back to raw units.
    """
    names = [p.strip() for p in predictors.split(",") if p.strip()]
    if not names:
        raise _input_error("--predictors must name at least one column")
    try:
        table = _load_joined(metrics_path, reputation_path, covariates_path)
        raw = {name: _design_column(table, name) for name in names}
        y_raw = _design_column(table, target)
    except (datafiles.SchemaError, OSError, ValueError) as exc:
        raise _input_error(str(exc))

    normalization = {}
    cols = []
    for name in names:
        v = raw[name]
        normalization[name] = (float(v.min()), float(v.max()))
        cols.append(minmax_normalize(v))
    normalization[target] = (float(y_raw.min()), float(y_raw.max()))
    y = minmax_normalize(y_raw)
    X = add_intercept(np.column_stack(cols))

    try:
        res = ols(y, X)
    except SingularDesignError as exc:
        raise _input_error(str(exc))
    except ValueError as exc:
        raise _input_error(str(exc))

    payload = {
        "schema": "egodiversity.regress/1",
        "target": target,
        "predictors": names,
        "n_obs": res.n_obs,
        "coefficients": dict(zip(["intercept"] + names, map(float, res.coefficients))),
        "std_errors": dict(zip(["intercept"] + names, map(float, res.std_errors))),
        "ci95": {k: [float(lo), float(hi)] for k, (lo, hi) in
                 zip(["intercept"] + names, res.ci95)},
        "p_values": dict(zip(["intercept"] + names, map(float, res.p_values))),
        "r_squared": res.r_squared,
        "adj_r_squared": res.adj_r_squared,
        "normalization": {k: [lo, hi] for k, (lo, hi) in normalization.items()},
    }
    _emit_json(payload, out_path)


def _emit_json(payload: dict, out_path: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False, allow_nan=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text + "\n")
    else:
        click.echo(text)


# ---- match --------------------------------------------------------------------


@main.command()
@click.option("--metrics", "metrics_path", required=True, type=click.Path())
@click.option("--reputation", "reputation_path", required=True, type=click.Path())
@click.option("--covariates", "covariates_path", type=click.Path(), default=None)
@click.option("--covariate-names", "covariate_names", required=True,
              help="Comma-separated covariates for the propensity model.")
@click.option("--k", default=5, show_default=True,
              help="Clip column (kclip_<k>) defining treatment.")
@click.option("--resamples", default=10000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def match(metrics_path, reputation_path, covariates_path, covariate_names, k,
          resamples, seed, out_path):
    """Matched experiment: treated = egos whose clip diversity equals
    indegree; greedy 1:1 propensity matching, SMD balance, group means."""
    names = [p.strip() for p in covariate_names.split(",") if p.strip()]
    if not names:
        raise _input_error("--covariate-names must name at least one column")
    try:
        table = _load_joined(metrics_path, reputation_path, covariates_path)
        kcol = f"kclip_{k}"
        for required in ("indegree", kcol, "reputation_index"):
            if required not in table.columns:
                raise datafiles.SchemaError(f"missing column {required!r} in inputs")
        features = np.column_stack([_design_column(table, n) for n in names])
    except (datafiles.SchemaError, OSError, ValueError) as exc:
        raise _input_error(str(exc))

    treated = max_diversity_treated(table.columns["indegree"], table.columns[kcol])
    n_treated = int(treated.sum())
    n_control = int((~treated).sum())
    if n_treated == 0 or n_control == 0:
        raise _infeasible(
            f"experiment needs both groups non-empty (treated={n_treated}, "
            f"control={n_control})"
        )

    try:
        result = propensity_match(features, treated, seed, ids=table.ids, names=names)
    except ConvergenceError as exc:
        raise _input_error(str(exc))

    reputation_by_id = dict(zip(table.ids, table.columns["reputation_index"]))
    treated_rep = np.array([reputation_by_id[a] for a, _ in result.pairs])
    control_rep = np.array([reputation_by_id[b] for _, b in result.pairs])
    if len(result.pairs) == 0:
        raise _infeasible("no matched pairs produced")

    t_ci = bootstrap_ci(treated_rep, resamples=resamples, seed=seed)
    c_ci = bootstrap_ci(control_rep, resamples=resamples, seed=seed + 1)
    t_res = paired_t_test(treated_rep, control_rep)

    payload = {
        "schema": "egodiversity.match/1",
        "treatment": f"{kcol} == indegree",
        "covariates": names,
        "n_treated_total": n_treated,
        "n_control_total": n_control,
        "n_matched": result.n_matched,
        "smd_per_covariate": {k_: float(v) for k_, v in result.smd_per_covariate.items()},
        "group_means": {
            "treated": {"mean": float(treated_rep.mean()),
                        "ci95": [t_ci[0], t_ci[1]]},
            "control": {"mean": float(control_rep.mean()),
                        "ci95": [c_ci[0], c_ci[1]]},
        },
        "paired_t": {
            "t": t_res.t, "p": t_res.p, "df": t_res.df,
            "zero_variance": t_res.zero_variance,
        },
        "seed": seed,
        "resamples": resamples,
        "pairs": [[a, b] for a, b in result.pairs],
    }
    _emit_json(payload, out_path)


# ---- generate -------------------------------------------------------------------


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path())
@click.option("--out-dir", "out_dir", required=True, type=click.Path())
def generate(spec_path, out_dir):
    """Write synthetic data files from a JSON generation spec."""
    try:
        with open(spec_path, "r", encoding="utf-8") as f:
            spec_obj = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise _input_error(f"{spec_path}: {exc}")
    if not isinstance(spec_obj, dict) or "kind" not in spec_obj:
        raise _input_error(f"{spec_path}: spec must be an object with a 'kind' field")

    os.makedirs(out_dir, exist_ok=True)
    kind = spec_obj.get("kind")
    params = {k_: v for k_, v in spec_obj.items() if k_ != "kind"}
    manifest: dict = {"schema": "egodiversity.manifest/1", "kind": kind}

    if kind == "ego":
        try:
            spec = EgoGenSpec(**params)
        except (TypeError, ValueError) as exc:
            raise _input_error(f"invalid ego spec: {exc}")
        g, ego = gen_ego(spec)
        edges_path = os.path.join(out_dir, "edges.tsv")
        datafiles.write_edge_list(g.edges(), edges_path)
        datafiles.write_ego_list([ego], os.path.join(out_dir, "egos.txt"))
        manifest.update({
            "seed": spec.seed,
            "ego": ego,
            "n_nodes": g.n_nodes,
            "n_edges": g.n_edges,
            "files": {"edges": "edges.tsv", "egos": "egos.txt"},
            "config": params,
        })
    elif kind == "population":
        try:
            spec = PopulationGenSpec(**params)
        except (TypeError, ValueError) as exc:
            raise _input_error(f"invalid population spec: {exc}")
        g, records = gen_population(spec)
        edges_path = os.path.join(out_dir, "edges.tsv")
        datafiles.write_edge_list(g.edges(), edges_path)
        datafiles.write_popularity(records, os.path.join(out_dir, "popularity.csv"))
        datafiles.write_ego_list(range(spec.n_egos), os.path.join(out_dir, "egos.txt"))
        manifest.update({
            "seed": spec.seed,
            "n_egos": spec.n_egos,
            "n_nodes": g.n_nodes,
            "n_edges": g.n_edges,
            "files": {"edges": "edges.tsv", "popularity": "popularity.csv",
                      "egos": "egos.txt"},
            "config": params,
        })
    else:
        raise _input_error(f"unknown spec kind {kind!r} (expected 'ego' or 'population')")

    text = json.dumps(manifest, indent=2, sort_keys=True)
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as f:
        f.write(text + "\n")
    click.echo(text)


if __name__ == "__main__":
    main()
