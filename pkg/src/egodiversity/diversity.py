"""Per-ego structural diversity measures.

The weak (strong) diversity of an ego is the number of weakly (strongly)
connected components among its followers.  Neighborhoods with fewer than
two members score their member count for every measure, since component
counting is vacuous without possible ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bridges import BridgeConfig
from .graph import (
    FollowGraph,
    Neighborhood,
    local_csr,
    reverse_local_csr,
    strong_components,
    weak_components,
)
from .kclip import ClipConfig, _MODE_CODE, weak_count


@dataclass(frozen=True)
class DiversityReport:
    """One ego's measures: indegree, weak, strong, clip values per k, and
    the bridged value (None when the ego was skipped for bridging)."""

    ego: int
    indegree: int
    weak: int
    strong: int
    kclip: dict[int, int]
    bridged_kclip: Optional[int] = None


def indegree(g: FollowGraph, ego: int) -> int:
    """Number of followers of *ego*."""
    return g.in_degree(ego)


def weak_diversity(n: Neighborhood) -> int:
    if n.n_members < 2:
        return n.n_members
    return len(weak_components(n))


def strong_diversity(n: Neighborhood) -> int:
    if n.n_members < 2:
        return n.n_members
    return len(strong_components(n))


def compute_report(
    g: FollowGraph,
    ego: int,
    clip: ClipConfig = ClipConfig(),
    bridge: BridgeConfig = BridgeConfig(),
    ks: Optional[Sequence[int]] = None,
    include_bridged: bool = True,
) -> DiversityReport:
    """Assemble every measure for one ego in a single pass.

    ``ks`` extends the clip sweep; the primary ``clip.k`` is always
    included and is the one the bridged value is computed from.  This is
    the batch driver the CLI uses, so it works on raw index arrays rather
    than going through the object-level operations (results are identical;
    the test suite cross-checks).
    """
    k_values = sorted(set([clip.k] + list(ks or [])))
    di = g.dense_index(ego)
    members_dense = g._in_indices[g._in_indptr[di]:g._in_indptr[di + 1]]
    m = len(members_dense)

    if m < 2:
        return DiversityReport(
            ego=int(ego),
            indegree=m,
            weak=m,
            strong=m,
            kclip={k: m for k in k_values},
            bridged_kclip=m if include_bridged else None,
        )

    src, dst = kernels.induced_edges(g._out_indptr, g._out_indices, members_dense)
    alive_all = np.ones(m, dtype=np.uint8)
    weak = weak_count(m, src, dst, alive_all)

    out_indptr, out_indices = local_csr(m, src, dst)
    labels = kernels.scc_labels(m, out_indptr, out_indices)
    strong = int(np.count_nonzero(labels == np.arange(m, dtype=labels.dtype)))

    in_indptr, in_indices = reverse_local_csr(m, src, dst)
    kclip_vals: dict[int, int] = {}
    primary_alive = None
    for k in k_values:
        _, _, _, _, alive = kernels.kclip_run(
            m,
            out_indptr,
            out_indices,
            in_indptr,
            in_indices,
            k,
            _MODE_CODE[clip.mode],
            clip.adaptive_threshold,
        )
        kclip_vals[k] = weak_count(m, src, dst, alive)
        if k == clip.k:
            primary_alive = alive

    bridged: Optional[int] = None
    if include_bridged:
        if m > bridge.max_followers:
            bridged = None  # skipped ego, reported as such downstream
        else:
            bridged = _bridged_from_alive(
                g, di, members_dense, src, dst, primary_alive, bridge
            )

    return DiversityReport(
        ego=int(ego),
        indegree=m,
        weak=weak,
        strong=strong,
        kclip=kclip_vals,
        bridged_kclip=bridged,
    )


def _bridged_from_alive(
    g: FollowGraph,
    ego_dense: int,
    members_dense: np.ndarray,
    src: np.ndarray,
    dst: np.ndarray,
    alive: np.ndarray,
    bridge: BridgeConfig,
) -> int:
    """Bridged component count over the survivors marked in ``alive``."""
    m = len(members_dense)
    labels = kernels.weak_labels(m, src, dst, alive)
    roots = sorted(r for r in set(labels.tolist()) if r >= 0)
    if not roots:
        return 0
    root_to_block = {r: i for i, r in enumerate(roots)}
    comp = np.array(
        [root_to_block[r] if r >= 0 else -1 for r in labels.tolist()],
        dtype=np.int32,
    )

    indptr = g._out_indptr
    indices = g._out_indices
    chunks = []
    lens = np.zeros(m, dtype=np.int64)
    for i in range(m):
        if comp[i] < 0:
            continue
        node = int(members_dense[i])
        row = indices[indptr[node]:indptr[node + 1]]
        if not bridge.include_ego_in_followees:
            row = row[row != ego_dense]
        chunks.append(row)
        lens[i] = len(row)
    fol_indptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(lens, out=fol_indptr[1:])
    values = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)

    return int(
        kernels.jaccard_merge_count(
            fol_indptr, np.asarray(values, dtype=np.int64), comp, bridge.threshold
        )
    )
