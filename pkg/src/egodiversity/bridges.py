"""Social bridges: implicit links between followers with similar followees.

Two surviving followers are "bridged" when the Jaccard similarity of their
followee sets (taken from the whole graph, ego included by default) strictly
exceeds a threshold.  Bridges can only merge clip components, never split
them; the bridged diversity value is the number of component groups left
after merging.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection

import numpy as np

from . import kernels
from .graph import FollowGraph, Neighborhood, Partition, _labels_to_partition
from .kclip import ClipConfig, ClipTrace, k_clip_decompose


class EgoSkipped(Exception):
    """Signals that an ego was excluded from bridging (too many followers)."""

    def __init__(self, ego: int, n_followers: int, max_followers: int):
        super().__init__(
            f"ego {ego} has {n_followers} followers, above the bridging cap "
            f"of {max_followers}"
        )
        self.ego = ego
        self.n_followers = n_followers
        self.max_followers = max_followers


@dataclass(frozen=True)
class BridgeConfig:
    threshold: float = 0.2
    max_followers: int = 10_000
    include_ego_in_followees: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.max_followers < 0:
            raise ValueError("max_followers must be non-negative")


@dataclass(frozen=True)
class ComponentGraph:
    """Clip components plus the bridge edges found between them.

    ``bridge_edges`` holds index pairs into ``components.blocks``.
    """

    components: Partition
    bridge_edges: frozenset[tuple[int, int]]

    def merged_count(self) -> int:
        """Number of unlinked component groups after bridging."""
        n = len(self.components)
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.bridge_edges:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return sum(1 for i in range(n) if find(i) == i)


def jaccard_similarity(f_i: Collection[int], f_j: Collection[int]) -> float:
    """|intersection| / |union| of two followee sets; 0.0 when both empty."""
    a = set(f_i)
    b = set(f_j)
    union = len(a | b)
    if union == 0:
        return 0.0
    return len(a & b) / union


def _survivor_followees(
    g: FollowGraph, survivors_dense: np.ndarray, ego_dense: int, include_ego: bool
) -> tuple[np.ndarray, np.ndarray]:
    """Concatenated sorted followee arrays (dense ids) per survivor."""
    indptr = g._out_indptr
    indices = g._out_indices
    chunks = []
    lens = np.empty(len(survivors_dense), dtype=np.int64)
    for i, m in enumerate(survivors_dense.tolist()):
        row = indices[indptr[m]:indptr[m + 1]]
        if not include_ego:
            row = row[row != ego_dense]
        chunks.append(row)
        lens[i] = len(row)
    fol_indptr = np.zeros(len(survivors_dense) + 1, dtype=np.int64)
    np.cumsum(lens, out=fol_indptr[1:])
    fol_values = (
        np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    )
    return fol_indptr, np.asarray(fol_values, dtype=np.int64)


def bridged_components(
    trace: ClipTrace, g: FollowGraph, cfg: BridgeConfig = BridgeConfig()
) -> ComponentGraph:
    """Weak components of the decomposed neighborhood plus bridge edges.

    Bridges are evaluated only among followers that survived the
    decomposition; followee sets come from the full graph.  Raises
    :class:`EgoSkipped` when the ego's original follower count exceeds
    ``max_followers``.
    """
    n_followers = trace.original_member_count
    if n_followers > cfg.max_followers:
        raise EgoSkipped(trace.remaining.ego, n_followers, cfg.max_followers)

    rem = trace.remaining
    alive = np.ones(rem.n_members, dtype=np.uint8)
    labels = kernels.weak_labels(rem.n_members, rem.edge_src, rem.edge_dst, alive)
    components = _labels_to_partition(rem, labels)

    # map each survivor to the index of its block in the canonical partition
    roots = sorted(set(labels.tolist()))
    root_to_block = {r: i for i, r in enumerate(roots)}
    comp = np.array([root_to_block[r] for r in labels.tolist()], dtype=np.int32)

    ego_dense = g.dense_index(rem.ego)
    survivors_dense = np.array(
        [g.dense_index(int(m)) for m in rem.members], dtype=np.int64
    )
    fol_indptr, fol_values = _survivor_followees(
        g, survivors_dense, ego_dense, cfg.include_ego_in_followees
    )
    pa, pb = kernels.jaccard_bridges(fol_indptr, fol_values, comp, cfg.threshold)
    edges = frozenset(
        (min(int(comp[a]), int(comp[b])), max(int(comp[a]), int(comp[b])))
        for a, b in zip(pa.tolist(), pb.tolist())
    )
    return ComponentGraph(components=components, bridge_edges=edges)


def bridged_k_clip_diversity(
    n: Neighborhood,
    g: FollowGraph,
    clip: ClipConfig = ClipConfig(),
    cfg: BridgeConfig = BridgeConfig(),
) -> int:
    """Number of unlinked component groups after bridging the decomposed
    neighborhood; degenerate neighborhoods score their member count."""
    if n.n_members < 2:
        if n.n_members > cfg.max_followers:  # max_followers == 0 edge case
            raise EgoSkipped(n.ego, n.n_members, cfg.max_followers)
        return n.n_members
    trace = k_clip_decompose(n, clip)
    return bridged_components(trace, g, cfg).merged_count()
