"""Outdegree clipping of an ego neighborhood.

Repeatedly removes nodes whose outdegree is at least ``k`` from the induced
follower subgraph until every surviving node has outdegree below ``k``; the
number of weakly connected components that remain is the clip diversity
value.  Three removal schedules are supported:

- ``single``: one node per step, chosen by maximum current outdegree with
  ties broken by largest total (out+in) degree, then smallest node id;
- ``multiple``: every node at the current maximum outdegree per step;
- ``adaptive``: per-step choice -- a step uses the multiple schedule while
  more than ``adaptive_threshold`` surviving nodes sit inside weak
  components of size >= 2, and the single schedule otherwise.

Outdegrees are recomputed on the surviving subgraph after each step, with a
bucketed max-outdegree index so the loop stays near-linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import kernels
from .graph import Neighborhood, local_csr, reverse_local_csr

Mode = Literal["single", "multiple", "adaptive"]

_MODE_CODE = {
    "single": kernels.MODE_SINGLE,
    "multiple": kernels.MODE_MULTIPLE,
    "adaptive": kernels.MODE_ADAPTIVE,
}


@dataclass(frozen=True)
class ClipConfig:
    """Parameters of the clip decomposition.

    ``k=5`` is the default operating point; ``adaptive_threshold`` controls
    when the adaptive schedule keeps using bulk removals.
    """

    k: int = 5
    mode: Mode = "single"
    adaptive_threshold: int = 1000

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.mode not in _MODE_CODE:
            raise ValueError(f"mode must be one of {sorted(_MODE_CODE)}")
        if self.adaptive_threshold < 1:
            raise ValueError("adaptive_threshold must be >= 1")


@dataclass(frozen=True)
class ClipStep:
    """One removal step: which nodes went, at what outdegree, under which
    schedule ("single" or "multiple")."""

    index: int
    removed: tuple[int, ...]
    outdegrees: tuple[int, ...]
    mode: str


@dataclass(frozen=True)
class ClipTrace:
    """Full audit record of a decomposition."""

    steps: tuple[ClipStep, ...]
    remaining: Neighborhood
    d_k: int
    k: int
    mode: Mode
    removed_total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "removed_total", sum(len(s.removed) for s in self.steps)
        )

    @property
    def original_member_count(self) -> int:
        return self.remaining.n_members + self.removed_total


def _run(n: Neighborhood, cfg: ClipConfig):
    m = n.n_members
    out_indptr, out_indices = local_csr(m, n.edge_src, n.edge_dst)
    in_indptr, in_indices = reverse_local_csr(m, n.edge_src, n.edge_dst)
    return kernels.kclip_run(
        m,
        out_indptr,
        out_indices,
        in_indptr,
        in_indices,
        cfg.k,
        _MODE_CODE[cfg.mode],
        cfg.adaptive_threshold,
    )


def weak_count(n_nodes: int, src: np.ndarray, dst: np.ndarray, alive: np.ndarray) -> int:
    """Number of weak components among alive nodes."""
    labels = kernels.weak_labels(n_nodes, src, dst, alive)
    if n_nodes == 0:
        return 0
    return int(np.count_nonzero(labels == np.arange(n_nodes, dtype=labels.dtype)))


def k_clip_decompose(n: Neighborhood, cfg: ClipConfig = ClipConfig()) -> ClipTrace:
    """Run the decomposition and return the full trace."""
    order, odeg, step_no, step_mode, alive = _run(n, cfg)

    steps: list[ClipStep] = []
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and step_no[j] == step_no[i]:
            j += 1
        steps.append(
            ClipStep(
                index=int(step_no[i]),
                removed=tuple(int(n.members[v]) for v in order[i:j]),
                outdegrees=tuple(int(d) for d in odeg[i:j]),
                mode="multiple" if step_mode[i] else "single",
            )
        )
        i = j

    survivors = np.flatnonzero(alive)
    keep = alive[n.edge_src].astype(bool) & alive[n.edge_dst].astype(bool)
    new_index = np.cumsum(alive, dtype=np.int64) - 1
    remaining = Neighborhood(
        ego=n.ego,
        members=n.members[survivors],
        edge_src=new_index[n.edge_src[keep]].astype(np.int32),
        edge_dst=new_index[n.edge_dst[keep]].astype(np.int32),
    )
    d_k = weak_count(
        remaining.n_members,
        remaining.edge_src,
        remaining.edge_dst,
        np.ones(remaining.n_members, dtype=np.uint8),
    )
    return ClipTrace(steps=tuple(steps), remaining=remaining, d_k=d_k, k=cfg.k, mode=cfg.mode)


def k_clip_diversity(n: Neighborhood, cfg: ClipConfig = ClipConfig()) -> int:
    """Clip diversity value of a neighborhood.

    Degenerate neighborhoods (fewer than 2 members) score their member
    count, which keeps weak <= clip <= indegree meaningful.
    """
    if n.n_members < 2:
        return n.n_members
    return k_clip_decompose(n, cfg).d_k
