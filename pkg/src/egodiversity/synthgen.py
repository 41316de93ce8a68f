"""Deterministic synthetic data: planted ego neighborhoods and populations.

Every group of followers is wired with a random spanning arborescence
(parent -> child) before probabilistic extra edges, so the planted weak
component count is exact rather than merely likely.  All randomness flows
through the SplitMix64 stream in :mod:`egodiversity.rng`; identical specs
produce bit-identical outputs, and per-ego substreams are derived from the
master seed so generation order never matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import FollowGraph
from .reputation import PopularityRecord
from .rng import SplitMix64, derive_seed

_STRUCT_SALT = 0x5712
_COUNT_SALT = 0xC0C0


@dataclass(frozen=True)
class EgoGenSpec:
    """One ego with planted component structure and optional hub nodes.

    ``component_sizes`` plants that many weakly connected follower groups;
    hubs are extra followers that broadcast ``hub_out_fanout`` edges
    round-robin across the groups, gluing them together weakly.
    """

    component_sizes: Sequence[int]
    intra_edge_prob: float = 0.0
    hub_count: int = 0
    hub_out_fanout: int = 0
    reciprocal_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if any(s < 1 for s in self.component_sizes):
            raise ValueError("component sizes must be >= 1")
        if not self.component_sizes and self.hub_count == 0:
            raise ValueError("need at least one follower")
        for name in ("intra_edge_prob", "reciprocal_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.hub_count < 0 or self.hub_out_fanout < 0:
            raise ValueError("hub counts must be non-negative")


@dataclass(frozen=True)
class PopulationGenSpec:
    """Population of egos with a planted diversity -> popularity effect.

    Per measure, log10(count+1) = base_log + diversity_effect * z + noise,
    where z = minmax(log10(d+1)) and d is the planted weak component count:
    the same log-plus-minmax transform the regression pipeline applies to
    count predictors, so the coefficient is recoverable end to end.
    ``base_log`` lifts counts into the thousands so that integer rounding
    noise stays far below ``noise_sigma``.
    """

    n_egos: int
    diversity_effect: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    base_log: float = 3.0
    min_followers: int = 2
    max_followers: int = 20

    def __post_init__(self):
        if self.n_egos < 1:
            raise ValueError("n_egos must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if not 1 <= self.min_followers <= self.max_followers:
            raise ValueError("follower bounds must satisfy 1 <= min <= max")


def _wire_group(
    rng: SplitMix64,
    nodes: Sequence[int],
    intra_edge_prob: float,
    reciprocal_prob: float,
    edges: list[tuple[int, int]],
) -> None:
    """Arborescence (guaranteed weak connectivity) plus extra random edges."""
    for t in range(1, len(nodes)):
        parent = nodes[rng.randint(t)]
        edges.append((parent, nodes[t]))
        if reciprocal_prob > 0.0 and rng.random() < reciprocal_prob:
            edges.append((nodes[t], parent))
    if intra_edge_prob > 0.0:
        for u in nodes:
            for v in nodes:
                if u != v and rng.random() < intra_edge_prob:
                    edges.append((u, v))
                    if reciprocal_prob > 0.0 and rng.random() < reciprocal_prob:
                        edges.append((v, u))


def gen_ego(spec: EgoGenSpec) -> tuple[FollowGraph, int]:
    """Generate one ego network; returns (graph, ego id).

    The ego is node 0; followers are numbered group by group, hubs last.
    """
    rng = SplitMix64(derive_seed(spec.seed, _STRUCT_SALT))
    ego = 0
    nid = 1
    groups: list[list[int]] = []
    for size in spec.component_sizes:
        groups.append(list(range(nid, nid + size)))
        nid += size
    hubs = list(range(nid, nid + spec.hub_count))

    edges: list[tuple[int, int]] = []
    for nodes in groups:
        for m in nodes:
            edges.append((m, ego))
    for h in hubs:
        edges.append((h, ego))

    for nodes in groups:
        _wire_group(rng, nodes, spec.intra_edge_prob, spec.reciprocal_prob, edges)

    if groups:
        for h in hubs:
            for j in range(spec.hub_out_fanout):
                grp = groups[j % len(groups)]
                edges.append((h, grp[rng.randint(len(grp))]))

    return FollowGraph.from_edge_list(edges), ego


def _population_structure(spec: PopulationGenSpec) -> list[tuple[int, int]]:
    """Per-ego (follower count, planted component count) pairs."""
    out = []
    span = spec.max_followers - spec.min_followers + 1
    for i in range(spec.n_egos):
        r = SplitMix64(derive_seed(spec.seed, _STRUCT_SALT, i))
        f = spec.min_followers + r.randint(span)
        d = 1 + r.randint(f)
        out.append((f, d))
    return out


def planted_diversity(spec: PopulationGenSpec) -> np.ndarray:
    """The exact weak component count each ego is wired with."""
    return np.array([d for _, d in _population_structure(spec)], dtype=np.int64)


def planted_design(spec: PopulationGenSpec) -> np.ndarray:
    """The design column the effect is planted on: minmax(log10(d+1))."""
    d = planted_diversity(spec).astype(np.float64)
    log_d = np.log10(d + 1.0)
    lo, hi = float(log_d.min()), float(log_d.max())
    if hi == lo:
        return np.zeros(len(log_d))
    return (log_d - lo) / (hi - lo)


def gen_population(
    spec: PopulationGenSpec,
) -> tuple[FollowGraph, list[PopularityRecord]]:
    """Generate a whole population: disjoint ego neighborhoods plus
    popularity records carrying the planted effect."""
    structure = _population_structure(spec)
    d_values = np.array([d for _, d in structure], dtype=np.float64)
    log_d = np.log10(d_values + 1.0)
    lo, hi = float(log_d.min()), float(log_d.max())
    z = np.zeros(len(log_d)) if hi == lo else (log_d - lo) / (hi - lo)

    edges: list[tuple[int, int]] = []
    next_node = spec.n_egos
    for i, (f, d) in enumerate(structure):
        r = SplitMix64(derive_seed(spec.seed, _STRUCT_SALT, i, 1))
        followers = list(range(next_node, next_node + f))
        next_node += f
        for m in followers:
            edges.append((m, i))
        groups: list[list[int]] = [[] for _ in range(d)]
        for t, m in enumerate(followers):
            groups[t % d].append(m)
        for nodes in groups:
            _wire_group(r, nodes, 0.0, 0.0, edges)

    records: list[PopularityRecord] = []
    for i in range(spec.n_egos):
        r = SplitMix64(derive_seed(spec.seed, _COUNT_SALT, i))
        counts = []
        for _ in range(3):
            v = spec.base_log + spec.diversity_effect * float(z[i]) + spec.noise_sigma * r.gauss()
            counts.append(max(0, round(10.0 ** v - 1.0)))
        records.append(
            PopularityRecord(user=i, upvotes=counts[0], thanks=counts[1], favorites=counts[2])
        )
    return FollowGraph.from_edge_list(edges), records
