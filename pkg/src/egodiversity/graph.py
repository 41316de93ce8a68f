"""Immutable directed follow graph and ego-neighborhood extraction.

An edge (u, v) means "u follows v".  The graph is stored as two CSR views
over a contiguous dense index space (ids are remapped once at build time):
out-adjacency answers followee queries, in-adjacency answers follower
queries.  Both views are sorted and deduplicated, so component results do
not depend on edge insertion order.  Instances are immutable after
construction and safe to share across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels


class SelfLoopError(ValueError):
    """Raised at ingestion when an edge connects a node to itself."""

    def __init__(self, node: int):
        super().__init__(f"self-loop edge ({node}, {node}) is not allowed")
        self.node = node


class UnknownNodeError(KeyError):
    """Raised when a queried node is not part of the graph."""

    def __init__(self, node: int):
        super().__init__(node)
        self.node = node

    def __str__(self) -> str:
        return f"node {self.node} is not in the graph"


class FollowGraph:
    """Immutable directed graph with follower/followee queries.

    Build with :meth:`from_edge_list`; the constructor is internal.
    """

    __slots__ = ("_ids", "_out_indptr", "_out_indices", "_in_indptr", "_in_indices")

    def __init__(self, ids, out_indptr, out_indices, in_indptr, in_indices):
        for a in (ids, out_indptr, out_indices, in_indptr, in_indices):
            a.setflags(write=False)
        self._ids = ids
        self._out_indptr = out_indptr
        self._out_indices = out_indices
        self._in_indptr = in_indptr
        self._in_indices = in_indices

    # ---- construction ----------------------------------------------------

    @classmethod
    def from_edge_list(cls, edges: Sequence[tuple[int, int]] | np.ndarray) -> "FollowGraph":
        """Build a graph from (follower, followee) pairs.

        Endpoints become the node set, duplicate edges collapse, and a
        self-loop raises :class:`SelfLoopError` naming the offending pair.
        """
        arr = np.asarray(edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edge list must be a sequence of (u, v) pairs")
        if arr.size and arr.min() < 0:
            bad = arr[(arr < 0).any(axis=1)][0]
            raise ValueError(f"negative node id in edge ({bad[0]}, {bad[1]})")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            raise SelfLoopError(int(arr[loops][0, 0]))

        ids = np.unique(arr)
        n = len(ids)
        src = np.searchsorted(ids, arr[:, 0])
        dst = np.searchsorted(ids, arr[:, 1])
        # dedup + sort by (src, dst) via a single composite key
        key = np.unique(src * np.int64(n) + dst)
        src = (key // n).astype(np.int64)
        dst = (key % n).astype(np.int64)

        out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_indptr[1:])
        out_indices = dst

        key_in = np.sort(dst * np.int64(n) + src)
        in_src = (key_in % n).astype(np.int64)
        in_dst = (key_in // n).astype(np.int64)
        in_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(in_dst, minlength=n), out=in_indptr[1:])
        return cls(ids, out_indptr, out_indices, in_indptr, in_src)

    # ---- basic queries ---------------------------------------------------

    @property
    def node_ids(self) -> np.ndarray:
        """Sorted array of node ids (read-only view)."""
        return self._ids

    @property
    def n_nodes(self) -> int:
        return len(self._ids)

    @property
    def n_edges(self) -> int:
        return len(self._out_indices)

    def has_node(self, u: int) -> bool:
        i = np.searchsorted(self._ids, u)
        return i < len(self._ids) and self._ids[i] == u

    def dense_index(self, u: int) -> int:
        """Internal dense index of node *u* (raises UnknownNodeError)."""
        i = int(np.searchsorted(self._ids, u))
        if i >= len(self._ids) or self._ids[i] != u:
            raise UnknownNodeError(u)
        return i

    def followees(self, u: int) -> np.ndarray:
        """Sorted node ids that *u* follows (out-neighbors)."""
        i = self.dense_index(u)
        return self._ids[self._out_indices[self._out_indptr[i]:self._out_indptr[i + 1]]]

    def followers(self, u: int) -> np.ndarray:
        """Sorted node ids that follow *u* (in-neighbors)."""
        i = self.dense_index(u)
        return self._ids[self._in_indices[self._in_indptr[i]:self._in_indptr[i + 1]]]

    def out_degree(self, u: int) -> int:
        i = self.dense_index(u)
        return int(self._out_indptr[i + 1] - self._out_indptr[i])

    def in_degree(self, u: int) -> int:
        i = self.dense_index(u)
        return int(self._in_indptr[i + 1] - self._in_indptr[i])

    def edges(self) -> Iterator[tuple[int, int]]:
        """Iterate (follower, followee) id pairs in sorted order."""
        for i in range(self.n_nodes):
            u = int(self._ids[i])
            for j in self._out_indices[self._out_indptr[i]:self._out_indptr[i + 1]]:
                yield u, int(self._ids[j])

    def has_edge(self, u: int, v: int) -> bool:
        i = self.dense_index(u)
        j = self.dense_index(v)
        row = self._out_indices[self._out_indptr[i]:self._out_indptr[i + 1]]
        p = np.searchsorted(row, j)
        return p < len(row) and row[p] == j

    def __repr__(self) -> str:
        return f"FollowGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class Neighborhood:
    """Induced directed subgraph on one ego's follower set.

    ``members`` holds the follower ids (sorted); edges are stored as local
    indices into ``members``.  Everything incident to the ego itself is
    excluded by construction.
    """

    ego: int
    members: np.ndarray     # int64, sorted node ids
    edge_src: np.ndarray    # int32, local indices
    edge_dst: np.ndarray    # int32, local indices

    @property
    def n_members(self) -> int:
        return len(self.members)

    @property
    def n_edges(self) -> int:
        return len(self.edge_src)

    def member_set(self) -> set[int]:
        return set(int(m) for m in self.members)

    def edge_set(self) -> set[tuple[int, int]]:
        """Edges as (follower id, followee id) pairs."""
        m = self.members
        return {
            (int(m[a]), int(m[b]))
            for a, b in zip(self.edge_src.tolist(), self.edge_dst.tolist())
        }

    @classmethod
    def from_member_edges(
        cls,
        ego: int,
        members: Iterable[int],
        edges: Iterable[tuple[int, int]],
    ) -> "Neighborhood":
        """Build a neighborhood directly from ids (mostly for tests).

        Validates the type invariants: ego not a member, every edge endpoint
        a member, no self-loops.
        """
        mem = np.array(sorted(set(int(m) for m in members)), dtype=np.int64)
        if ego in mem:
            raise ValueError("ego cannot be a member of its own neighborhood")
        pairs = sorted(set((int(a), int(b)) for a, b in edges))
        src = np.empty(len(pairs), dtype=np.int32)
        dst = np.empty(len(pairs), dtype=np.int32)
        for i, (a, b) in enumerate(pairs):
            if a == b:
                raise SelfLoopError(a)
            ia = int(np.searchsorted(mem, a))
            ib = int(np.searchsorted(mem, b))
            if ia >= len(mem) or mem[ia] != a or ib >= len(mem) or mem[ib] != b:
                raise ValueError(f"edge ({a}, {b}) has an endpoint outside the member set")
            src[i] = ia
            dst[i] = ib
        return cls(ego=int(ego), members=mem, edge_src=src, edge_dst=dst)


@dataclass(frozen=True)
class Partition:
    """Disjoint node-id blocks covering a neighborhood's member set.

    Blocks are ordered by their smallest contained id so output is stable
    for golden tests.
    """

    blocks: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, u: int) -> int:
        for i, b in enumerate(self.blocks):
            if u in b:
                return i
        raise KeyError(u)


def ego_neighborhood(g: FollowGraph, ego: int) -> Neighborhood:
    """Extract the connected neighborhood of *ego*: its followers plus the
    follow edges among them."""
    di = g.dense_index(ego)
    members_dense = g._in_indices[g._in_indptr[di]:g._in_indptr[di + 1]]
    src, dst = kernels.induced_edges(g._out_indptr, g._out_indices, members_dense)
    return Neighborhood(
        ego=int(ego),
        members=g._ids[members_dense],
        edge_src=src,
        edge_dst=dst,
    )


def _labels_to_partition(n: Neighborhood, labels: np.ndarray) -> Partition:
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(int(n.members[i]))
    blocks = sorted((frozenset(v) for v in groups.values()), key=min)
    return Partition(blocks=tuple(blocks))


def weak_components(n: Neighborhood) -> Partition:
    """Weakly connected components of the neighborhood (direction ignored)."""
    alive = np.ones(n.n_members, dtype=np.uint8)
    labels = kernels.weak_labels(n.n_members, n.edge_src, n.edge_dst, alive)
    return _labels_to_partition(n, labels)


def strong_components(n: Neighborhood) -> Partition:
    """Strongly connected components (mutual directed reachability)."""
    indptr, indices = local_csr(n.n_members, n.edge_src, n.edge_dst)
    labels = kernels.scc_labels(n.n_members, indptr, indices)
    return _labels_to_partition(n, labels)


def local_csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR over local indices for edges already sorted by (src, dst)."""
    indptr = np.zeros(n + 1, dtype=np.int64)
    if len(src):
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, np.asarray(dst, dtype=np.int32)


def reverse_local_csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR of the reversed edges (in-adjacency over local indices)."""
    if len(src) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int32)
    key = np.argsort(dst * np.int64(n) + src, kind="stable")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=indptr[1:])
    return indptr, np.asarray(src, dtype=np.int32)[key]
