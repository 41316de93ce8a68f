"""Pure-Python kernels for the per-ego hot loops.

Reference semantics for the compiled backend in ``_ckernels.pyx``; the two
are drop-in interchangeable and must return identical arrays.  Canonical
orderings:

- ``induced_edges`` emits pairs sorted by (src, dst) local index;
- component labels equal the smallest member index of each component,
  with -1 for nodes outside the alive mask;
- clip removals are listed in removal order, ascending index within a step.
"""

from __future__ import annotations

import numpy as np

MODE_SINGLE = 0
MODE_MULTIPLE = 1
MODE_ADAPTIVE = 2


def induced_edges(out_indptr, out_indices, members):
    """Edges of the subgraph induced on ``members`` (sorted dense indices),
    returned as local-index pairs."""
    pos = {int(m): i for i, m in enumerate(members)}
    src: list[int] = []
    dst: list[int] = []
    indptr = out_indptr
    for i, m in enumerate(members.tolist()):
        for nb in out_indices[indptr[m]:indptr[m + 1]].tolist():
            j = pos.get(nb)
            if j is not None:
                src.append(i)
                dst.append(j)
    return (np.asarray(src, dtype=np.int32), np.asarray(dst, dtype=np.int32))


def weak_labels(n, src, dst, alive):
    """Union-find labels of the undirected components among alive nodes.

    Label of a component is its minimum member index; dead nodes get -1.
    """
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    al = alive.tolist()
    for a, b in zip(src.tolist(), dst.tolist()):
        if al[a] and al[b]:
            ra, rb = find(a), find(b)
            if ra != rb:
                # union by smaller root keeps labels canonical
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    labels = np.empty(n, dtype=np.int32)
    for i in range(n):
        labels[i] = find(i) if al[i] else -1
    return labels


def scc_labels(n, indptr, indices):
    """Tarjan SCC labels (iterative), canonicalized to min member index."""
    UNSET = -1
    index = [UNSET] * n
    low = [0] * n
    on_stack = [False] * n
    comp_root = [UNSET] * n
    stack: list[int] = []
    counter = 0

    for root in range(n):
        if index[root] != UNSET:
            continue
        work: list[list[int]] = [[root, 0]]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            start = indptr[v] + pi
            end = indptr[v + 1]
            ei = start
            while ei < end:
                w = int(indices[ei])
                if index[w] == UNSET:
                    work[-1][1] = ei - indptr[v] + 1
                    work.append([w, 0])
                    advanced = True
                    break
                if on_stack[w]:
                    if index[w] < low[v]:
                        low[v] = index[w]
                ei += 1
            if advanced:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp_root[w] = v
                    if w == v:
                        break
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]

    # canonicalize: label = min index in component (first occurrence wins
    # because we scan ascending)
    min_of: dict[int, int] = {}
    for i in range(n):
        min_of.setdefault(comp_root[i], i)
    labels = np.empty(n, dtype=np.int32)
    for i in range(n):
        labels[i] = min_of[comp_root[i]]
    return labels


def _alive_in_nontrivial_wcc(n, src, dst, alive):
    """Count alive nodes inside undirected components of size >= 2."""
    labels = weak_labels(n, src, dst, alive)
    sizes: dict[int, int] = {}
    for lab in labels.tolist():
        if lab >= 0:
            sizes[lab] = sizes.get(lab, 0) + 1
    return sum(s for s in sizes.values() if s >= 2)


def kclip_run(n, out_indptr, out_indices, in_indptr, in_indices, k, mode, adaptive_threshold):
    """Iterative removal of nodes with outdegree >= k.

    Returns (order, outdeg_at_removal, step_no, step_mode, alive) where
    ``order`` lists removed nodes in removal order, ``step_no`` is the
    1-based step each removal belongs to, and ``step_mode`` records whether
    that step removed a single node (0) or a whole outdegree bucket (1).
    Selection inside a step: maximum outdegree, ties by largest total
    (out+in) degree on the surviving subgraph, then smallest index.
    """
    outdeg = [int(out_indptr[i + 1] - out_indptr[i]) for i in range(n)]
    indeg = [int(in_indptr[i + 1] - in_indptr[i]) for i in range(n)]
    alive = np.ones(n, dtype=np.uint8)
    maxdeg = max(outdeg, default=0)
    buckets: list[set[int]] = [set() for _ in range(maxdeg + 1)]
    for v in range(n):
        buckets[outdeg[v]].add(v)
    maxd = maxdeg

    # edge arrays for the adaptive trigger's component pass
    src_l: list[int] = []
    dst_l: list[int] = []
    if mode == MODE_ADAPTIVE:
        for v in range(n):
            for w in out_indices[out_indptr[v]:out_indptr[v + 1]].tolist():
                src_l.append(v)
                dst_l.append(w)
    src_arr = np.asarray(src_l, dtype=np.int32)
    dst_arr = np.asarray(dst_l, dtype=np.int32)

    order: list[int] = []
    odeg: list[int] = []
    step_no: list[int] = []
    step_mode: list[int] = []
    step = 0

    def remove_batch(batch):
        for v in batch:
            alive[v] = 0
            buckets[outdeg[v]].discard(v)
        for v in batch:
            for w in out_indices[out_indptr[v]:out_indptr[v + 1]].tolist():
                if alive[w]:
                    indeg[w] -= 1
            for u in in_indices[in_indptr[v]:in_indptr[v + 1]].tolist():
                if alive[u]:
                    buckets[outdeg[u]].discard(u)
                    outdeg[u] -= 1
                    buckets[outdeg[u]].add(u)

    while True:
        while maxd >= 0 and not buckets[maxd]:
            maxd -= 1
        if maxd < k or maxd < 0:
            break
        if mode == MODE_SINGLE:
            multiple = False
        elif mode == MODE_MULTIPLE:
            multiple = True
        else:
            busy = _alive_in_nontrivial_wcc(n, src_arr, dst_arr, alive)
            multiple = busy > adaptive_threshold
        step += 1
        if multiple:
            batch = sorted(buckets[maxd])
        else:
            best = -1
            best_deg = -1
            for v in buckets[maxd]:
                d = outdeg[v] + indeg[v]
                if d > best_deg or (d == best_deg and v < best):
                    best = v
                    best_deg = d
            batch = [best]
        for v in batch:
            order.append(v)
            odeg.append(outdeg[v])
            step_no.append(step)
            step_mode.append(1 if multiple else 0)
        remove_batch(batch)

    return (
        np.asarray(order, dtype=np.int32),
        np.asarray(odeg, dtype=np.int32),
        np.asarray(step_no, dtype=np.int32),
        np.asarray(step_mode, dtype=np.int8),
        alive,
    )


def jaccard_merge_count(fol_indptr, fol_values, comp, threshold):
    """Component groups left after merging along all qualifying bridges.

    ``comp`` must use dense labels 0..B-1 (with -1 for removed members).
    Same bridge predicate as :func:`jaccard_bridges`, but pairs whose
    components are already transitively merged are skipped without scoring
    (the final count cannot depend on them), and the loop exits as soon as
    a single group remains.  This is the hot path behind the bridged
    diversity value.
    """
    s = len(comp)
    comp_l = comp.tolist()
    n_blocks = max((c for c in comp_l if c >= 0), default=-1) + 1
    if n_blocks <= 0:
        return 0
    parent = list(range(n_blocks))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups = n_blocks
    vals = fol_values
    ptr = fol_indptr
    for i in range(s):
        if groups == 1:
            break
        ci = comp_l[i]
        if ci < 0:
            continue
        a0, a1 = int(ptr[i]), int(ptr[i + 1])
        la = a1 - a0
        for j in range(i + 1, s):
            cj = comp_l[j]
            if cj < 0:
                continue
            ra, rb = find(ci), find(cj)
            if ra == rb:
                continue
            b0, b1 = int(ptr[j]), int(ptr[j + 1])
            lb = b1 - b0
            inter = 0
            x, y = a0, b0
            while x < a1 and y < b1:
                va = vals[x]
                vb = vals[y]
                if va == vb:
                    inter += 1
                    x += 1
                    y += 1
                elif va < vb:
                    x += 1
                else:
                    y += 1
            union = la + lb - inter
            if union > 0 and inter / union > threshold:
                parent[max(ra, rb)] = min(ra, rb)
                groups -= 1
                if groups == 1:
                    break
    return groups


def jaccard_bridges(fol_indptr, fol_values, comp, threshold):
    """Member pairs in different components whose followee-set Jaccard
    similarity strictly exceeds ``threshold``.

    ``fol_values`` concatenates each member's sorted followee array;
    ``comp[i] < 0`` marks members outside the surviving set.  Every pair is
    scored with an early-exit sorted merge (the shared-followee prefilter is
    the first matching element of the merge).
    """
    s = len(comp)
    pa: list[int] = []
    pb: list[int] = []
    comp_l = comp.tolist()
    vals = fol_values
    ptr = fol_indptr
    for i in range(s):
        ci = comp_l[i]
        if ci < 0:
            continue
        a0, a1 = int(ptr[i]), int(ptr[i + 1])
        la = a1 - a0
        for j in range(i + 1, s):
            cj = comp_l[j]
            if cj < 0 or cj == ci:
                continue
            b0, b1 = int(ptr[j]), int(ptr[j + 1])
            lb = b1 - b0
            inter = 0
            x, y = a0, b0
            while x < a1 and y < b1:
                va = vals[x]
                vb = vals[y]
                if va == vb:
                    inter += 1
                    x += 1
                    y += 1
                elif va < vb:
                    x += 1
                else:
                    y += 1
            union = la + lb - inter
            if union > 0 and inter / union > threshold:
                pa.append(i)
                pb.append(j)
    return (np.asarray(pa, dtype=np.int32), np.asarray(pb, dtype=np.int32))
