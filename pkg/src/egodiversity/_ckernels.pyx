# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the per-ego hot loops.

Must match `_kernels_py` exactly: same canonical orderings, same
tie-breaks, same returned dtypes.  The equivalence is enforced by
tests/test_kernels.py on randomized inputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

MODE_SINGLE = 0
MODE_MULTIPLE = 1
MODE_ADAPTIVE = 2


cdef inline Py_ssize_t _bsearch(const cnp.int64_t[::1] arr, cnp.int64_t key) nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = arr.shape[0]
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if arr[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < arr.shape[0] and arr[lo] == key:
        return lo
    return -1


def induced_edges(out_indptr, out_indices, members):
    cdef const cnp.int64_t[::1] indptr = np.ascontiguousarray(out_indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] indices = np.ascontiguousarray(out_indices, dtype=np.int64)
    cdef const cnp.int64_t[::1] mem = np.ascontiguousarray(members, dtype=np.int64)
    cdef Py_ssize_t n = mem.shape[0]
    cdef Py_ssize_t cap = 0
    cdef Py_ssize_t i, e, j
    cdef cnp.int64_t m
    for i in range(n):
        m = mem[i]
        cap += indptr[m + 1] - indptr[m]
    src_arr = np.empty(cap, dtype=np.int32)
    dst_arr = np.empty(cap, dtype=np.int32)
    cdef cnp.int32_t[::1] src = src_arr
    cdef cnp.int32_t[::1] dst = dst_arr
    cdef Py_ssize_t count = 0
    with nogil:
        for i in range(n):
            m = mem[i]
            for e in range(indptr[m], indptr[m + 1]):
                j = _bsearch(mem, indices[e])
                if j >= 0:
                    src[count] = <cnp.int32_t> i
                    dst[count] = <cnp.int32_t> j
                    count += 1
    return src_arr[:count], dst_arr[:count]


cdef inline cnp.int32_t _find(cnp.int32_t[::1] parent, cnp.int32_t x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def weak_labels(n, src, dst, alive):
    cdef Py_ssize_t nn = n
    cdef const cnp.int32_t[::1] s = np.ascontiguousarray(src, dtype=np.int32)
    cdef const cnp.int32_t[::1] d = np.ascontiguousarray(dst, dtype=np.int32)
    cdef const cnp.uint8_t[::1] al = np.ascontiguousarray(alive, dtype=np.uint8)
    parent_arr = np.arange(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    labels_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] labels = labels_arr
    cdef Py_ssize_t e, i
    cdef cnp.int32_t a, b, ra, rb
    with nogil:
        for e in range(s.shape[0]):
            a = s[e]
            b = d[e]
            if al[a] and al[b]:
                ra = _find(parent, a)
                rb = _find(parent, b)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
        for i in range(nn):
            if al[i]:
                labels[i] = _find(parent, <cnp.int32_t> i)
            else:
                labels[i] = -1
    return labels_arr


def scc_labels(n, indptr, indices):
    cdef Py_ssize_t nn = n
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)

    index_arr = np.full(nn, -1, dtype=np.int64)
    low_arr = np.zeros(nn, dtype=np.int64)
    root_arr = np.full(nn, -1, dtype=np.int32)
    onstk_arr = np.zeros(nn, dtype=np.uint8)
    stack_arr = np.empty(nn, dtype=np.int32)
    work_v_arr = np.empty(nn, dtype=np.int32)
    work_e_arr = np.empty(nn, dtype=np.int64)

    cdef cnp.int64_t[::1] index = index_arr
    cdef cnp.int64_t[::1] low = low_arr
    cdef cnp.int32_t[::1] comp_root = root_arr
    cdef cnp.uint8_t[::1] on_stack = onstk_arr
    cdef cnp.int32_t[::1] stack = stack_arr
    cdef cnp.int32_t[::1] work_v = work_v_arr
    cdef cnp.int64_t[::1] work_e = work_e_arr

    cdef Py_ssize_t sp, tp
    cdef cnp.int64_t counter = 0
    cdef cnp.int32_t rt, v, w, u
    cdef cnp.int64_t ei

    with nogil:
        tp = 0
        for rt in range(<cnp.int32_t> nn):
            if index[rt] != -1:
                continue
            index[rt] = low[rt] = counter
            counter += 1
            stack[tp] = rt
            tp += 1
            on_stack[rt] = 1
            sp = 0
            work_v[0] = rt
            work_e[0] = ip[rt]
            while sp >= 0:
                v = work_v[sp]
                ei = work_e[sp]
                if ei < ip[v + 1]:
                    work_e[sp] = ei + 1
                    w = ix[ei]
                    if index[w] == -1:
                        index[w] = low[w] = counter
                        counter += 1
                        stack[tp] = w
                        tp += 1
                        on_stack[w] = 1
                        sp += 1
                        work_v[sp] = w
                        work_e[sp] = ip[w]
                    elif on_stack[w]:
                        if index[w] < low[v]:
                            low[v] = index[w]
                else:
                    if low[v] == index[v]:
                        while True:
                            tp -= 1
                            w = stack[tp]
                            on_stack[w] = 0
                            comp_root[w] = v
                            if w == v:
                                break
                    sp -= 1
                    if sp >= 0:
                        u = work_v[sp]
                        if low[v] < low[u]:
                            low[u] = low[v]

    # canonicalize to min member index per component
    min_arr = np.full(nn, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] min_of = min_arr
    labels_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] labels = labels_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(nn):
            if min_of[comp_root[i]] == -1:
                min_of[comp_root[i]] = <cnp.int32_t> i
        for i in range(nn):
            labels[i] = min_of[comp_root[i]]
    return labels_arr


cdef Py_ssize_t _busy_nodes(
    Py_ssize_t n,
    const cnp.int64_t[::1] out_indptr,
    const cnp.int32_t[::1] out_indices,
    const cnp.uint8_t[::1] alive,
    cnp.int32_t[::1] parent,
    cnp.int32_t[::1] size,
) nogil:
    """Alive nodes inside undirected components of size >= 2."""
    cdef Py_ssize_t v
    cdef cnp.int64_t e
    cdef cnp.int32_t w, ra, rb
    for v in range(n):
        parent[v] = <cnp.int32_t> v
        size[v] = 0
    for v in range(n):
        if not alive[v]:
            continue
        for e in range(out_indptr[v], out_indptr[v + 1]):
            w = out_indices[e]
            if alive[w]:
                ra = _find(parent, <cnp.int32_t> v)
                rb = _find(parent, w)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
    for v in range(n):
        if alive[v]:
            size[_find(parent, <cnp.int32_t> v)] += 1
    cdef Py_ssize_t busy = 0
    for v in range(n):
        if alive[v] and size[_find(parent, <cnp.int32_t> v)] >= 2:
            busy += 1
    return busy


def kclip_run(n, out_indptr, out_indices, in_indptr, in_indices, k, mode, adaptive_threshold):
    cdef Py_ssize_t nn = n
    cdef const cnp.int64_t[::1] oip = np.ascontiguousarray(out_indptr, dtype=np.int64)
    cdef const cnp.int32_t[::1] oix = np.ascontiguousarray(out_indices, dtype=np.int32)
    cdef const cnp.int64_t[::1] iip = np.ascontiguousarray(in_indptr, dtype=np.int64)
    cdef const cnp.int32_t[::1] iix = np.ascontiguousarray(in_indices, dtype=np.int32)
    cdef int kk = k
    cdef int md = mode
    cdef long threshold = adaptive_threshold

    alive_arr = np.ones(nn, dtype=np.uint8)
    cdef cnp.uint8_t[::1] alive = alive_arr

    outdeg_arr = np.empty(nn, dtype=np.int32)
    indeg_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] outdeg = outdeg_arr
    cdef cnp.int32_t[::1] indeg = indeg_arr

    cdef Py_ssize_t v
    cdef cnp.int32_t maxdeg = 0
    for v in range(nn):
        outdeg[v] = <cnp.int32_t> (oip[v + 1] - oip[v])
        indeg[v] = <cnp.int32_t> (iip[v + 1] - iip[v])
        if outdeg[v] > maxdeg:
            maxdeg = outdeg[v]

    # intrusive doubly linked lists, one per outdegree value
    head_arr = np.full(maxdeg + 1, -1, dtype=np.int32)
    nxt_arr = np.empty(nn, dtype=np.int32)
    prv_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] head = head_arr
    cdef cnp.int32_t[::1] nxt = nxt_arr
    cdef cnp.int32_t[::1] prv = prv_arr

    cdef cnp.int32_t node
    for v in range(nn - 1, -1, -1):
        # push fronts in reverse so list order is ascending (cosmetic only)
        node = <cnp.int32_t> v
        nxt[node] = head[outdeg[node]]
        prv[node] = -1
        if head[outdeg[node]] != -1:
            prv[head[outdeg[node]]] = node
        head[outdeg[node]] = node

    order_arr = np.empty(nn, dtype=np.int32)
    odeg_arr = np.empty(nn, dtype=np.int32)
    stepno_arr = np.empty(nn, dtype=np.int32)
    stepmode_arr = np.empty(nn, dtype=np.int8)
    cdef cnp.int32_t[::1] order = order_arr
    cdef cnp.int32_t[::1] odeg = odeg_arr
    cdef cnp.int32_t[::1] stepno = stepno_arr
    cdef cnp.int8_t[::1] stepmode = stepmode_arr

    batch_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] batch = batch_arr

    # scratch for the adaptive trigger
    parent_arr = np.empty(nn, dtype=np.int32)
    size_arr = np.empty(nn, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    cdef cnp.int32_t[::1] size = size_arr

    cdef Py_ssize_t n_removed = 0
    cdef cnp.int32_t maxd = maxdeg
    cdef cnp.int32_t step = 0
    cdef bint multiple
    cdef Py_ssize_t bcount, bi, bj
    cdef cnp.int32_t best, best_deg, dd, cur, w, u, tmp
    cdef cnp.int64_t e
    cdef Py_ssize_t busy

    with nogil:
        while True:
            while maxd >= 0 and head[maxd] == -1:
                maxd -= 1
            if maxd < kk or maxd < 0:
                break
            if md == 0:
                multiple = False
            elif md == 1:
                multiple = True
            else:
                busy = _busy_nodes(nn, oip, oix, alive, parent, size)
                multiple = busy > threshold
            step += 1
            if multiple:
                bcount = 0
                cur = head[maxd]
                while cur != -1:
                    batch[bcount] = cur
                    bcount += 1
                    cur = nxt[cur]
                # ascending order inside the step (insertion sort; buckets
                # are small in practice)
                for bi in range(1, bcount):
                    tmp = batch[bi]
                    bj = bi
                    while bj > 0 and batch[bj - 1] > tmp:
                        batch[bj] = batch[bj - 1]
                        bj -= 1
                    batch[bj] = tmp
            else:
                best = -1
                best_deg = -1
                cur = head[maxd]
                while cur != -1:
                    dd = outdeg[cur] + indeg[cur]
                    if dd > best_deg or (dd == best_deg and cur < best):
                        best = cur
                        best_deg = dd
                    cur = nxt[cur]
                batch[0] = best
                bcount = 1
            for bi in range(bcount):
                cur = batch[bi]
                order[n_removed] = cur
                odeg[n_removed] = outdeg[cur]
                stepno[n_removed] = step
                stepmode[n_removed] = 1 if multiple else 0
                n_removed += 1
            # unlink the whole batch first so intra-batch edges are ignored
            for bi in range(bcount):
                cur = batch[bi]
                alive[cur] = 0
                if prv[cur] != -1:
                    nxt[prv[cur]] = nxt[cur]
                else:
                    head[outdeg[cur]] = nxt[cur]
                if nxt[cur] != -1:
                    prv[nxt[cur]] = prv[cur]
            for bi in range(bcount):
                cur = batch[bi]
                for e in range(oip[cur], oip[cur + 1]):
                    w = oix[e]
                    if alive[w]:
                        indeg[w] -= 1
                for e in range(iip[cur], iip[cur + 1]):
                    u = iix[e]
                    if alive[u]:
                        # move u one bucket down
                        if prv[u] != -1:
                            nxt[prv[u]] = nxt[u]
                        else:
                            head[outdeg[u]] = nxt[u]
                        if nxt[u] != -1:
                            prv[nxt[u]] = prv[u]
                        outdeg[u] -= 1
                        nxt[u] = head[outdeg[u]]
                        prv[u] = -1
                        if head[outdeg[u]] != -1:
                            prv[head[outdeg[u]]] = u
                        head[outdeg[u]] = u

    return (
        order_arr[:n_removed].copy(),
        odeg_arr[:n_removed].copy(),
        stepno_arr[:n_removed].copy(),
        stepmode_arr[:n_removed].copy(),
        alive_arr,
    )


def jaccard_merge_count(fol_indptr, fol_values, comp, threshold):
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(fol_indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] vals = np.ascontiguousarray(fol_values, dtype=np.int64)
    cdef const cnp.int32_t[::1] cp = np.ascontiguousarray(comp, dtype=np.int32)
    cdef double thr = threshold
    cdef Py_ssize_t s = cp.shape[0]
    cdef cnp.int32_t n_blocks = 0
    cdef Py_ssize_t i, j
    for i in range(s):
        if cp[i] >= n_blocks:
            n_blocks = cp[i] + 1
    if n_blocks <= 0:
        return 0
    parent_arr = np.arange(n_blocks, dtype=np.int32)
    cdef cnp.int32_t[::1] parent = parent_arr
    cdef cnp.int32_t groups = n_blocks
    cdef cnp.int64_t a0, a1, b0, b1, x, y
    cdef long la, lb, inter, union_
    cdef cnp.int32_t ci, cj, ra, rb
    with nogil:
        for i in range(s):
            if groups == 1:
                break
            ci = cp[i]
            if ci < 0:
                continue
            a0 = ptr[i]
            a1 = ptr[i + 1]
            la = <long> (a1 - a0)
            for j in range(i + 1, s):
                cj = cp[j]
                if cj < 0:
                    continue
                ra = _find(parent, ci)
                rb = _find(parent, cj)
                if ra == rb:
                    continue
                b0 = ptr[j]
                b1 = ptr[j + 1]
                lb = <long> (b1 - b0)
                inter = 0
                x = a0
                y = b0
                while x < a1 and y < b1:
                    if vals[x] == vals[y]:
                        inter += 1
                        x += 1
                        y += 1
                    elif vals[x] < vals[y]:
                        x += 1
                    else:
                        y += 1
                union_ = la + lb - inter
                if union_ > 0 and (<double> inter) / (<double> union_) > thr:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
                    groups -= 1
                    if groups == 1:
                        break
    return int(groups)


def jaccard_bridges(fol_indptr, fol_values, comp, threshold):
    cdef const cnp.int64_t[::1] ptr = np.ascontiguousarray(fol_indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] vals = np.ascontiguousarray(fol_values, dtype=np.int64)
    cdef const cnp.int32_t[::1] cp = np.ascontiguousarray(comp, dtype=np.int32)
    cdef double thr = threshold
    cdef Py_ssize_t s = cp.shape[0]
    cdef Py_ssize_t i, j
    cdef cnp.int64_t a0, a1, b0, b1, x, y
    cdef long la, lb, inter, union_
    cdef cnp.int32_t ci, cj
    pa = []
    pb = []
    for i in range(s):
        ci = cp[i]
        if ci < 0:
            continue
        a0 = ptr[i]
        a1 = ptr[i + 1]
        la = <long> (a1 - a0)
        for j in range(i + 1, s):
            cj = cp[j]
            if cj < 0 or cj == ci:
                continue
            b0 = ptr[j]
            b1 = ptr[j + 1]
            lb = <long> (b1 - b0)
            inter = 0
            x = a0
            y = b0
            while x < a1 and y < b1:
                if vals[x] == vals[y]:
                    inter += 1
                    x += 1
                    y += 1
                elif vals[x] < vals[y]:
                    x += 1
                else:
                    y += 1
            union_ = la + lb - inter
            if union_ > 0 and (<double> inter) / (<double> union_) > thr:
                pa.append(i)
                pb.append(j)
    return (np.asarray(pa, dtype=np.int32), np.asarray(pb, dtype=np.int32))
