# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contracts as ``_pykernels``."""
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

BACKEND = "cython"


def propagate_labels(init, edge_src, edge_dst, edge_table, table_offsets, table_masks):
    cdef Py_ssize_t n = len(init)
    cdef Py_ssize_t m = len(edge_src)
    cdef Py_ssize_t t
    for mask in init:
        if mask >> 64:
            from ._pykernels import propagate_labels as slow
            return slow(init, edge_src, edge_dst, edge_table, table_offsets, table_masks)
    for mask in table_masks:
        if mask >> 64:
            from ._pykernels import propagate_labels as slow
            return slow(init, edge_src, edge_dst, edge_table, table_offsets, table_masks)

    cdef uint64_t *masks = <uint64_t *> malloc((n + 1) * sizeof(uint64_t))
    cdef int64_t *src = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t *tab = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t *in_ptr = <int64_t *> malloc((n + 2) * sizeof(int64_t))
    cdef int64_t *in_edges = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t *queue = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef char *queued = <char *> malloc((n + 1) * sizeof(char))
    cdef Py_ssize_t ntab = len(table_offsets)
    cdef Py_ssize_t nmask = len(table_masks)
    cdef int64_t *offs = <int64_t *> malloc((ntab + 1) * sizeof(int64_t))
    cdef uint64_t *tmask = <uint64_t *> malloc((nmask + 1) * sizeof(uint64_t))
    cdef Py_ssize_t i, e, head, tail, count, dst, s, base, width, pos
    cdef uint64_t label, bits, contrib
    try:
        for i in range(n):
            masks[i] = init[i]
            in_ptr[i] = 0
        in_ptr[n] = 0
        in_ptr[n + 1] = 0
        for i in range(ntab):
            offs[i] = table_offsets[i]
        for i in range(nmask):
            tmask[i] = table_masks[i]
        for e in range(m):
            src[e] = edge_src[e]
            tab[e] = edge_table[e]
            in_ptr[<int64_t> edge_dst[e] + 1] += 1
        for i in range(n):
            in_ptr[i + 1] += in_ptr[i]
        for e in range(m):
            dst = edge_dst[e]
            in_edges[in_ptr[dst]] = e
            in_ptr[dst] += 1
        for i in range(n, 0, -1):
            in_ptr[i] = in_ptr[i - 1]
        in_ptr[0] = 0

        # circular queue of vertices whose label grew
        for i in range(n):
            queue[i] = i
            queued[i] = 1
        head = 0
        count = n
        while count > 0:
            dst = queue[head]
            head += 1
            if head == n:
                head = 0
            count -= 1
            queued[dst] = 0
            label = masks[dst]
            if label == 0:
                continue
            for i in range(in_ptr[dst], in_ptr[dst + 1]):
                e = in_edges[i]
                base = offs[tab[e]]
                width = offs[tab[e] + 1] - base
                contrib = 0
                bits = label
                pos = 0
                while bits != 0 and pos < width:
                    if bits & 1:
                        contrib |= tmask[base + pos]
                    bits >>= 1
                    pos += 1
                s = src[e]
                if contrib & ~masks[s]:
                    masks[s] |= contrib
                    if not queued[s]:
                        queued[s] = 1
                        tail = head + count
                        if tail >= n:
                            tail -= n
                        queue[tail] = s
                        count += 1
        return [masks[i] for i in range(n)]
    finally:
        free(masks)
        free(src)
        free(tab)
        free(in_ptr)
        free(in_edges)
        free(queue)
        free(queued)
        free(offs)
        free(tmask)


def attractor(eager, succ_indptr, succ_indices):
    cdef Py_ssize_t n = len(eager)
    cdef Py_ssize_t m = len(succ_indices)
    cdef int64_t *counter = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef int64_t *pred_ptr = <int64_t *> malloc((n + 2) * sizeof(int64_t))
    cdef int64_t *preds = <int64_t *> malloc((m + 1) * sizeof(int64_t))
    cdef int64_t *stack = <int64_t *> malloc((n + 1) * sizeof(int64_t))
    cdef char *won = <char *> malloc((n + 1) * sizeof(char))
    cdef char *is_eager = <char *> malloc((n + 1) * sizeof(char))
    cdef Py_ssize_t v, k, lo, hi, w, p, top
    try:
        for v in range(n + 2):
            pred_ptr[v] = 0
        for v in range(n):
            is_eager[v] = 1 if eager[v] else 0
            won[v] = 0
            lo = succ_indptr[v]
            hi = succ_indptr[v + 1]
            counter[v] = 1 if is_eager[v] else hi - lo
            for k in range(lo, hi):
                pred_ptr[<int64_t> succ_indices[k] + 1] += 1
        for v in range(n):
            pred_ptr[v + 1] += pred_ptr[v]
        for v in range(n):
            lo = succ_indptr[v]
            hi = succ_indptr[v + 1]
            for k in range(lo, hi):
                w = succ_indices[k]
                preds[pred_ptr[w]] = v
                pred_ptr[w] += 1
        for v in range(n, 0, -1):
            pred_ptr[v] = pred_ptr[v - 1]
        pred_ptr[0] = 0
        top = 0
        for v in range(n):
            if not is_eager[v] and counter[v] == 0:
                won[v] = 1
                stack[top] = v
                top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            for k in range(pred_ptr[v], pred_ptr[v + 1]):
                p = preds[k]
                if won[p]:
                    continue
                counter[p] -= 1
                if counter[p] == 0:
                    won[p] = 1
                    stack[top] = p
                    top += 1
        return [bool(won[v]) for v in range(n)]
    finally:
        free(counter)
        free(pred_ptr)
        free(preds)
        free(stack)
        free(won)
        free(is_eager)
