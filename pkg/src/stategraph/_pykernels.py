"""Pure-Python kernels; the reference behaviour for ``_kernels.pyx``."""
from __future__ import annotations

from collections import deque

BACKEND = "python"


def propagate_labels(init, edge_src, edge_dst, edge_table, table_offsets, table_masks):
    """Backward bitmask propagation to the least fixpoint.

    ``init[v]`` is the starting label mask of vertex ``v``. Edge ``e`` runs
    from ``edge_src[e]`` to ``edge_dst[e]`` and uses dependency table
    ``t = edge_table[e]``: bit ``l`` of the destination's mask contributes
    ``table_masks[table_offsets[t] + l]`` to the source's mask.
    """
    masks = list(init)
    n = len(masks)
    incoming = [[] for _ in range(n)]
    for e in range(len(edge_src)):
        incoming[edge_dst[e]].append(e)
    queue = deque(range(n))
    queued = [True] * n
    while queue:
        dst = queue.popleft()
        queued[dst] = False
        label = masks[dst]
        if not label:
            continue
        for e in incoming[dst]:
            base = table_offsets[edge_table[e]]
            width = table_offsets[edge_table[e] + 1] - base
            contrib = 0
            bits = label
            pos = 0
            while bits and pos < width:
                if bits & 1:
                    contrib |= table_masks[base + pos]
                bits >>= 1
                pos += 1
            src = edge_src[e]
            if contrib & ~masks[src]:
                masks[src] |= contrib
                if not queued[src]:
                    queued[src] = True
                    queue.append(src)
    return masks


def attractor(eager, succ_indptr, succ_indices):
    """Least set W closed under: an eager node with a successor in W is in
    W, and a non-eager node whose successors are all in W is in W.

    Returns a list of booleans indexed by node.
    """
    n = len(eager)
    preds = [[] for _ in range(n)]
    counter = [0] * n
    for v in range(n):
        lo, hi = succ_indptr[v], succ_indptr[v + 1]
        counter[v] = 1 if eager[v] else hi - lo
        for k in range(lo, hi):
            preds[succ_indices[k]].append(v)
    won = [False] * n
    stack = [v for v in range(n) if not eager[v] and counter[v] == 0]
    for v in stack:
        won[v] = True
    while stack:
        v = stack.pop()
        for p in preds[v]:
            if won[p]:
                continue
            counter[p] -= 1
            if counter[p] == 0:
                won[p] = True
                stack.append(p)
    return won
