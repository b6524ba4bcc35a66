"""Compiled integer kernels: layout shuffle, PEG edge growth, girth scan.

Isolated here so numba is imported lazily and compiled code is disk-cached
on first use. Everything is plain int64/uint64 arithmetic; results are
bit-for-bit deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

_U_GOLDEN = uint64(0x9E3779B97F4A7C15)
_U_MIX1 = uint64(0xBF58476D1CE4E5B9)
_U_MIX2 = uint64(0x94D049BB133111EB)


@njit(cache=True)
def _sm64_at(seed, counter):
    # Counter-based SplitMix64: finalizer of seed + (counter+1)*golden.
    z = seed + (counter + uint64(1)) * _U_GOLDEN
    z = (z ^ (z >> uint64(30))) * _U_MIX1
    z = (z ^ (z >> uint64(27))) * _U_MIX2
    return z ^ (z >> uint64(31))


@njit(cache=True)
def fisher_yates(n, seed):
    """Permutation of range(n); see rng.SHUFFLE_ID for the exact contract."""
    perm = np.arange(n, dtype=np.int64)
    counter = uint64(0)
    for j in range(n - 1, 0, -1):
        bound = uint64(j + 1)
        # 2**64 mod bound; rejection keeps the draw unbiased.
        rem = (uint64(0) - bound) % bound
        r = _sm64_at(seed, counter)
        counter += uint64(1)
        if rem != uint64(0):
            limit = uint64(0) - rem
            while r >= limit:
                r = _sm64_at(seed, counter)
                counter += uint64(1)
        k = int64(r % bound)
        tmp = perm[j]
        perm[j] = perm[k]
        perm[k] = tmp
    return perm


@njit(cache=True)
def peg_fill(m, deg_seq, var_ptr, var_adj, check_adj, check_deg):
    """Place PEG edges in processing order. Returns 0 on success, 1 if a
    check outgrew the preallocated adjacency (caller retries with more room).

    For every edge after a node's first, a BFS over the current graph finds
    the checks at maximal depth from the node (unreached checks count as
    infinitely deep); ties break on lowest current check degree, then lowest
    index. The first edge goes to the globally lowest-degree check.
    """
    n = deg_seq.shape[0]
    cap = check_adj.shape[1]
    var_tag = np.full(n, -1, np.int64)
    check_tag = np.full(m, -1, np.int64)
    check_depth = np.zeros(m, np.int64)
    var_queue = np.empty(n, np.int64)
    check_queue = np.empty(m, np.int64)
    var_built = np.zeros(n, np.int64)
    tag = 0
    for v in range(n):
        for k in range(deg_seq[v]):
            if k == 0:
                target = 0
                for c in range(1, m):
                    if check_deg[c] < check_deg[target]:
                        target = c
            else:
                tag += 1
                var_tag[v] = tag
                var_queue[0] = v
                vq = 1
                reached = 0
                maxdepth = 0
                depth = 0
                while vq > 0:
                    depth += 1
                    cq = 0
                    for qi in range(vq):
                        u = var_queue[qi]
                        base = var_ptr[u]
                        for e in range(var_built[u]):
                            c = var_adj[base + e]
                            if check_tag[c] != tag:
                                check_tag[c] = tag
                                check_depth[c] = depth
                                check_queue[cq] = c
                                cq += 1
                    if cq == 0:
                        break
                    reached += cq
                    maxdepth = depth
                    if reached == m:
                        break
                    vq = 0
                    for qi in range(cq):
                        c = check_queue[qi]
                        for e in range(check_deg[c]):
                            u = check_adj[c, e]
                            if var_tag[u] != tag:
                                var_tag[u] = tag
                                var_queue[vq] = u
                                vq += 1
                target = -1
                if reached < m:
                    for c in range(m):
                        if check_tag[c] != tag and (
                            target == -1 or check_deg[c] < check_deg[target]
                        ):
                            target = c
                else:
                    for c in range(m):
                        if (
                            check_tag[c] == tag
                            and check_depth[c] == maxdepth
                            and (target == -1 or check_deg[c] < check_deg[target])
                        ):
                            target = c
            var_adj[var_ptr[v] + k] = target
            var_built[v] = k + 1
            if check_deg[target] >= cap:
                return 1
            check_adj[target, check_deg[target]] = v
            check_deg[target] += 1
    return 0


@njit(cache=True)
def girth_search(n, var_ptr, var_adj, chk_ptr, chk_adj, cap):
    """Shortest cycle length <= cap in the bipartite graph, else 0.

    BFS from every variable node with parent tracking; a met node at depths
    (d, d') closes a cycle of length d + d' + 1. Depth limits shrink as the
    best known cycle shrinks; 4 is the bipartite minimum, so stop there.
    """
    total = n + chk_ptr.shape[0] - 1
    dist = np.empty(total, np.int64)
    visit = np.full(total, -1, np.int64)
    parent = np.empty(total, np.int64)
    queue = np.empty(total, np.int64)
    best = cap + 1
    for root in range(n):
        if best == 4:
            break
        visit[root] = root
        dist[root] = 0
        parent[root] = -1
        queue[0] = root
        head = 0
        size = 1
        limit = best // 2 - 1
        while head < size:
            node = queue[head]
            head += 1
            d = dist[node]
            if d > limit:
                break
            if node < n:
                lo = var_ptr[node]
                hi = var_ptr[node + 1]
            else:
                lo = chk_ptr[node - n]
                hi = chk_ptr[node - n + 1]
            for e in range(lo, hi):
                if node < n:
                    w = n + var_adj[e]
                else:
                    w = chk_adj[e]
                if w == parent[node]:
                    continue
                if visit[w] == root:
                    cyc = d + dist[w] + 1
                    if cyc < best:
                        best = cyc
                        limit = best // 2 - 1
                else:
                    visit[w] = root
                    dist[w] = d + 1
                    parent[w] = node
                    queue[size] = w
                    size += 1
    if best > cap:
        return 0
    return best
