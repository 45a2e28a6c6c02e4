"""Order-preserving names for downward paths.

``rank(k, v)`` is the lexicographic rank of the length-``2**k`` path ending at
``v`` (read top-down), built by prefix doubling: a path of length
``2**(k+1)`` is the pair of its two halves. Any length ``L`` is named by the
two overlapping power-of-two windows covering it, which compares both for
equality and for lexicographic order.

On top of the ranks sit, per level, the sorted list of all length-``2**k``
paths with neighbour LCEs and an RMQ (constant-time path-path LCE for equal
power-of-two lengths), and the order of all nodes by their upward string to
the root (constant-time upward LCE). Together they stand in for the suffix
tree of a tree.
"""
from __future__ import annotations

import numpy as np

from .errors import QueryError
from .primitives import PrimitivesIndex, RmqIndex, index_dtype
from .results import LceResult
from .tree import LabeledTree


def floor_log2(x: int) -> int:
    return x.bit_length() - 1


def _dense(keys: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inv = np.unique(keys, return_inverse=True)
    return inv.reshape(-1), uniq.size


class SortedPathList:
    """Paths of one fixed length, sorted lexicographically, keyed by bottom node.

    ``lcp[i]`` is the LCE of entries ``i-1`` and ``i``; the LCE of any two
    entries is the minimum ``lcp`` strictly after the first up to the second.
    """

    def __init__(self, length: int, nodes: np.ndarray, lcp: np.ndarray, n: int):
        self.length = length
        self.nodes = np.asarray(nodes, dtype=index_dtype(n))
        self.rmq = RmqIndex(lcp)
        self.lcp = self.rmq.values
        pos = np.full(n, -1, dtype=index_dtype(n))
        pos[self.nodes] = np.arange(self.nodes.size)
        self.pos_array = pos
        self._pos = memoryview(pos)

    def __len__(self) -> int:
        return self.nodes.size

    def position(self, v: int) -> int:
        return self._pos[v]

    def lce(self, a: int, b: int) -> int:
        pa = self._pos[a]
        pb = self._pos[b]
        if pa == pb:
            return self.length
        if pa > pb:
            pa, pb = pb, pa
        return self.rmq.min(pa + 1, pb)

    def lce_batch(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        pa = self.pos_array[a].astype(np.int64)
        pb = self.pos_array[b].astype(np.int64)
        out = np.full(pa.size, self.length, dtype=np.int64)
        ne = pa != pb
        if ne.any():
            lo = np.minimum(pa[ne], pb[ne])
            hi = np.maximum(pa[ne], pb[ne])
            out[ne] = self.rmq.min_batch(lo + 1, hi)
        return out


class NamingIndex:
    def __init__(self, tree: LabeledTree, prims: PrimitivesIndex | None = None):
        self.tree = tree
        self.prims = prims if prims is not None else PrimitivesIndex(tree)
        self.depth = tree.depth
        n = tree.n
        self.n = n
        depth = tree.depth_array
        up = self.prims.up_table
        levels = self.prims.levels
        dt = index_dtype(n)

        self.rank_np: list[np.ndarray] = []
        self.rank_count: list[int] = []
        self.lists: list[SortedPathList] = []
        for k in range(levels):
            nodes = np.flatnonzero(depth >= (1 << k))
            if k == 0:
                keys = tree.label_array[nodes]
            else:
                prev = self.rank_np[k - 1]
                keys = prev[up[k - 1][nodes]].astype(np.int64) * self.rank_count[k - 1] + prev[nodes]
            inv, count = _dense(keys)
            rank = np.full(n, -1, dtype=dt)
            rank[nodes] = inv
            self.rank_np.append(rank)
            self.rank_count.append(count)
            order = nodes[np.argsort(inv, kind="stable")]
            self.lists.append(SortedPathList(1 << k, order, self._neighbour_lcp(k, order), n))
        self._rank = [memoryview(r) for r in self.rank_np]
        self._build_upward_order()
        self._dense_cache: dict[int, tuple[np.ndarray, int]] = {}

    def _neighbour_lcp(self, k: int, order: np.ndarray) -> np.ndarray:
        lcp = np.zeros(order.size, dtype=np.int64)
        if order.size < 2:
            return lcp
        a, b = order[:-1], order[1:]
        rank = self.rank_np[k]
        same = rank[a] == rank[b]
        if k == 0:
            lcp[1:] = same
            return lcp
        half = 1 << (k - 1)
        up = self.prims.up_table[k - 1]
        pa, pb = up[a], up[b]
        res = self._window_lce_batch(k - 1, a, b) + half
        prefix_differs = self.rank_np[k - 1][pa] != self.rank_np[k - 1][pb]
        if prefix_differs.any():
            res[prefix_differs] = self._window_lce_batch(k - 1, pa[prefix_differs], pb[prefix_differs])
        res[same] = 1 << k
        lcp[1:] = res
        return lcp

    def _window_lce_batch(self, k: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        rank = self.rank_np[k]
        out = np.full(a.size, 1 << k, dtype=np.int64)
        ne = rank[a] != rank[b]
        if ne.any():
            out[ne] = self.lists[k].lce_batch(a[ne], b[ne])
        return out

    def _build_upward_order(self) -> None:
        tree = self.tree
        n = self.n
        up = self.prims.up_table
        ur = np.zeros(n, dtype=np.int64)
        ur[1:] = tree.label_array[1:] + 1
        ur, count = _dense(ur)
        k = 0
        while count < n and k < self.prims.levels:
            ur, count = _dense(ur * count + ur[up[k]])
            k += 1
        order = np.argsort(ur, kind="stable")
        upos = np.empty(n, dtype=np.int64)
        upos[order] = np.arange(n)
        lcp = np.zeros(n, dtype=np.int64)
        if n > 1:
            a = order[:-1].copy()
            b = order[1:].copy()
            acc = np.zeros(n - 1, dtype=np.int64)
            for k in range(self.prims.levels - 1, -1, -1):
                rank = self.rank_np[k]
                ra = rank[a]
                ok = (ra == rank[b]) & (ra >= 0)
                if ok.any():
                    acc[ok] += 1 << k
                    a[ok] = up[k][a[ok]]
                    b[ok] = up[k][b[ok]]
            lcp[1:] = acc
        self.upward_order = order
        self.upward_lcp = lcp
        self._upos = memoryview(upos)
        self._urmq = RmqIndex(lcp)

    # -- fixed-length names -------------------------------------------

    def rank(self, k: int, v: int) -> int:
        """Rank of the length-``2**k`` path ending at ``v``, or -1."""
        return self._rank[k][v] if k < len(self._rank) else -1

    def name_fixed(self, v: int, length: int) -> tuple[int, int]:
        """Composite name of the length-``length`` path ending at ``v``."""
        self.tree.check_node(v)
        if not 0 <= length <= self.depth[v]:
            raise QueryError(f"length {length} exceeds depth {self.depth[v]} of node {v}")
        if length == 0:
            return (-1, -1)
        k = floor_log2(length)
        first = self.prims.la(v, self.depth[v] - length + (1 << k))
        return (self._rank[k][first], self._rank[k][v])

    def equal(self, u: int, v: int, length: int) -> bool:
        """Unchecked path equality for paths of ``length`` ending at u and v."""
        if length == 0 or u == v:
            return True
        k = length.bit_length() - 1
        rank = self._rank[k]
        if rank[u] != rank[v]:
            return False
        if length == 1 << k:
            return True
        la = self.prims.la
        off = length - (1 << k)
        return rank[la(u, self.depth[u] - off)] == rank[la(v, self.depth[v] - off)]

    def paths_equal(self, u: int, v: int, length: int) -> bool:
        self.tree.check_node(u)
        self.tree.check_node(v)
        if not 0 <= length <= min(self.depth[u], self.depth[v]):
            raise QueryError(f"length {length} out of range for nodes {u}, {v}")
        return self.equal(u, v, length)

    def names_batch(self, nodes: np.ndarray, length: int) -> np.ndarray:
        """Order-preserving int64 keys for the length-``length`` paths ending at ``nodes``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        if length == 0:
            return np.zeros(nodes.size, dtype=np.int64)
        k = floor_log2(length)
        rank = self.rank_np[k]
        first = self.prims.la_batch(nodes, length - (1 << k))
        return rank[first].astype(np.int64) * self.rank_count[k] + rank[nodes]

    def dense_names(self, length: int) -> tuple[np.ndarray, int]:
        """Dense lexicographic names of every length-``length`` path (-1 if too shallow).

        Returns ``(names, count)``, with ``names`` indexed by bottom node.
        """
        hit = self._dense_cache.get(length)
        if hit is not None:
            return hit
        n = self.n
        names = np.full(n, -1, dtype=np.int64)
        nodes = np.flatnonzero(self.tree.depth_array >= length)
        count = 0
        if nodes.size:
            inv, count = _dense(self.names_batch(nodes, length))
            names[nodes] = inv
        self._dense_cache[length] = (names, count)
        return names, count

    # -- LCE of equal-length paths ------------------------------------

    def _window_lce(self, k: int, a: int, b: int) -> int:
        rank = self._rank[k]
        if rank[a] == rank[b]:
            return 1 << k
        return self.lists[k].lce(a, b)

    def lce_equal(self, u: int, v: int, length: int) -> int:
        """LCE of the two length-``length`` paths ending at ``u`` and ``v``."""
        if length == 0 or u == v:
            return length
        k = length.bit_length() - 1
        p = 1 << k
        rank = self._rank[k]
        if p == length:
            return self._window_lce(k, u, v)
        la = self.prims.la
        off = length - p
        pu = la(u, self.depth[u] - off)
        pv = la(v, self.depth[v] - off)
        if rank[pu] != rank[pv]:
            return self.lists[k].lce(pu, pv)
        return off + self._window_lce(k, u, v)

    def lce_equal_batch(self, a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if length == 0:
            return np.zeros(a.size, dtype=np.int64)
        k = floor_log2(length)
        p = 1 << k
        off = length - p
        if off == 0:
            return self._window_lce_batch(k, a, b)
        pa = self.prims.la_batch(a, off)
        pb = self.prims.la_batch(b, off)
        rank = self.rank_np[k]
        res = self._window_lce_batch(k, a, b) + off
        differs = rank[pa] != rank[pb]
        if differs.any():
            res[differs] = self._window_lce_batch(k, pa[differs], pb[differs])
        return res

    # -- public queries -----------------------------------------------

    def upward_lce(self, u: int, v: int) -> int:
        """Common prefix length of the upward-to-root strings of ``u`` and ``v``."""
        self.tree.check_node(u)
        self.tree.check_node(v)
        if u == v:
            return self.depth[u]
        a, b = self._upos[u], self._upos[v]
        if a > b:
            a, b = b, a
        return self._urmq.min(a + 1, b)

    def lce_pp_simple(self, v1: int, w1: int, v2: int, w2: int) -> LceResult:
        """Path-path LCE with the O(n log n)-space power-of-two structure."""
        tree = self.tree
        for a, b in ((v1, w1), (v2, w2)):
            if not tree.is_ancestor(a, b):
                raise QueryError(f"node {b} is not in the subtree of {a}")
        depth = self.depth
        ell = min(depth[w1] - depth[v1], depth[w2] - depth[v2])
        if ell == 0:
            return LceResult(0, v1, v2)
        la = self.prims.la
        u = la(w1, depth[v1] + ell)
        v = la(w2, depth[v2] + ell)
        m = self.lce_equal(u, v, ell)
        return LceResult(m, la(u, depth[v1] + m), la(v, depth[v2] + m))


def build_naming(tree: LabeledTree, prims: PrimitivesIndex | None = None) -> NamingIndex:
    return NamingIndex(tree, prims)
