"""Path-tree LCE by recursive reduction ``b -> x*x`` with ``x = ceil(b**(2/5))``.

A level answers whether the first block of ``B = x*x`` path symbols can be
read below the subtree root with one hash probe. It then aligns the path top
and the tree node to marked nodes, so that the matched prefix, read in whole
blocks, is a canonical path: a path of ``i*B`` edges ending at a marked node.
All canonical paths are sorted by their block-name sequences; the best
whole-block match below the tree node is found among the predecessor and
successor of the query's canonical path in the list of canonical paths that
start there. That pins the answer to a window of at most ``B`` symbols, which
is the residual handed to the next level.

Block-sequence order is not lexicographic order of the strings, but it is
exact in whole blocks, which is all the reduction needs.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .contract import ContractedTree
from .diffcover import DiffCover
from .errors import QueryError
from .naming import NamingIndex
from .primitives import RmqIndex, index_dtype
from .results import LcePtResult
from .stats import QueryStats
from .tree import LabeledTree

MODES = ("simple", "compact")


@dataclass(frozen=True)
class PtConfig:
    mode: str = "simple"
    base_floor: int = 64

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.base_floor < 1:
            raise ValueError("base_floor must be >= 1")


def pt_level_x(b: int) -> int:
    """Smallest integer ``x >= b**(2/5)``, at least 2."""
    x = max(int(round(b ** 0.4)), 1)
    while x ** 5 < b * b:
        x += 1
    while x > 1 and (x - 1) ** 5 >= b * b:
        x -= 1
    return max(x, 2)


def pt_level_params(n: int, floor: int = 64) -> tuple[list[int], int]:
    params = []
    b = n
    while b > floor:
        x = pt_level_x(b)
        if x * x >= b:
            break
        params.append(b)
        b = x * x
    return params, b


class PathTable:
    """Hash table from (top node, name of a length-``length`` path) to the path's bottom."""

    def __init__(self, naming: NamingIndex, length: int):
        self.length = length
        names, count = naming.dense_names(length)
        self.count = max(count, 1)
        bottoms = np.flatnonzero(naming.tree.depth_array >= length)
        tops = naming.prims.la_batch(bottoms, length)
        keys = tops * self.count + names[bottoms]
        self.table = dict(zip(keys.tolist(), bottoms.tolist()))
        self.names = memoryview(names)

    def __len__(self) -> int:
        return len(self.table)

    def follow(self, top: int, bottom: int):
        """Node reached from ``top`` along the path ending at ``bottom``, or None."""
        return self.table.get(top * self.count + self.names[bottom])


class PtLevel:
    def __init__(self, naming: NamingIndex, b: int, stats: QueryStats):
        tree = naming.tree
        n = tree.n
        self.b = b
        self.x = x = pt_level_x(b)
        self.B = B = x * x
        self.stats = stats
        self.depth = tree.depth
        self.la = naming.prims.la
        self.part1 = PathTable(naming, B)
        depth = tree.depth_array
        self.cover = DiffCover(depth, x)
        self.imax = imax = -(-b // B)
        self._build_canonical(naming, imax)

    def _build_canonical(self, naming: NamingIndex, imax: int) -> None:
        B = self.B
        n = naming.n
        depth = naming.tree.depth_array
        la_batch = naming.prims.la_batch
        names, _ = naming.dense_names(B)
        marked = self.cover.marked_nodes
        dm = depth[marked]
        M = marked.size
        # column j holds the name of the block ending j*B above the marked node
        blocks = np.full((M, imax), -1, dtype=np.int64)
        cur = marked.copy()
        for j in range(imax):
            ok = dm >= (j + 1) * B
            if not ok.any():
                break
            blocks[ok, j] = names[cur[ok]]
            cur[ok] = la_batch(cur[ok], B)
        rows, ends, idx, tops = [], [], [], []
        midx = np.arange(M)
        for i in range(1, imax + 1):
            sel = dm >= i * B
            if not sel.any():
                break
            seq = np.full((int(sel.sum()), imax), -1, dtype=np.int64)
            seq[:, :i] = blocks[sel, i - 1::-1] if i > 1 else blocks[sel, :1]
            rows.append(seq)
            ends.append(marked[sel])
            idx.append(midx[sel] * imax + i - 1)
            tops.append(la_batch(marked[sel], i * B))
        self.canonical_count = sum(r.shape[0] for r in rows)
        dt = index_dtype(max(n, self.canonical_count) + 1)
        mpos = np.full(n, -1, dtype=dt)
        mpos[marked] = midx
        self._midx = memoryview(mpos)
        gpos = np.full(max(M * imax, 1), -1, dtype=dt)
        start = np.zeros(n, dtype=dt)
        stop = np.zeros(n, dtype=dt)
        if not rows:
            self.g_end = memoryview(np.zeros(0, dtype=dt))
            self.rmq = RmqIndex(np.zeros(1, dtype=np.int64))
            self._gpos = memoryview(gpos)
            self.local = memoryview(np.zeros(0, dtype=dt))
            self._start = memoryview(start)
            self._stop = memoryview(stop)
            return
        R = np.concatenate(rows)
        order = np.lexsort(R.T[::-1])
        R = R[order]
        lcp = np.zeros(R.shape[0], dtype=np.int64)
        if R.shape[0] > 1:
            eq = (R[1:] == R[:-1]) & (R[1:] >= 0)
            lcp[1:] = np.cumprod(eq, axis=1).sum(axis=1)
        self.rmq = RmqIndex(lcp)
        gpos[np.concatenate(idx)[order]] = np.arange(R.shape[0])
        self._gpos = memoryview(gpos)
        self.g_end = memoryview(np.concatenate(ends)[order].astype(dt))
        top_sorted = np.concatenate(tops)[order]
        by_top = np.argsort(top_sorted, kind="stable")
        self.local = memoryview(by_top.astype(dt))
        ts = top_sorted[by_top]
        present, first, counts = np.unique(ts, return_index=True, return_counts=True)
        start[present] = first
        stop[present] = first + counts
        self._start = memoryview(start)
        self._stop = memoryview(stop)

    def reduce(self, ell: int, u: int, v: int):
        """Match a prefix of the length-``ell`` path ending at ``u`` below ``v``.

        Returns ``(matched, ell', u', v')``: the answer is ``matched`` plus the
        path-tree LCE of the length-``ell'`` path ending at ``u'`` from ``v'``.
        """
        B = self.B
        if ell <= B:
            return 0, ell, u, v
        depth = self.depth
        la = self.la
        st = self.stats
        dt = depth[u] - ell
        pu = la(u, dt + B)
        st.lookups += 1
        w = self.part1.follow(v, pu)
        if w is None:
            return 0, B, pu, v
        # step back d edges inside the matched block so both tops are marked
        d = self.cover.find_d(pu, w)
        dt += B - d
        v = la(w, depth[w] - d)
        acc = B - d
        ell = depth[u] - dt
        if ell <= B:
            return acc, ell, u, v
        i = ell // B
        g = self._gpos[self._midx[la(u, dt + i * B)] * self.imax + i - 1]
        lo = self._start[v]
        hi = self._stop[v]
        best = 0
        best_end = -1
        if lo < hi:
            st.pred += 1
            local = self.local
            k = bisect_left(local, g, lo, hi)
            if k < hi:
                h = local[k]
                if h == g:
                    best, best_end = i, h
                else:
                    st.rmq += 1
                    best, best_end = self.rmq.min(g + 1, h), h
            if k > lo and best < i:
                h = local[k - 1]
                st.rmq += 1
                m = self.rmq.min(h + 1, g)
                if m > best:
                    best, best_end = m, h
        p = best * B
        if best:
            v = la(self.g_end[best_end], depth[v] + p)
        stop = min(ell, p + B)
        return acc + p, stop - p, la(u, dt + stop), v


class PtIndex:
    def __init__(self, tree: LabeledTree, config: PtConfig | None = None,
                 naming: NamingIndex | None = None, stats: QueryStats | None = None):
        self.tree = tree
        self.config = config = config or PtConfig()
        self.naming = naming if naming is not None else NamingIndex(tree)
        self.stats = stats if stats is not None else QueryStats()
        self.depth = tree.depth
        self.la = self.naming.prims.la
        self.mode = config.mode
        self.levels: list[PtLevel] = []
        self.contracted: ContractedTree | None = None
        self.inner: PtIndex | None = None
        if config.mode == "simple":
            params, bound = pt_level_params(tree.n, config.base_floor)
            self.levels = [PtLevel(self.naming, b, self.stats) for b in params]
            self.base_bound = bound
            self.base_block = math.isqrt(bound - 1) + 1 if bound > 1 else 1
        else:
            loglog = math.log2(math.log2(tree.n)) if tree.n > 2 else 1.0
            self.bstar = bstar = max(math.ceil(loglog), 2)
            self.contracted = ContractedTree(tree, self.naming, bstar)
            self.inner = PtIndex(self.contracted.tree, PtConfig("simple", config.base_floor), stats=self.stats)
            self.base_bound = bstar * bstar
            self.base_block = bstar
            self.block_table = PathTable(self.naming, self.base_bound)
        self.base_table = PathTable(self.naming, self.base_block)
        self._label = tree.label
        self._parent = tree.parent
        self._child = self.naming.prims.child_by_label

    @property
    def level_params(self) -> list[int]:
        return [lv.b for lv in self.levels]

    @property
    def num_levels(self) -> int:
        return len(self.levels) + (self.inner.num_levels if self.inner is not None else 0)

    def query(self, v1: int, w1: int, v2: int) -> LcePtResult:
        tree = self.tree
        tree.check_node(v1)
        tree.check_node(w1)
        tree.check_node(v2)
        if not tree.is_ancestor(v1, w1):
            raise QueryError(f"node {w1} is not in the subtree of {v1}")
        self.stats.queries += 1
        ell = self.depth[w1] - self.depth[v1]
        if ell == 0:
            return LcePtResult(0, v1, v2)
        m, node = self.lce_from(ell, w1, v2)
        return LcePtResult(m, self.la(w1, self.depth[v1] + m), node)

    def lce_from(self, ell: int, u: int, v: int) -> tuple[int, int]:
        """Path-tree LCE of the length-``ell`` path ending at ``u`` from ``v``, with the tree end."""
        if self.inner is not None:
            return self._lce_compact(ell, u, v)
        acc = 0
        st = self.stats
        for level in self.levels:
            if ell <= level.B:
                continue
            st.levels += 1
            add, ell, u, v = level.reduce(ell, u, v)
            acc += add
        m, node = self.base_walk(ell, u, v)
        return acc + m, node

    def _lce_compact(self, ell: int, u: int, v: int) -> tuple[int, int]:
        block = self.base_bound
        if ell <= block:
            return self.base_walk(ell, u, v)
        depth = self.depth
        la = self.la
        dt = depth[u] - ell
        pu = la(u, dt + block)
        self.stats.lookups += 1
        w = self.block_table.follow(v, pu)
        if w is None:
            return self.base_walk(block, pu, v)
        ct = self.contracted
        d = ct.cover.find_d(pu, w)
        dt += block - d
        v = la(w, depth[w] - d)
        acc = block - d
        ell = depth[u] - dt
        m = ell // block
        if m == 0:
            r, node = self.base_walk(ell, u, v)
            return acc + r, node
        to_c = ct.to_contracted
        j, cnode = self.inner.lce_from(m, to_c[la(u, dt + m * block)], to_c[v])
        v = ct.to_original[cnode]
        acc += j * block
        if j == m:
            r, node = self.base_walk(ell - m * block, u, v)
        else:
            r, node = self.base_walk(block, la(u, dt + (j + 1) * block), v)
        return acc + r, node

    def base_walk(self, ell: int, u: int, v: int) -> tuple[int, int]:
        """Whole blocks by hash lookup, then single symbols by child lookup."""
        if ell == 0:
            return 0, v
        st = self.stats
        la = self.la
        s = self.base_block
        table = self.base_table
        dt = self.depth[u] - ell
        j = 0
        while j + s <= ell:
            st.lookups += 1
            w = table.follow(v, la(u, dt + j + s))
            if w is None:
                break
            v = w
            j += s
        k = min(s, ell - j)
        if k == 0:
            return j, v
        a = la(u, dt + j + k)
        parent = self._parent
        label = self._label
        syms = []
        for _ in range(k):
            syms.append(label[a])
            a = parent[a]
        child = self._child
        for i in range(k - 1, -1, -1):
            st.comparisons += 1
            w = child(v, syms[i])
            if w is None:
                break
            v = w
            j += 1
        return j, v


def build_lce_pt(tree: LabeledTree, config: PtConfig | None = None,
                 naming: NamingIndex | None = None) -> PtIndex:
    return PtIndex(tree, config, naming)


def reduce_pt_level(level: PtLevel, ell: int, u: int, v: int):
    return level.reduce(ell, u, v)


def query_pt(idx: PtIndex, v1: int, w1: int, v2: int) -> LcePtResult:
    return idx.query(v1, w1, v2)


def base_walk_pt(idx: PtIndex, ell: int, u: int, v: int) -> tuple[int, int]:
    return idx.base_walk(ell, u, v)
