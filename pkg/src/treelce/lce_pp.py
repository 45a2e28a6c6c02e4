"""Path-path LCE by recursive length reduction.

A level with parameter ``b`` takes two equal-length paths of length at most
``b`` and either answers the query or hands on a pair of length at most
``x*x`` (``x = ceil(log2 b)``). It compares the ``x*x`` prefixes by name,
covers the rest with a power-of-two multiple ``L`` of ``x*x``, slides both
ends up to marked nodes of a difference cover, and reads the LCE off the
sorted list of length-``L`` paths ending at marked nodes.

Levels are stacked for ``b = n, log^2 n, ...`` and the final short pair is
finished by a block walk over stored names. Compact mode instead builds the
stack on a contracted tree whose edges stand for ``b*^2`` original edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contract import ContractedTree, log_star
from .diffcover import DiffCover
from .errors import QueryError
from .naming import NamingIndex, SortedPathList
from .results import LceResult
from .stats import QueryStats
from .tree import LabeledTree

MODES = ("simple", "compact")


@dataclass(frozen=True)
class PpConfig:
    mode: str = "simple"
    base_floor: int = 4

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.base_floor < 1:
            raise ValueError("base_floor must be >= 1")


def level_x(b: int) -> int:
    return max(math.ceil(math.log2(b)), 2) if b > 1 else 2


def pp_level_params(n: int, floor: int = 4) -> tuple[list[int], int]:
    """Parameters of the levels worth building, and the bound left for the base walk.

    A level with parameter ``b`` shrinks the length bound to ``x*x``; it is
    only built when that is a real decrease.
    """
    params = []
    b = n
    while b > floor:
        x = level_x(b)
        if x * x >= b:
            break
        params.append(b)
        b = x * x
    return params, b


class PpLevel:
    def __init__(self, naming: NamingIndex, b: int, stats: QueryStats):
        tree = naming.tree
        self.b = b
        self.x = x = level_x(b)
        self.X = X = x * x
        self.naming = naming
        self.stats = stats
        self.depth = tree.depth
        self.la = naming.prims.la
        depth = tree.depth_array
        self.cover = DiffCover(depth, x)
        marked = self.cover.marked_nodes
        dm = depth[marked]
        self.lists: list[SortedPathList | None] = []
        L = X
        while L <= b:
            nodes = marked[dm >= L]
            if nodes.size == 0:
                self.lists.append(None)
            else:
                nodes = nodes[np.argsort(naming.names_batch(nodes, L), kind="stable")]
                lcp = np.zeros(nodes.size, dtype=np.int64)
                if nodes.size > 1:
                    lcp[1:] = naming.lce_equal_batch(nodes[:-1], nodes[1:], L)
                self.lists.append(SortedPathList(L, nodes, lcp, tree.n))
            L *= 2

    def path_count(self) -> int:
        return sum(len(lst) for lst in self.lists if lst is not None)

    def reduce(self, ell: int, u: int, v: int):
        """One reduction step on the length-``ell`` paths ending at ``u`` and ``v``.

        Returns ``(done, matched, ell', u', v')``: the answer is ``matched``
        when ``done``, otherwise ``matched`` plus the LCE of the length-``ell'``
        paths ending at ``u'`` and ``v'``.
        """
        X = self.X
        if ell <= X:
            return False, 0, ell, u, v
        depth = self.depth
        la = self.la
        equal = self.naming.equal
        st = self.stats
        tu = depth[u] - ell
        tv = depth[v] - ell
        pu = la(u, tu + X)
        pv = la(v, tv + X)
        st.lookups += 1
        if not equal(pu, pv, X):
            return False, 0, X, pu, pv
        if ell <= 2 * X:
            return False, X, ell - X, u, v
        k = ((ell - X) // X).bit_length() - 1
        L = X << k
        # The pair right after the verified prefix decides first: if it has a
        # mismatch, the mismatch is the answer, else the pair ending at u, v.
        a = la(u, tu + X + L)
        c = la(v, tv + X + L)
        st.lookups += 1
        if equal(a, c, L):
            off = ell - L
            a, c = u, v
        else:
            off = X
        d = self.cover.find_d(a, c)
        a2 = la(a, depth[a] - d)
        c2 = la(c, depth[c] - d)
        st.rmq += 1
        m = self.lists[k].lce(a2, c2)
        if m == L:
            return False, off + L - d, d, a, c
        return True, off + m - d, 0, a, c


class PpIndex:
    def __init__(self, tree: LabeledTree, config: PpConfig | None = None,
                 naming: NamingIndex | None = None, stats: QueryStats | None = None):
        self.tree = tree
        self.config = config = config or PpConfig()
        self.naming = naming if naming is not None else NamingIndex(tree)
        self.stats = stats if stats is not None else QueryStats()
        self.depth = tree.depth
        self.la = self.naming.prims.la
        self.mode = config.mode
        self.levels: list[PpLevel] = []
        self.contracted: ContractedTree | None = None
        self.inner: PpIndex | None = None
        if config.mode == "simple":
            params, bound = pp_level_params(tree.n, config.base_floor)
            self.levels = [PpLevel(self.naming, b, self.stats) for b in params]
            self.base_bound = bound
            self.base_block = max(math.isqrt(bound - 1) + 1, 1) if bound > 1 else 1
        else:
            self.bstar = bstar = max(log_star(tree.n), 2)
            self.contracted = ContractedTree(tree, self.naming, bstar)
            self.inner = PpIndex(self.contracted.tree, PpConfig("simple", config.base_floor), stats=self.stats)
            self.base_bound = bstar * bstar
            self.base_block = bstar
        names, _ = self.naming.dense_names(self.base_block)
        self._bnames = names.tolist()
        self._label = tree.label
        self._parent = tree.parent

    @property
    def level_params(self) -> list[int]:
        return [lv.b for lv in self.levels]

    @property
    def num_levels(self) -> int:
        return len(self.levels) + (self.inner.num_levels if self.inner is not None else 0)

    # -- query --------------------------------------------------------

    def query(self, v1: int, w1: int, v2: int, w2: int) -> LceResult:
        tree = self.tree
        for a, b in ((v1, w1), (v2, w2)):
            tree.check_node(a)
            tree.check_node(b)
            if not tree.is_ancestor(a, b):
                raise QueryError(f"node {b} is not in the subtree of {a}")
        self.stats.queries += 1
        depth = self.depth
        ell = min(depth[w1] - depth[v1], depth[w2] - depth[v2])
        if ell == 0:
            return LceResult(0, v1, v2)
        la = self.la
        u = la(w1, depth[v1] + ell)
        v = la(w2, depth[v2] + ell)
        m = self.lce_equal(ell, u, v)
        return LceResult(m, la(u, depth[v1] + m), la(v, depth[v2] + m))

    def lce_equal(self, ell: int, u: int, v: int) -> int:
        """LCE of the two length-``ell`` paths ending at ``u`` and ``v``."""
        if self.inner is not None:
            return self._lce_compact(ell, u, v)
        acc = 0
        st = self.stats
        for level in self.levels:
            if ell <= level.X:
                continue
            st.levels += 1
            done, add, ell, u, v = level.reduce(ell, u, v)
            acc += add
            if done:
                return acc
        return acc + self.base_walk(ell, u, v)

    def _lce_compact(self, ell: int, u: int, v: int) -> int:
        block = self.base_bound
        if ell <= block:
            return self.base_walk(ell, u, v)
        depth = self.depth
        la = self.la
        tu = depth[u] - ell
        tv = depth[v] - ell
        pu = la(u, tu + block)
        pv = la(v, tv + block)
        self.stats.lookups += 1
        if not self.naming.equal(pu, pv, block):
            return self.base_walk(block, pu, pv)
        ct = self.contracted
        d = ct.cover.find_d(u, v)
        rest = ell - d
        m = rest // block
        j = m
        if m:
            to_c = ct.to_contracted
            j = self.inner.lce_equal(m, to_c[la(u, depth[u] - d)], to_c[la(v, depth[v] - d)])
        if j == m:
            return rest + self.base_walk(d, u, v)
        s = rest - (m - j) * block
        return s + self.base_walk(block, la(u, tu + s + block), la(v, tv + s + block))

    def base_walk(self, ell: int, u: int, v: int) -> int:
        """LCE of two short paths: whole blocks by name, then symbol by symbol."""
        if ell == 0 or u == v:
            return ell
        st = self.stats
        depth = self.depth
        la = self.la
        s = self.base_block
        names = self._bnames
        tu = depth[u] - ell
        tv = depth[v] - ell
        j = 0
        while j + s <= ell:
            st.lookups += 1
            if names[la(u, tu + j + s)] != names[la(v, tv + j + s)]:
                break
            j += s
        k = min(s, ell - j)
        if k == 0:
            return j
        a = la(u, tu + j + k)
        b = la(v, tv + j + k)
        parent = self._parent
        label = self._label
        sa = []
        sb = []
        for _ in range(k):
            sa.append(label[a])
            sb.append(label[b])
            a = parent[a]
            b = parent[b]
        i = k - 1
        while i >= 0:
            st.comparisons += 1
            if sa[i] != sb[i]:
                break
            i -= 1
        return j + (k - 1 - i)


def build_lce_pp(tree: LabeledTree, config: PpConfig | None = None,
                 naming: NamingIndex | None = None) -> PpIndex:
    return PpIndex(tree, config, naming)


def reduce_pp_level(level: PpLevel, ell: int, u: int, v: int):
    return level.reduce(ell, u, v)


def query_pp(idx: PpIndex, v1: int, w1: int, v2: int, w2: int) -> LceResult:
    return idx.query(v1, w1, v2, w2)


def base_walk_pp(idx: PpIndex, ell: int, u: int, v: int) -> int:
    return idx.base_walk(ell, u, v)
