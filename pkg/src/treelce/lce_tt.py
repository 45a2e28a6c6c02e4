"""Tree-tree LCE with a cluster partition and a node-by-boundary answer table.

The tree is cut into ``O(tau)`` edge-disjoint connected clusters of
``O(n/tau)`` nodes, each touching the rest of the tree through at most two
boundary nodes. For every node ``v`` and boundary node ``b`` the table holds
``LCE_TT(v, b)``. A query walks both subtrees in parallel inside their
clusters and finishes with a table lookup as soon as either side reaches a
boundary node.

Among equally long answers the pair whose first end comes first in preorder
is returned; with sibling-distinct labels the second end is then determined.
The table keeps two realizing pairs per entry, one minimizing the node side
and one minimizing the boundary side, so lookups stay exact in either
orientation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import QueryError, TreeFormatError
from .results import LceTtResult
from .stats import QueryStats
from .tree import LabeledTree, SymbolTable


@dataclass
class Cluster:
    edges: list[int]  # an edge is named by its child endpoint
    nodes: list[int]
    boundary: list[int] = field(default_factory=list)

    @property
    def top(self) -> int:
        return self.nodes[0]


class ClusterPartition:
    def __init__(self, tree: LabeledTree, tau: int, clusters: list[Cluster]):
        self.tree = tree
        self.tau = tau
        self.z = -(-tree.n // tau)
        self.clusters = clusters
        member: list[list[int]] = [[] for _ in range(tree.n)]
        for i, c in enumerate(clusters):
            for v in c.nodes:
                member[v].append(i)
        self.membership = member
        self.boundary_nodes = [v for v in range(tree.n) if len(member[v]) >= 2]
        is_b = set(self.boundary_nodes)
        for c in clusters:
            c.boundary = [v for v in c.nodes if v in is_b]

    def __len__(self) -> int:
        return len(self.clusters)

    def cluster_of_edge(self) -> list[int]:
        out = [-1] * self.tree.n
        for i, c in enumerate(self.clusters):
            for e in c.edges:
                out[e] = i
        return out


def _closure(tree: LabeledTree, marked: list[bool]) -> list[bool]:
    """Marked nodes, the root, and every nearest common ancestor of two of them."""
    n = tree.n
    in_s = list(marked)
    in_s[0] = True
    has = [False] * n
    hits = [0] * n
    for v in reversed(tree.order):
        if in_s[v] or hits[v] >= 2:
            in_s[v] = True
        has[v] = in_s[v] or hits[v] > 0
        p = tree.parent[v]
        if p >= 0 and has[v]:
            hits[p] += 1
    return in_s


def build_clusters(tree: LabeledTree, tau: int) -> ClusterPartition:
    """Partition the edges into at most ``3.5*tau + 1`` clusters of at most ``4*ceil(n/tau) + 2`` nodes.

    Non-leaf nodes are marked bottom-up once ``z = ceil(n/tau)`` unmarked
    nodes hang below them, which marks at most ``tau`` nodes. Closing the
    marks under nearest common ancestors gives the cluster tops. The edges
    between consecutive tops form groups of at most ``z`` inner nodes with
    at most one top below; the groups without a top below are packed into
    bins of ``3z`` inner nodes, and one bin per top absorbs a group that has
    a top below.
    """
    n = tree.n
    if n <= 1:
        raise QueryError("cluster partition needs a tree with at least one edge")
    if not 1 <= tau <= n:
        raise QueryError(f"tau must be in [1, {n}], got {tau}")
    z = -(-n // tau)
    parent = tree.parent
    children = tree.children
    pend = [0] * n
    marked = [False] * n
    for v in reversed(tree.order):
        if children[v] and pend[v] >= z:
            marked[v] = True
        elif v:
            pend[parent[v]] += pend[v] + 1
    in_s = _closure(tree, marked)

    group = [-1] * n
    g_top: list[int] = []
    g_edges: list[list[int]] = []
    g_inner: list[int] = []
    g_bottom: list[int] = []
    for v in tree.order[1:]:
        p = parent[v]
        if in_s[p]:
            g = len(g_top)
            g_top.append(p)
            g_edges.append([])
            g_inner.append(0)
            g_bottom.append(-1)
        else:
            g = group[p]
        group[v] = g
        g_edges[g].append(v)
        if in_s[v]:
            g_bottom[g] = v
        else:
            g_inner[g] += 1

    clusters: list[Cluster] = []

    def emit(groups: list[int]) -> None:
        edges = [e for g in groups for e in g_edges[g]]
        top = g_top[groups[0]]
        nodes = [top] + edges
        clusters.append(Cluster(edges=edges, nodes=nodes))

    for s in tree.order:
        if not in_s[s] or not children[s]:
            continue
        own = [group[c] for _, c in children[s]]
        with_bottom = [g for g in own if g_bottom[g] >= 0]
        bins: list[list[int]] = []
        load = 0
        for g in own:
            if g_bottom[g] >= 0:
                continue
            if not bins or load + g_inner[g] > 3 * z:
                bins.append([])
                load = 0
            bins[-1].append(g)
            load += g_inner[g]
        for b in bins[:-1]:
            emit(b)
        last = bins[-1] if bins else []
        if with_bottom:
            emit(last + with_bottom[:1])
            for g in with_bottom[1:]:
                emit([g])
        elif last:
            emit(last)
    return ClusterPartition(tree, tau, clusters)


def default_tau(n: int) -> int:
    return max(math.isqrt(n - 1) + 1, 1) if n > 1 else 1


class TtIndex:
    def __init__(self, tree: LabeledTree, tau: int | None = None, stats: QueryStats | None = None):
        self.tree = tree
        n = tree.n
        self.tau = tau = default_tau(n) if tau is None else tau
        self.stats = stats if stats is not None else QueryStats()
        self.pre = tree.euler_in
        self.kids = [dict(ch) for ch in tree.children]
        self.partition = build_clusters(tree, tau) if n > 1 else None
        bnodes = self.partition.boundary_nodes if self.partition is not None else []
        self.boundary = bnodes
        nb = len(bnodes)
        self.nb = nb
        bidx = [-1] * n
        for i, b in enumerate(bnodes):
            bidx[b] = i
        self.bidx = bidx
        self._build_table()

    def _build_table(self) -> None:
        tree = self.tree
        n, nb = tree.n, self.nb
        size = n * nb
        self._len = [0] * size
        # (a1, a2) minimizes the node-side end, (b1, b2) the boundary-side end
        self._a1 = [0] * size
        self._a2 = [0] * size
        self._b1 = [0] * size
        self._b2 = [0] * size
        if nb == 0:
            return
        depth = np.asarray(tree.depth_array, dtype=np.int64)
        bn = np.asarray(self.boundary, dtype=np.int64)
        key = (depth[:, None] + depth[bn][None, :]).ravel()
        for e in np.argsort(-key, kind="stable").tolist():
            v, j = divmod(e, nb)
            self._fill(e, v, self.boundary[j])

    def _fill(self, e: int, v: int, b: int) -> None:
        pre = self.pre
        kids = self.kids
        bidx = self.bidx
        nb = self.nb
        L, A1, A2, B1, B2 = self._len, self._a1, self._a2, self._b1, self._b2
        best = 0
        a1, a2, b1, b2 = v, b, v, b
        stack = [(v, b, 0)]
        while stack:
            x, y, dist = stack.pop()
            if dist:
                jy = bidx[y]
                jx = bidx[x]
                if jy >= 0 or jx >= 0:
                    if jy >= 0:
                        f = x * nb + jy
                        ln = dist + L[f]
                        ca1, ca2, cb1, cb2 = A1[f], A2[f], B1[f], B2[f]
                    else:
                        f = y * nb + jx
                        ln = dist + L[f]
                        ca1, ca2, cb1, cb2 = B2[f], B1[f], A2[f], A1[f]
                    if ln > best:
                        best, a1, a2, b1, b2 = ln, ca1, ca2, cb1, cb2
                    elif ln == best:
                        if pre[ca1] < pre[a1]:
                            a1, a2 = ca1, ca2
                        if pre[cb2] < pre[b2]:
                            b1, b2 = cb1, cb2
                    continue
                if dist > best:
                    best, a1, a2, b1, b2 = dist, x, y, x, y
                elif dist == best:
                    if pre[x] < pre[a1]:
                        a1, a2 = x, y
                    if pre[y] < pre[b2]:
                        b1, b2 = x, y
            ky = kids[y]
            for s, c in kids[x].items():
                d = ky.get(s)
                if d is not None:
                    stack.append((c, d, dist + 1))
        L[e] = best
        A1[e], A2[e], B1[e], B2[e] = a1, a2, b1, b2

    @property
    def table_size(self) -> int:
        return len(self._len)

    def table_arrays(self) -> dict[str, np.ndarray]:
        """The stored answers as ``(n, #boundary)`` arrays: length and both ends."""
        shape = (self.tree.n, self.nb)
        return {
            "length": np.array(self._len, dtype=np.int64).reshape(shape),
            "end1": np.array(self._a1, dtype=np.int64).reshape(shape),
            "end2": np.array(self._a2, dtype=np.int64).reshape(shape),
        }

    def entry(self, v: int, b: int) -> LceTtResult:
        """Stored answer for node ``v`` against boundary node ``b``."""
        self.tree.check_node(v)
        j = self.bidx[b] if 0 <= b < self.tree.n else -1
        if j < 0:
            raise QueryError(f"node {b} is not a boundary node")
        f = v * self.nb + j
        return LceTtResult(self._len[f], self._a1[f], self._a2[f])

    def query(self, v1: int, v2: int) -> LceTtResult:
        tree = self.tree
        tree.check_node(v1)
        tree.check_node(v2)
        st = self.stats
        st.queries += 1
        nb = self.nb
        bidx = self.bidx
        if bidx[v2] >= 0:
            st.lookups += 1
            f = v1 * nb + bidx[v2]
            return LceTtResult(self._len[f], self._a1[f], self._a2[f])
        if bidx[v1] >= 0:
            st.lookups += 1
            f = v2 * nb + bidx[v1]
            return LceTtResult(self._len[f], self._b2[f], self._b1[f])
        pre = self.pre
        kids = self.kids
        L, A1, A2, B1, B2 = self._len, self._a1, self._a2, self._b1, self._b2
        best, e1, e2 = 0, v1, v2
        stack = [(v1, v2, 0)]
        while stack:
            x, y, dist = stack.pop()
            st.traversal += 1
            if dist:
                jy = bidx[y]
                jx = bidx[x]
                if jy >= 0 or jx >= 0:
                    st.lookups += 1
                    if jy >= 0:
                        f = x * nb + jy
                        c1, c2 = A1[f], A2[f]
                    else:
                        f = y * nb + jx
                        c1, c2 = B2[f], B1[f]
                    ln = dist + L[f]
                    if ln > best or (ln == best and pre[c1] < pre[e1]):
                        best, e1, e2 = ln, c1, c2
                    continue
                if dist > best or (dist == best and pre[x] < pre[e1]):
                    best, e1, e2 = dist, x, y
            ky = kids[y]
            for s, c in kids[x].items():
                d = ky.get(s)
                if d is not None:
                    st.comparisons += 1
                    stack.append((c, d, dist + 1))
        return LceTtResult(best, e1, e2)


def build_lce_tt(tree: LabeledTree, tau: int | None = None) -> TtIndex:
    return TtIndex(tree, tau)


def query_tt(idx: TtIndex, v1: int, v2: int) -> LceTtResult:
    return idx.query(v1, v2)


# -- set intersection -------------------------------------------------


def parse_sets(text: str) -> list[list[int]]:
    """One set per line of whitespace-separated integers; a blank line is the empty set."""
    family = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        try:
            family.append(sorted({int(tok) for tok in line.split()}))
        except ValueError:
            raise TreeFormatError(f"expected integers, got {line.strip()!r}", lineno) from None
    return family


def family_to_tree(sets) -> tuple[LabeledTree, SymbolTable, list[int]]:
    """Root, one child ``S<i>`` per set, and one child per element under it.

    Returns the tree, its symbol table and the node of each set (0-based list,
    set ``i`` at position ``i - 1``).
    """
    sets = [sorted(set(s)) for s in sets]
    if not sets:
        raise QueryError("the set family is empty")
    tokens = {f"S{i}" for i in range(1, len(sets) + 1)}
    tokens.update(str(e) for s in sets for e in s)
    symbols = SymbolTable(tokens)
    parent = [-1]
    label = [-1]
    set_nodes = []
    for i in range(1, len(sets) + 1):
        set_nodes.append(len(parent))
        parent.append(0)
        label.append(symbols.symbol(f"S{i}"))
    for i, s in enumerate(sets):
        for e in s:
            parent.append(set_nodes[i])
            label.append(symbols.symbol(str(e)))
    return LabeledTree(parent, label, sigma=len(symbols)), symbols, set_nodes


class SetFamilyIndex:
    """Disjointness queries on a set family through tree-tree LCE."""

    def __init__(self, sets, tau: int | None = None):
        self.sets = [sorted(set(s)) for s in sets]
        self.tree, self.symbols, self.set_nodes = family_to_tree(self.sets)
        self.tt = TtIndex(self.tree, tau)

    def __len__(self) -> int:
        return len(self.sets)

    def lce(self, i: int, j: int) -> LceTtResult:
        for k in (i, j):
            if not 1 <= k <= len(self.sets):
                raise QueryError(f"set index {k} out of range 1..{len(self.sets)}")
        return self.tt.query(self.set_nodes[i - 1], self.set_nodes[j - 1])

    def disjoint(self, i: int, j: int) -> bool:
        return self.lce(i, j).length == 0


def disjoint(idx: SetFamilyIndex, i: int, j: int) -> bool:
    return idx.disjoint(i, j)
