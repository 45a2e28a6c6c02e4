"""Edge-labeled rooted trees: ingestion, validation and normalization.

A tree is stored as dense arrays over node ids ``0..n-1`` with the root at 0.
Every non-root node carries the symbol of the edge from its parent. All
queries in this package assume a *normalized* tree, i.e. no node has two
child edges with the same symbol; :func:`normalize` merges such edges.
"""
from __future__ import annotations

from collections import deque
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import QueryError, TreeFormatError

MAX_NODES = 2**32 - 1


class SymbolTable:
    """Bijection between tokens and dense symbol ids.

    Ids follow ascending byte order of the UTF-8 encoded tokens, which fixes
    every lexicographic order used downstream.
    """

    def __init__(self, tokens: Iterable[str]):
        self.tokens: list[str] = sorted(set(tokens), key=lambda t: t.encode("utf-8"))
        self._ids = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    def symbol(self, token: str) -> int:
        return self._ids[token]

    def token(self, symbol: int) -> str:
        return self.tokens[symbol]

    def __repr__(self) -> str:
        return f"SymbolTable({self.tokens!r})"


class PathRef(NamedTuple):
    """Downward path ``top ~> bottom``."""

    top: int
    bottom: int
    length: int


class LabeledTree:
    """Immutable rooted tree with one symbol per edge.

    ``parent[0]`` and ``label[0]`` are -1. ``children[v]`` lists
    ``(symbol, child)`` pairs sorted by symbol. ``euler_in``/``euler_out`` are
    the preorder number of a node and of its last descendant, so ``u`` is an
    ancestor of ``v`` iff ``euler_in[u] <= euler_in[v] <= euler_out[u]``.
    """

    def __init__(self, parent: Sequence[int], label: Sequence[int], sigma: int | None = None):
        parent = [int(p) for p in parent]
        label = [int(s) for s in label]
        n = len(parent)
        if n == 0:
            raise TreeFormatError("a tree needs at least one node")
        if n > MAX_NODES:
            raise TreeFormatError(f"at most {MAX_NODES} nodes are supported")
        if len(label) != n:
            raise ValueError("parent and label arrays differ in length")
        if parent[0] != -1:
            raise TreeFormatError("node 0 must be the root")
        label[0] = -1
        kids: list[list[int]] = [[] for _ in range(n)]
        for v in range(1, n):
            p = parent[v]
            if not 0 <= p < n:
                raise TreeFormatError(f"node {v} has parent {p} out of range")
            if label[v] < 0:
                raise TreeFormatError(f"node {v} has no edge label")
            kids[p].append(v)
        order = _bfs_order(kids)
        if len(order) != n:
            raise TreeFormatError("parent links contain a cycle")

        self.n = n
        self.root = 0
        self.parent = parent
        self.label = label
        self.sigma = sigma if sigma is not None else (max(label) + 1 if n > 1 else 0)
        self.order = order

        depth = [0] * n
        for v in order[1:]:
            depth[v] = depth[parent[v]] + 1
        self.depth = depth
        self.children: list[list[tuple[int, int]]] = [
            sorted((label[c], c) for c in ks) for ks in kids
        ]
        self._compute_preorder()

    def _compute_preorder(self) -> None:
        n = self.n
        tin = [0] * n
        tout = [0] * n
        preorder = []
        stack = [0]
        children = self.children
        while stack:
            v = stack.pop()
            tin[v] = len(preorder)
            preorder.append(v)
            ch = children[v]
            for i in range(len(ch) - 1, -1, -1):
                stack.append(ch[i][1])
        size = [1] * n
        parent = self.parent
        for v in reversed(self.order):
            if v:
                size[parent[v]] += size[v]
        for v in range(n):
            tout[v] = tin[v] + size[v] - 1
        self.euler_in = tin
        self.euler_out = tout
        self.preorder = preorder
        self.subtree_size = size

    # -- derived data -------------------------------------------------

    @cached_property
    def height(self) -> list[int]:
        """Height of every subtree ``T(v)`` in edges."""
        h = [0] * self.n
        parent = self.parent
        for v in reversed(self.order):
            if v and h[v] + 1 > h[parent[v]]:
                h[parent[v]] = h[v] + 1
        return h

    @cached_property
    def max_depth(self) -> int:
        return max(self.depth)

    @cached_property
    def parent_array(self) -> np.ndarray:
        a = np.array(self.parent, dtype=np.int64)
        a[0] = 0
        return a

    @cached_property
    def depth_array(self) -> np.ndarray:
        return np.array(self.depth, dtype=np.int64)

    @cached_property
    def label_array(self) -> np.ndarray:
        return np.array(self.label, dtype=np.int64)

    @property
    def is_normalized(self) -> bool:
        for ch in self.children:
            for i in range(1, len(ch)):
                if ch[i][0] == ch[i - 1][0]:
                    return False
        return True

    # -- queries ------------------------------------------------------

    def check_node(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise QueryError(f"unknown node id {v}")

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff ``u`` lies on the root path of ``v`` (``u == v`` included)."""
        self.check_node(u)
        self.check_node(v)
        return self.euler_in[u] <= self.euler_in[v] <= self.euler_out[u]

    def path(self, top: int, bottom: int) -> PathRef:
        if not self.is_ancestor(top, bottom):
            raise QueryError(f"node {top} is not an ancestor of {bottom}")
        return PathRef(top, bottom, self.depth[bottom] - self.depth[top])

    def __repr__(self) -> str:
        return f"LabeledTree(n={self.n}, sigma={self.sigma})"


def _bfs_order(kids: list[list[int]]) -> list[int]:
    order = [0]
    i = 0
    while i < len(order):
        order.extend(kids[order[i]])
        i += 1
    return order


def is_ancestor(tree: LabeledTree, u: int, v: int) -> bool:
    return tree.is_ancestor(u, v)


def path_string(tree: LabeledTree, top: int, bottom: int) -> list[int]:
    """Symbols of ``top ~> bottom`` read top-down."""
    length = tree.path(top, bottom).length
    out = [0] * length
    v = bottom
    for i in range(length - 1, -1, -1):
        out[i] = tree.label[v]
        v = tree.parent[v]
    return out


# -- normalization ----------------------------------------------------


def _merge_groups(kids: list[list[int]], label: Sequence[int]):
    """Top-down merge of equal-label sibling edges, to a fixed point.

    Returns the groups of old ids forming each new node (in BFS order), the
    parent group index and the label of every group.
    """
    groups: list[list[int]] = [[0]]
    gparent = [-1]
    glabel = [-1]
    i = 0
    while i < len(groups):
        members = groups[i]
        if len(members) == 1:
            ch = kids[members[0]]
        else:
            ch = [c for m in members for c in kids[m]]
        if ch:
            bylab: dict[int, list[int]] = {}
            for c in ch:
                bylab.setdefault(label[c], []).append(c)
            for sym, cs in bylab.items():
                groups.append(cs)
                gparent.append(i)
                glabel.append(sym)
        i += 1
    return groups, gparent, glabel


def _needs_merge(parent: Sequence[int], label: Sequence[int], sigma: int) -> bool:
    n = len(parent)
    if n <= 2:
        return False
    p = np.asarray(parent[1:], dtype=np.int64)
    s = np.asarray(label[1:], dtype=np.int64)
    keys = p * max(sigma, 1) + s
    return np.unique(keys).size != n - 1


def _normalize_arrays(parent: Sequence[int], label: Sequence[int], sigma: int):
    n = len(parent)
    if not _needs_merge(parent, label, sigma):
        return list(parent), list(label), list(range(n))
    kids: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        kids[parent[v]].append(v)
    groups, gparent, glabel = _merge_groups(kids, label)
    g = len(groups)
    # dense new ids ordered by the smallest old id of each group
    order = sorted(range(g), key=lambda i: min(groups[i]))
    newid = [0] * g
    for rank, gi in enumerate(order):
        newid[gi] = rank
    remap = [0] * n
    new_parent = [-1] * g
    new_label = [-1] * g
    for gi, members in enumerate(groups):
        ni = newid[gi]
        for m in members:
            remap[m] = ni
        if gi:
            new_parent[ni] = newid[gparent[gi]]
            new_label[ni] = glabel[gi]
    return new_parent, new_label, remap


def normalize(tree: LabeledTree) -> tuple[LabeledTree, list[int]]:
    """Merge equal-label sibling edges recursively.

    Returns the normalized tree and ``remap`` sending old ids to new ids. Ids
    are unchanged when nothing merges.
    """
    parent, label, remap = _normalize_arrays(tree.parent, tree.label, tree.sigma)
    if len(parent) == tree.n and tree.is_normalized:
        return tree, remap
    return LabeledTree(parent, label, sigma=tree.sigma), remap


# -- text formats -----------------------------------------------------


def parse_tree(text: str) -> tuple[LabeledTree, SymbolTable, list[int]]:
    """Parse the tree file format into a normalized tree.

    Line 1 holds ``n``; each further line is ``parent child label``. Returns
    ``(tree, symbols, remap)``; ``remap`` is the identity when no sibling
    edges were merged.
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise TreeFormatError("empty tree file", line=1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise TreeFormatError(f"expected node count, got {lines[0]!r}", line=1) from None
    if not 1 <= n <= MAX_NODES:
        raise TreeFormatError(f"node count {n} out of range", line=1)
    parent = [-1] * n
    tokens: list[str | None] = [None] * n
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != 3:
            raise TreeFormatError(f"expected 'parent child label', got {line!r}", line=lineno)
        try:
            p, c = int(fields[0]), int(fields[1])
        except ValueError:
            raise TreeFormatError(f"non-integer node id in {line!r}", line=lineno) from None
        for x in (p, c):
            if not 0 <= x < n:
                raise TreeFormatError(f"node id {x} out of range 0..{n - 1}", line=lineno)
        if c == 0:
            raise TreeFormatError("the root 0 cannot have a parent", line=lineno)
        if p == c:
            raise TreeFormatError(f"self loop at node {c}", line=lineno)
        if parent[c] != -1:
            raise TreeFormatError(f"node {c} has multiple parents", line=lineno)
        parent[c] = p
        tokens[c] = fields[2]
    for v in range(1, n):
        if parent[v] == -1:
            raise TreeFormatError(f"node {v} is disconnected (no parent)")
    kids: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        kids[parent[v]].append(v)
    if len(_bfs_order(kids)) != n:
        raise TreeFormatError("parent links contain a cycle")

    symbols = SymbolTable(t for t in tokens[1:])
    label = [-1] + [symbols.symbol(t) for t in tokens[1:]]
    parent, label, remap = _normalize_arrays(parent, label, len(symbols))
    return LabeledTree(parent, label, sigma=len(symbols)), symbols, remap


def serialize_tree(tree: LabeledTree, symbols: SymbolTable) -> str:
    out = [str(tree.n)]
    for v in range(1, tree.n):
        out.append(f"{tree.parent[v]} {v} {symbols.token(tree.label[v])}")
    return "\n".join(out) + "\n"


def read_strings(text: str, sep: str | None = None) -> list[list[str]]:
    """Split a strings file into token sequences (characters unless ``sep`` is given)."""
    out = []
    for line in text.splitlines():
        if sep is None:
            out.append(list(line))
        else:
            out.append([t for t in line.split(sep) if t])
    return out


def build_trie(strings: Sequence[Sequence[str]]) -> tuple[LabeledTree, SymbolTable, list[int]]:
    """Trie of token sequences with shared prefixes merged maximally.

    Returns ``(tree, symbols, leaf_map)`` where ``leaf_map[i]`` is the node
    ending the path of ``strings[i]``.
    """
    if not any(len(s) for s in strings):
        raise TreeFormatError("trie needs at least one nonempty string")
    nodes: list[dict[str, int]] = [{}]
    parent = [-1]
    tok = [""]
    leaf_map = []
    for s in strings:
        v = 0
        for t in s:
            nxt = nodes[v].get(t)
            if nxt is None:
                nxt = len(nodes)
                nodes[v][t] = nxt
                nodes.append({})
                parent.append(v)
                tok.append(t)
            v = nxt
        leaf_map.append(v)
    symbols = SymbolTable(tok[1:])
    label = [-1] + [symbols.symbol(t) for t in tok[1:]]
    return LabeledTree(parent, label, sigma=len(symbols)), symbols, leaf_map
