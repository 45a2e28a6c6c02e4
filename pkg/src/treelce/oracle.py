"""Brute-force reference answers and random instance generators.

The oracles walk the tree directly through ``parent``/``children`` and share
no code with the indexes they check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import QueryError
from .results import LceResult, LcePtResult, LceTtResult
from .tree import LabeledTree, SymbolTable, normalize

SHAPES = ("random", "path", "caterpillar", "binary", "star")


def _down_path(tree: LabeledTree, top: int, bottom: int) -> list[int]:
    """Nodes of ``top ~> bottom`` from top to bottom, by walking parents."""
    nodes = [bottom]
    v = bottom
    while v != top:
        v = tree.parent[v]
        if v == -1:
            raise QueryError(f"node {bottom} is not in the subtree of {top}")
        nodes.append(v)
    nodes.reverse()
    return nodes


def _child(tree: LabeledTree, v: int, symbol: int):
    for s, c in tree.children[v]:
        if s == symbol:
            return c
    return None


def oracle_pp(tree: LabeledTree, v1: int, w1: int, v2: int, w2: int) -> LceResult:
    p1 = _down_path(tree, v1, w1)
    p2 = _down_path(tree, v2, w2)
    m = 0
    while m + 1 < len(p1) and m + 1 < len(p2) and tree.label[p1[m + 1]] == tree.label[p2[m + 1]]:
        m += 1
    return LceResult(m, p1[m], p2[m])


def oracle_pt(tree: LabeledTree, v1: int, w1: int, v2: int) -> LcePtResult:
    p1 = _down_path(tree, v1, w1)
    cur = v2
    m = 0
    while m + 1 < len(p1):
        nxt = _child(tree, cur, tree.label[p1[m + 1]])
        if nxt is None:
            break
        cur = nxt
        m += 1
    return LcePtResult(m, p1[m], cur)


def oracle_tt(tree: LabeledTree, v1: int, v2: int) -> LceTtResult:
    """Longest common downward string from v1 and v2.

    Among longest answers the pair with the smallest preorder numbers
    (compared as a pair) is returned.
    """
    pre = tree.euler_in
    best = (0, pre[v1], pre[v2], v1, v2)
    stack = [(v1, v2, 0)]
    while stack:
        a, b, dist = stack.pop()
        cand = (dist, pre[a], pre[b])
        if cand[0] > best[0] or (cand[0] == best[0] and cand[1:] < best[1:3]):
            best = (dist, pre[a], pre[b], a, b)
        for s, c in tree.children[a]:
            d = _child(tree, b, s)
            if d is not None:
                stack.append((c, d, dist + 1))
    return LceTtResult(best[0], best[3], best[4])


def string_lce(s: str, t: str) -> int:
    m = 0
    for a, b in zip(s, t):
        if a != b:
            break
        m += 1
    return m


# -- generators -------------------------------------------------------


@dataclass(frozen=True)
class GenSpec:
    n: int
    sigma: int = 2
    shape: str = "random"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sigma < 1:
            raise ValueError("sigma must be >= 1")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}; expected one of {SHAPES}")


def symbol_tokens(sigma: int) -> list[str]:
    if sigma <= 26:
        return [chr(ord("a") + i) for i in range(sigma)]
    width = len(str(sigma - 1))
    return [f"s{i:0{width}d}" for i in range(sigma)]


def default_symbols(sigma: int) -> SymbolTable:
    return SymbolTable(symbol_tokens(sigma))


def _sibling_labels(parent: np.ndarray, sigma: int, rng: np.random.Generator) -> np.ndarray:
    """Labels that are distinct among siblings whenever the alphabet allows it."""
    n = parent.size
    label = np.full(n, -1, dtype=np.int64)
    if n == 1:
        return label
    order = np.argsort(parent[1:], kind="stable") + 1
    par = parent[order]
    cuts = np.flatnonzero(np.diff(par)) + 1
    for group in np.split(order, cuts):
        k = group.size
        if k <= sigma:
            label[group] = rng.choice(sigma, size=k, replace=False)
        else:
            label[group] = rng.integers(0, sigma, size=k)
    return label


def gen_random_tree(spec: GenSpec) -> LabeledTree:
    """Deterministic random tree of the requested shape, normalized.

    Sibling labels are drawn without repetition when ``sigma`` allows, so
    only the ``random`` shape (and alphabets too small for the branching)
    shrink under normalization.
    """
    n, sigma = spec.n, spec.sigma
    rng = np.random.default_rng(spec.seed)
    parent = np.full(n, -1, dtype=np.int64)
    if spec.shape == "random":
        if n > 1:
            parent[1:] = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
        label = np.full(n, -1, dtype=np.int64)
        label[1:] = rng.integers(0, sigma, size=n - 1)
    else:
        if spec.shape == "path":
            parent[1:] = np.arange(n - 1)
        elif spec.shape == "star":
            parent[1:] = 0
        elif spec.shape == "caterpillar":
            spine = max(1, (n + 1) // 2)
            parent[1:spine] = np.arange(spine - 1)
            parent[spine:] = rng.integers(0, spine, size=n - spine)
        elif spec.shape == "binary":
            free = [0]
            nkids = [0] * n
            for v in range(1, n):
                i = int(rng.integers(0, len(free)))
                p = free[i]
                parent[v] = p
                nkids[p] += 1
                if nkids[p] == 2:
                    free[i] = free[-1]
                    free.pop()
                free.append(v)
        label = _sibling_labels(parent, sigma, rng)
    tree = LabeledTree(parent.tolist(), label.tolist(), sigma=sigma)
    return normalize(tree)[0]


def random_pp_query(tree: LabeledTree, rng: np.random.Generator) -> tuple[int, int, int, int]:
    """Random (v1, w1, v2, w2) with w_i a descendant of v_i."""
    w1, w2 = (int(x) for x in rng.integers(0, tree.n, size=2))
    return (_random_ancestor(tree, w1, rng), w1, _random_ancestor(tree, w2, rng), w2)


def _random_ancestor(tree: LabeledTree, w: int, rng: np.random.Generator) -> int:
    up = int(rng.integers(0, tree.depth[w] + 1))
    v = w
    for _ in range(up):
        v = tree.parent[v]
    return v
