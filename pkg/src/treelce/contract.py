"""Contraction of a tree onto the marked nodes of a difference cover."""
from __future__ import annotations

import math

import numpy as np

from .diffcover import DiffCover
from .naming import NamingIndex
from .primitives import index_dtype
from .tree import LabeledTree


def log_star(n: int) -> int:
    k = 0
    x = float(n)
    while x > 1.0:
        x = math.log2(x)
        k += 1
    return k


class ContractedTree:
    """Tree ``T'`` on the marked nodes of a cover with parameter ``x``.

    The parent of a marked node is its ``x*x``-th ancestor (marked again by
    periodicity); marked nodes shallower than ``x*x`` hang off an artificial
    root 0. Edge labels are the names of the ``x*x`` original edges they
    replace, so equal labels mean equal blocks. Root edges get fresh symbols
    and never take part in a query.
    """

    def __init__(self, tree: LabeledTree, naming: NamingIndex, x: int):
        self.x = x
        self.block = block = x * x
        depth = tree.depth_array
        self.cover = cover = DiffCover(depth, x)
        marked = cover.marked_nodes
        m = marked.size
        to_c = np.full(tree.n, -1, dtype=index_dtype(tree.n + 1))
        to_c[marked] = np.arange(1, m + 1)

        parent = np.zeros(m + 1, dtype=np.int64)
        parent[0] = -1
        label = np.full(m + 1, -1, dtype=np.int64)
        deep = depth[marked] >= block
        names, count = naming.dense_names(block)
        if deep.any():
            anc = naming.prims.la_batch(marked[deep], block)
            parent[1:][deep] = to_c[anc]
            label[1:][deep] = names[marked[deep]]
        shallow = ~deep
        label[1:][shallow] = count + np.arange(int(shallow.sum()))
        self.tree = LabeledTree(parent.tolist(), label.tolist(), sigma=count + int(shallow.sum()))
        self.to_original = [-1] + marked.tolist()
        self.to_contracted = memoryview(to_c)

    @property
    def size(self) -> int:
        return self.tree.n
