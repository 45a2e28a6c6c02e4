"""Difference covers for trees.

Nodes are marked by depth alone: type I when ``depth % x == r1`` and type II
when ``(depth // x) % x == r2``. Both residues are chosen as the smallest
least-populated class, so at most ``2n/x`` nodes are marked, and any two
nodes at depth >= x*x have marked ancestors at a common distance ``d < x*x``.
"""
from __future__ import annotations

import numpy as np

from .errors import QueryError


class DiffCover:
    def __init__(self, depths, x: int):
        if x < 2:
            raise ValueError(f"cover parameter must be >= 2, got {x}")
        depths = np.asarray(depths, dtype=np.int64)
        self.x = x
        self.n = depths.size
        self.type1_counts = np.bincount(depths % x, minlength=x)
        self.type2_counts = np.bincount((depths // x) % x, minlength=x)
        self.r1 = int(np.argmin(self.type1_counts))
        self.r2 = int(np.argmin(self.type2_counts))
        self._depth = depths.tolist() if depths.size < 1 << 22 else memoryview(depths)
        self.marked = ((depths % x) == self.r1) | (((depths // x) % x) == self.r2)

    @property
    def size(self) -> int:
        return int(self.marked.sum())

    @property
    def marked_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.marked)

    def marked_depth(self, d: int) -> bool:
        x = self.x
        return d % x == self.r1 or (d // x) % x == self.r2

    def is_marked(self, v: int) -> bool:
        return self.marked_depth(self._depth[v])

    def find_d(self, u: int, v: int) -> int:
        """Distance ``d < x*x`` putting u's ancestor in type I and v's in type II."""
        x = self.x
        du = self._depth[u]
        dv = self._depth[v]
        if du < x * x or dv < x * x:
            raise QueryError(f"find_d needs depths >= {x * x}, got {du} and {dv}")
        return align_offset(du, dv, x, self.r1, self.r2)


def align_offset(du: int, dv: int, x: int, r1: int, r2: int) -> int:
    """Smallest-form ``d < x*x`` with ``du - d`` of type I and ``dv - d`` of type II."""
    d1 = (du - r1) % x
    d2 = ((dv - d1) // x - r2) % x
    return d1 + d2 * x


def build_cover(tree, x: int) -> DiffCover:
    """Cover over the node depths of ``tree`` (a LabeledTree or a depth array)."""
    depths = getattr(tree, "depth_array", tree)
    return DiffCover(depths, x)


def is_marked(cover: DiffCover, v: int) -> bool:
    return cover.is_marked(v)


def find_d(cover: DiffCover, u: int, v: int) -> int:
    return cover.find_d(u, v)
