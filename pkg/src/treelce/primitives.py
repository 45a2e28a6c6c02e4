"""Query primitives: level ancestor, NCA, range minimum, predecessor, child lookup.

Tables are built with numpy and read through memoryviews on the query path,
which keeps scalar lookups cheap without copying large arrays into lists.
"""
from __future__ import annotations

import bisect
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import QueryError
from .tree import LabeledTree


def index_dtype(n: int):
    return np.int32 if n < 2**31 - 1 else np.int64


class RmqIndex:
    """Range minimum over a static integer array.

    Blocks of ``BLOCK`` entries carry in-block prefix/suffix minima and a
    sparse table over block minima. ``min`` is O(1) apart from a short slice
    scan when both ends fall in one block. Ties report the leftmost position.
    """

    BLOCK = 32
    _SHIFT = 5

    def __init__(self, values):
        vals = np.asarray(values)
        small = vals.size == 0 or (int(vals.min()) > -(2**31) and int(vals.max()) < 2**31 - 1)
        dt = np.int32 if small else np.int64
        vals = np.ascontiguousarray(vals, dtype=dt)
        self.size = n = vals.size
        self.values = vals
        self._v = memoryview(vals)
        if n == 0:
            self._pre = self._suf = self._v
            self._sp: list[memoryview] = []
            self._spi: list[memoryview] = []
            return
        bs = self.BLOCK
        nb = (n + bs - 1) // bs
        padded = np.full(nb * bs, np.iinfo(dt).max, dtype=dt)
        padded[:n] = vals
        blocks = padded.reshape(nb, bs)
        pre = np.minimum.accumulate(blocks, axis=1).reshape(-1)[:n]
        suf = np.minimum.accumulate(blocks[:, ::-1], axis=1)[:, ::-1].reshape(-1)[:n]
        self._pre_np = np.ascontiguousarray(pre)
        self._suf_np = np.ascontiguousarray(suf)
        self._pre = memoryview(self._pre_np)
        self._suf = memoryview(self._suf_np)

        bmin = blocks.min(axis=1)
        barg = np.arange(nb, dtype=index_dtype(nb))
        sp_np = [bmin]
        spi_np = [barg]
        span = 1
        while 2 * span <= nb:
            prev, previ = sp_np[-1], spi_np[-1]
            left, right = prev[: nb - 2 * span + 1], prev[span : nb - span + 1]
            take_left = left <= right
            sp_np.append(np.where(take_left, left, right))
            spi_np.append(np.where(take_left, previ[: nb - 2 * span + 1], previ[span : nb - span + 1]))
            span *= 2
        self._sp_np = sp_np
        self._spi_np = spi_np
        self._sp = [memoryview(a) for a in sp_np]
        self._spi = [memoryview(a) for a in spi_np]

    def min(self, i: int, j: int) -> int:
        """Minimum value of ``values[i..j]`` (inclusive)."""
        bi = i >> 5
        bj = j >> 5
        if bi == bj:
            return min(self._v[i : j + 1])
        m = self._suf[i]
        r = self._pre[j]
        if r < m:
            m = r
        if bj - bi > 1:
            lo = bi + 1
            k = (bj - lo).bit_length() - 1
            row = self._sp[k]
            r = row[lo]
            if r < m:
                m = r
            r = row[bj - (1 << k)]
            if r < m:
                m = r
        return m

    def argmin(self, i: int, j: int) -> int:
        """Leftmost position of the minimum of ``values[i..j]``."""
        if not 0 <= i <= j < self.size:
            raise QueryError(f"bad range [{i}, {j}] for array of size {self.size}")
        m = self.min(i, j)
        bi = i >> 5
        bj = j >> 5
        v = self._v
        end = min(j, (bi << 5) + self.BLOCK - 1)
        if self._suf[i] == m or bi == bj:
            for p in range(i, end + 1):
                if v[p] == m:
                    return p
        if bj - bi > 1:
            lo = bi + 1
            k = (bj - lo).bit_length() - 1
            a, b = self._sp[k][lo], self._sp[k][bj - (1 << k)]
            blk = self._spi[k][lo] if a <= b else self._spi[k][bj - (1 << k)]
            if min(a, b) == m:
                start = blk << 5
                for p in range(start, start + self.BLOCK):
                    if v[p] == m:
                        return p
        for p in range(bj << 5, j + 1):
            if v[p] == m:
                return p
        raise AssertionError("unreachable")

    def min_batch(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Vectorised ``min`` over inclusive ranges ``[lo[t], hi[t]]``."""
        lo = np.asarray(lo, dtype=np.int64)
        hi = np.asarray(hi, dtype=np.int64)
        out = np.empty(lo.size, dtype=np.int64)
        if lo.size == 0:
            return out
        bi = lo >> self._SHIFT
        bj = hi >> self._SHIFT
        same = bi == bj
        if same.any():
            slo, shi = lo[same], hi[same]
            acc = self.values[slo].copy()
            for t in range(1, self.BLOCK):
                idx = slo + t
                ok = idx <= shi
                if not ok.any():
                    break
                np.minimum(acc, np.where(ok, self.values[np.minimum(idx, shi)], acc), out=acc)
            out[same] = acc
        diff = ~same
        if diff.any():
            dlo, dhi, dbi, dbj = lo[diff], hi[diff], bi[diff], bj[diff]
            acc = np.minimum(self._suf_np[dlo], self._pre_np[dhi])
            mid = dbj - dbi > 1
            if mid.any():
                mlo = dbi[mid] + 1
                mhi = dbj[mid] - 1
                width = mhi - mlo + 1
                k = np.floor(np.log2(width)).astype(np.int64)
                # guard float rounding at powers of two
                k -= (1 << k) > width
                k += (1 << (k + 1)) <= width
                res = acc[mid]
                for kk in np.unique(k):
                    sel = k == kk
                    row = self._sp_np[kk]
                    res[sel] = np.minimum(
                        res[sel], np.minimum(row[mlo[sel]], row[mhi[sel] - (1 << kk) + 1])
                    )
                acc[mid] = res
            out[diff] = acc
        return out


class _VebNode:
    """Sparse van Emde Boas node over a universe of ``2**bits`` keys."""

    __slots__ = ("bits", "lo_bits", "min", "max", "clusters", "summary")

    def __init__(self, bits: int):
        self.bits = bits
        self.lo_bits = bits // 2
        self.min = None
        self.max = None
        self.clusters: dict[int, _VebNode] = {}
        self.summary: _VebNode | None = None

    def insert(self, x: int) -> None:
        if self.min is None:
            self.min = self.max = x
            return
        if x == self.min or x == self.max:
            return
        if x < self.min:
            x, self.min = self.min, x
        if x > self.max:
            self.max = x
        if self.bits <= 1:
            return
        hi, lo = x >> self.lo_bits, x & ((1 << self.lo_bits) - 1)
        c = self.clusters.get(hi)
        if c is None:
            c = self.clusters[hi] = _VebNode(self.lo_bits)
            if self.summary is None:
                self.summary = _VebNode(self.bits - self.lo_bits)
            self.summary.insert(hi)
        c.insert(lo)

    def predecessor(self, x: int):
        """Largest key <= x, or None."""
        if self.min is None or x < self.min:
            return None
        if x >= self.max:
            return self.max
        if self.bits <= 1:
            return self.min
        hi, lo = x >> self.lo_bits, x & ((1 << self.lo_bits) - 1)
        c = self.clusters.get(hi)
        if c is not None and c.min <= lo:
            return (hi << self.lo_bits) | c.predecessor(lo)
        ph = self.summary.predecessor(hi - 1) if (self.summary is not None and hi > 0) else None
        if ph is None:
            return self.min
        return (ph << self.lo_bits) | self.clusters[ph].max


class PredIndex:
    """Predecessor/successor over a static integer key set.

    The default layout is a sorted array searched with :mod:`bisect`;
    ``structure="veb"`` answers predecessor queries with a van Emde Boas tree
    in O(log log U) and gives identical answers.
    """

    def __init__(self, keys: Iterable[int], structure: str = "sorted"):
        ks = sorted(set(int(k) for k in keys))
        if ks and ks[0] < 0:
            raise ValueError("keys must be non-negative")
        self.keys = ks
        self.structure = structure
        self._veb = None
        if structure == "veb":
            bits = max(1, (ks[-1].bit_length() if ks else 1))
            self._veb = _VebNode(bits)
            for k in ks:
                self._veb.insert(k)
        elif structure != "sorted":
            raise ValueError(f"unknown predecessor structure {structure!r}")

    def __len__(self) -> int:
        return len(self.keys)

    def predecessor(self, x: int):
        """Largest key <= x, or None."""
        if self._veb is not None:
            if not self.keys or x < 0:
                return None
            if x > self.keys[-1]:
                return self.keys[-1]
            return self._veb.predecessor(x)
        i = bisect.bisect_right(self.keys, x)
        return self.keys[i - 1] if i else None

    def successor(self, x: int):
        """Smallest key >= x, or None."""
        i = bisect.bisect_left(self.keys, x)
        return self.keys[i] if i < len(self.keys) else None


class PrimitivesIndex:
    """Level ancestor (binary lifting), NCA (Euler tour + RMQ) and child lookup."""

    def __init__(self, tree: LabeledTree):
        self.tree = tree
        n = tree.n
        self.depth = tree.depth
        dt = index_dtype(n)
        levels = tree.max_depth.bit_length()
        table = np.empty((levels, n), dtype=dt)
        if levels:
            table[0] = tree.parent_array
            for k in range(1, levels):
                table[k] = table[k - 1][table[k - 1]]
        self.up_table = table
        self._up = [memoryview(row) for row in table]

    @property
    def levels(self) -> int:
        return len(self._up)

    def la(self, v: int, d: int) -> int:
        """Ancestor of ``v`` at depth ``d``; no range checks."""
        delta = self.depth[v] - d
        up = self._up
        while delta:
            low = delta & -delta
            v = up[low.bit_length() - 1][v]
            delta ^= low
        return v

    def level_ancestor(self, v: int, d: int) -> int:
        self.tree.check_node(v)
        if not 0 <= d <= self.depth[v]:
            raise QueryError(f"depth {d} out of range for node {v} at depth {self.depth[v]}")
        return self.la(v, d)

    def la_batch(self, nodes: np.ndarray, dist) -> np.ndarray:
        """Ancestors at distance ``dist`` (scalar or array) above each of ``nodes``."""
        out = np.array(nodes, dtype=np.int64, copy=True)
        dist = np.broadcast_to(np.asarray(dist, dtype=np.int64), out.shape)
        for k in range(self.levels):
            sel = (dist >> k) & 1
            if sel.any():
                m = sel.astype(bool)
                out[m] = self.up_table[k][out[m]]
        return out

    # -- nearest common ancestor --------------------------------------

    @cached_property
    def _euler(self):
        tree = self.tree
        tour: list[int] = []
        first = [0] * tree.n
        stack = [(0, 0)]
        children = tree.children
        while stack:
            v, i = stack.pop()
            if i == 0:
                first[v] = len(tour)
            tour.append(v)
            if i < len(children[v]):
                stack.append((v, i + 1))
                stack.append((children[v][i][1], 0))
        depths = np.array(tree.depth, dtype=np.int64)[np.array(tour, dtype=np.int64)]
        return tour, first, RmqIndex(depths)

    def nca(self, u: int, v: int) -> int:
        self.tree.check_node(u)
        self.tree.check_node(v)
        tour, first, rmq = self._euler
        a, b = first[u], first[v]
        if a > b:
            a, b = b, a
        return tour[rmq.argmin(a, b)]

    # -- child lookup -------------------------------------------------

    @cached_property
    def _child(self) -> dict[int, int]:
        sigma = max(self.tree.sigma, 1)
        tree = self.tree
        return {tree.parent[v] * sigma + tree.label[v]: v for v in range(1, tree.n)}

    def child_by_label(self, v: int, symbol: int):
        """The child of ``v`` along ``symbol``, or None."""
        if not 0 <= symbol < self.tree.sigma:
            return None
        return self._child.get(v * self.tree.sigma + symbol)


def build_primitives(tree: LabeledTree) -> PrimitivesIndex:
    return PrimitivesIndex(tree)


def rmq_min(rmq: RmqIndex, i: int, j: int) -> int:
    return rmq.argmin(i, j)


def predecessor(pred: PredIndex, x: int):
    return pred.predecessor(x)


def naive_argmin(values: Sequence[int], i: int, j: int) -> int:
    best = i
    for p in range(i + 1, j + 1):
        if values[p] < values[best]:
            best = p
    return best
