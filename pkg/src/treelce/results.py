"""Result records returned by the LCE queries.

All results are reported compactly by endpoints: the matched strings can be
recovered by walking from an endpoint up ``length`` edges.
"""
from typing import NamedTuple


class LceResult(NamedTuple):
    """Path-path answer; ``end1``/``end2`` are the last matched nodes."""

    length: int
    end1: int
    end2: int


class LcePtResult(NamedTuple):
    """Path-tree answer: ``path_end`` lies on the query path, ``tree_end`` below the subtree root."""

    length: int
    path_end: int
    tree_end: int


class LceTtResult(NamedTuple):
    """Tree-tree answer; endpoints lie in ``T(v1)`` and ``T(v2)`` respectively."""

    length: int
    end1: int
    end2: int
