"""Longest common extension queries on edge-labeled rooted trees."""
from .diffcover import DiffCover, build_cover, find_d
from .errors import QueryError, TreeFormatError
from .lce_pp import PpConfig, PpIndex, build_lce_pp, query_pp
from .lce_pt import PtConfig, PtIndex, build_lce_pt, query_pt
from .lce_tt import ClusterPartition, SetFamilyIndex, TtIndex, build_clusters, build_lce_tt, disjoint, family_to_tree, query_tt
from .naming import NamingIndex, build_naming
from .oracle import GenSpec, gen_random_tree, oracle_pp, oracle_pt, oracle_tt
from .primitives import PredIndex, PrimitivesIndex, RmqIndex, build_primitives
from .results import LcePtResult, LceResult, LceTtResult
from .stats import QueryStats
from .tree import LabeledTree, SymbolTable, build_trie, normalize, parse_tree, serialize_tree

__version__ = "0.1.0"

__all__ = [
    "ClusterPartition", "DiffCover", "GenSpec", "LabeledTree", "LcePtResult", "LceResult",
    "LceTtResult", "NamingIndex", "PpConfig", "PpIndex", "PredIndex", "PrimitivesIndex",
    "PtConfig", "PtIndex", "QueryError", "QueryStats", "RmqIndex", "SetFamilyIndex",
    "SymbolTable", "TreeFormatError", "TtIndex", "build_clusters", "build_cover", "build_lce_pp",
    "build_lce_pt", "build_lce_tt", "build_naming", "build_primitives", "build_trie", "disjoint",
    "family_to_tree", "find_d", "gen_random_tree", "normalize", "oracle_pp", "oracle_pt",
    "oracle_tt", "parse_tree", "query_pp", "query_pt", "query_tt", "serialize_tree",
]
