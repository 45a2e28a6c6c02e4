import pytest
from hypothesis import given, settings

from strategies import trees
from treelce.errors import QueryError
from treelce.oracle import GenSpec, default_symbols, gen_random_tree, oracle_pp, oracle_pt, oracle_tt
from treelce.results import LcePtResult, LceResult, LceTtResult
from treelce.tree import serialize_tree


def test_tree_a(tree_a):
    assert oracle_pp(tree_a, 1, 7, 2, 8) == LceResult(2, 5, 6)
    assert oracle_pp(tree_a, 1, 7, 1, 7).length == 3
    assert oracle_pp(tree_a, 0, 7, 0, 8).length == 0
    assert oracle_pt(tree_a, 1, 7, 2) == LcePtResult(2, 5, 6)
    assert oracle_pt(tree_a, 3, 7, 3).length == 2
    assert oracle_pt(tree_a, 2, 4, 7) == LcePtResult(0, 2, 7)
    assert oracle_tt(tree_a, 1, 2) == LceTtResult(2, 5, 6)
    assert oracle_tt(tree_a, 7, 9).length == 0
    assert oracle_tt(tree_a, 4, 4).length == 2
    with pytest.raises(QueryError):
        oracle_pp(tree_a, 1, 8, 2, 8)


def test_generators():
    path = gen_random_tree(GenSpec(5, 1, "path"))
    assert serialize_tree(path, default_symbols(1)) == "5\n0 1 a\n1 2 a\n2 3 a\n3 4 a\n"
    star = gen_random_tree(GenSpec(5, 4, "star", seed=3))
    assert star.depth == [0, 1, 1, 1, 1]
    assert sorted(s for s, _ in star.children[0]) == [0, 1, 2, 3]
    a = gen_random_tree(GenSpec(300, 3, "random", seed=9))
    b = gen_random_tree(GenSpec(300, 3, "random", seed=9))
    assert a.parent == b.parent and a.label == b.label
    binary = gen_random_tree(GenSpec(500, 2, "binary", seed=1))
    assert binary.n == 500 and max(len(c) for c in binary.children) <= 2
    cat = gen_random_tree(GenSpec(500, 4, "caterpillar", seed=1))
    assert cat.max_depth >= 249
    for bad in [dict(n=0), dict(n=5, sigma=0), dict(n=5, shape="ring")]:
        with pytest.raises(ValueError):
            GenSpec(**bad)


def _leaves(tree, v):
    out, stack = [], [v]
    while stack:
        u = stack.pop()
        if not tree.children[u]:
            out.append(u)
        stack.extend(c for _, c in tree.children[u])
    return out


@settings(max_examples=40, deadline=None)
@given(trees(max_n=60, max_sigma=3))
def test_cross_consistency(tree):
    leaves = {v: _leaves(tree, v) for v in range(tree.n)}
    for v1 in range(tree.n):
        for v2 in range(tree.n):
            tt = oracle_tt(tree, v1, v2).length
            assert tt == max(oracle_pp(tree, v1, a, v2, b).length for a in leaves[v1] for b in leaves[v2])
        for w1 in leaves[v1]:
            for v2 in range(0, tree.n, 3):
                pt = oracle_pt(tree, v1, w1, v2).length
                assert pt == max(oracle_pp(tree, v1, w1, v2, u).length for u in leaves[v2])
