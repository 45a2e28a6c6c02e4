import pytest

from treelce.lce_tt import family_to_tree
from treelce.tree import parse_tree

TREE_A_TEXT = "10\n0 1 a\n0 2 b\n1 3 a\n3 5 b\n5 7 c\n2 4 a\n4 6 b\n6 8 d\n4 9 c\n"

# S1..S4 of the small set-intersection example
FOUR_SETS = [[1, 2], [1, 4], [2, 3, 4], [3]]


@pytest.fixture
def tree_a_parsed():
    return parse_tree(TREE_A_TEXT)


@pytest.fixture
def tree_a(tree_a_parsed):
    return tree_a_parsed[0]


@pytest.fixture
def symbols_a(tree_a_parsed):
    return tree_a_parsed[1]


@pytest.fixture
def tree_b():
    return family_to_tree(FOUR_SETS)
