import pytest
from hypothesis import given, strategies as st

from galestewart.caps import CapExceeded
from galestewart.trees import (InvalidTree, Tree, count_trees, cylinder_contains, enumerate_trees, full_tree,
                               is_pruned_to_horizon, level_restrict, parse_node, format_node, sub_at,
                               tree_from_nodes)

from strategies_h import trees


def T(*nodes, a=2, d=2):
    return tree_from_nodes(a, d, nodes)


def test_sub_at_examples():
    t = T((), (0,), (1,), (0, 0))
    assert sub_at(t, (0,)).nodes == {(), (0,)}
    assert sub_at(t, ()) == t
    assert sub_at(full_tree(2, 3), (1,)).nodes == full_tree(2, 2).nodes


def test_sub_at_outside_tree_is_empty():
    assert sub_at(T((), (0,)), (1,)).is_empty


def test_level_restrict_examples():
    assert level_restrict(full_tree(2, 2), 1).nodes == {(), (0,), (1,)}
    assert level_restrict(full_tree(2, 2), 0).nodes == {()}
    assert level_restrict(Tree(2, 2, frozenset()), 0).nodes == frozenset()
    t = T((), (1,), (1, 0))
    assert level_restrict(t, t.depth_bound) == t


def test_pruned_examples():
    assert is_pruned_to_horizon(full_tree(2, 2), 2)
    assert not is_pruned_to_horizon(T((), (0,)), 2)
    assert not is_pruned_to_horizon(Tree(2, 1, frozenset()), 1)


@pytest.mark.parametrize("d,count", [(0, 2), (1, 5), (2, 26)])
def test_enumerate_trees_counts(d, count):
    ts = enumerate_trees(2, d)
    assert len(ts) == count == count_trees(2, d)
    assert len(set(ts)) == count


def test_enumerate_trees_matches_brute_force_subsets():
    # prefix-closed subsets of the full binary tree of depth 2, found by filtering all subsets
    nodes = full_tree(2, 2).sorted_nodes
    brute = set()
    for mask in range(2 ** len(nodes)):
        s = frozenset(x for i, x in enumerate(nodes) if mask >> i & 1)
        if all(not x or x[:-1] in s for x in s):
            brute.add(s)
    assert {t.nodes for t in enumerate_trees(2, 2)} == brute


def test_enumerate_trees_respects_cap():
    with pytest.raises(CapExceeded):
        enumerate_trees(2, 4, cap=1000)


def test_cylinder_contains():
    assert cylinder_contains((), (0, 1))
    assert cylinder_contains((0,), (0, 1))
    assert not cylinder_contains((1,), (0, 1))


def test_invalid_trees_rejected():
    with pytest.raises(InvalidTree):
        T((), (0, 0))
    with pytest.raises(InvalidTree):
        T((), (2,))
    with pytest.raises(InvalidTree):
        T((), (0,), (0, 0), (0, 0, 0))


def test_node_strings_round_trip():
    assert parse_node("") == () == parse_node("ε")
    assert parse_node("010") == (0, 1, 0)
    assert format_node((0, 1, 0)) == "010"
    with pytest.raises(ValueError):
        parse_node("0a")


@given(trees(), st.data())
def test_sub_at_composes(t, data):
    if t.is_empty:
        return
    x = data.draw(st.sampled_from(t.sorted_nodes))
    s = sub_at(t, x)
    y = data.draw(st.sampled_from(s.sorted_nodes))
    assert sub_at(s, y).nodes == sub_at(t, x + y).nodes
    assert all(x + z in t for z in s.nodes)


@given(trees(), st.integers(0, 4))
def test_level_restrict_idempotent_and_prefix_closed(t, n):
    r = level_restrict(t, n)
    assert level_restrict(r, n) == r
    assert r.nodes <= t.nodes
    assert all(len(x) <= n for x in r.nodes)


@given(trees(max_alphabet=2, max_depth=2))
def test_enumeration_contains_every_tree(t):
    others = enumerate_trees(2, 2)
    if t.alphabet_size == 2 and t.depth_bound == 2:
        assert t in others
