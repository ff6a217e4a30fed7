import itertools

import pytest
from hypothesis import given, strategies as st

from galestewart.games import Clopen, Game, Player
from galestewart.strategies import (InvalidStrategy, PreStrategy, QuasiStrategy, Strategy, consistent_leaves,
                                    count_reduced_strategies, count_strategies, enumerate_reduced_strategies,
                                    enumerate_strategies, full_quasistrategy, is_strategy_tree, is_winning, play,
                                    restrict_levels, strategy_subtree)
from galestewart.trees import Tree, full_tree

from strategies_h import trees

B2 = full_tree(2, 2)
G_CYL = Game(B2, 2, Clopen(frozenset({(0, 0), (0, 1)})))
ALWAYS0 = Strategy.from_moves(Player.ZERO, {(): 0})
ALWAYS1 = Strategy.from_moves(Player.ZERO, {(): 1})
EMPTY_ZERO = PreStrategy(Player.ZERO, {})


def test_strategy_subtree_examples():
    assert strategy_subtree(EMPTY_ZERO, B2, 2).nodes == {()}
    assert strategy_subtree(ALWAYS0, B2, 2).nodes == {(), (0,), (0, 0), (0, 1)}
    assert strategy_subtree(full_quasistrategy(B2, 2, Player.ZERO), B2, 2) == B2


def test_consistent_leaves_examples():
    assert consistent_leaves(ALWAYS0, B2, 2) == {(0, 0), (0, 1)}
    assert consistent_leaves(full_quasistrategy(B2, 2, Player.ONE), B2, 2) == set(B2.level(2))
    assert consistent_leaves(EMPTY_ZERO, B2, 2) == set()


def test_is_winning_examples():
    assert is_winning(ALWAYS0, G_CYL)
    assert not is_winning(ALWAYS1, G_CYL)
    assert is_winning(EMPTY_ZERO, G_CYL)
    assert is_winning(PreStrategy(Player.ONE, {}), G_CYL)


def test_restrict_levels_examples():
    t = full_tree(2, 4)
    s = next(iter(enumerate_strategies(t, 4, Player.ONE)))
    assert restrict_levels(s, 0) == PreStrategy(Player.ONE, {})
    assert restrict_levels(s, 4) == s
    moves = s.moves
    flipped = dict(moves)
    x3 = next(x for x in moves if len(x) == 3)
    flipped[x3] = 1 - moves[x3]
    other = Strategy.from_moves(Player.ONE, flipped)
    assert other != s
    assert restrict_levels(other, 2) == restrict_levels(s, 2)


@pytest.mark.parametrize("h,p,count", [(2, Player.ZERO, 2), (2, Player.ONE, 4), (3, Player.ZERO, 32)])
def test_enumerate_strategies_counts(h, p, count):
    t = full_tree(2, h)
    strats = list(enumerate_strategies(t, h, p))
    assert len(strats) == count == count_strategies(t, h, p)
    assert len(set(strats)) == count


def test_reduced_enumeration_gives_one_strategy_per_strategy_tree():
    t = full_tree(2, 3)
    for p in Player:
        by_tree = {strategy_subtree(s, t, 3) for s in enumerate_strategies(t, 3, p)}
        reduced = [strategy_subtree(s, t, 3) for s in enumerate_reduced_strategies(t, 3, p)]
        assert len(reduced) == len(set(reduced)) == len(by_tree) == count_reduced_strategies(t, 3, p)
        assert set(reduced) == by_tree


def test_strategy_trees_are_the_image_of_functional_strategies():
    # canonical surjection: strategy trees enumerated directly are exactly the images
    t = full_tree(2, 3)
    for p in Player:
        images = {strategy_subtree(s, t, 3).nodes for s in enumerate_strategies(t, 3, p)}
        direct = set()
        nodes = t.sorted_nodes
        for mask in range(2 ** len(nodes)):
            sub = frozenset(x for i, x in enumerate(nodes) if mask >> i & 1)
            if () not in sub or any(x and x[:-1] not in sub for x in sub):
                continue
            cand = Tree(2, 3, sub)
            if is_strategy_tree(cand, t, 3, p) and all(
                    len(cand.children(x)) == 1 for x in sub if len(x) < 3 and len(x) % 2 == p):
                direct.add(sub)
        assert images == direct


def test_checks_reject_bad_strategies():
    with pytest.raises(InvalidStrategy):
        Strategy.from_moves(Player.ZERO, {(0,): 0}).check(B2, 2)
    with pytest.raises(InvalidStrategy):
        QuasiStrategy(Player.ZERO, {(): frozenset()}).check(B2, 2)
    with pytest.raises(InvalidStrategy):
        Strategy(Player.ZERO, {(): frozenset({0, 1})}).check(B2, 2)
    PreStrategy(Player.ZERO, {(): frozenset()}).check(B2, 2)


def test_play_is_consistent_with_both_strategies():
    t = full_tree(2, 3)
    for s0, s1 in itertools.product(enumerate_strategies(t, 3, Player.ZERO), enumerate_strategies(t, 3, Player.ONE)):
        leaf = play(s0, s1, t, 3)
        assert leaf in consistent_leaves(s0, t, 3) and leaf in consistent_leaves(s1, t, 3)


@given(trees(max_alphabet=3, pruned_to=3), st.sampled_from(list(Player)), st.integers(0, 3))
def test_restrict_levels_monotone(t, p, n):
    full = full_quasistrategy(t, 3, p)
    r = restrict_levels(full, n)
    assert r.is_subsumed_by(full)
    assert strategy_subtree(r, t, 3).nodes <= strategy_subtree(full, t, 3).nodes


@given(trees(max_alphabet=2, pruned_to=3), st.sampled_from(list(Player)))
def test_quasistrategy_subsumption_shrinks_strategy_trees(t, p):
    full = full_quasistrategy(t, 3, p)
    for s in itertools.islice(enumerate_strategies(t, 3, p), 20):
        assert s.is_subsumed_by(full)
        assert strategy_subtree(s, t, 3).nodes <= t.nodes
        assert consistent_leaves(s, t, 3) <= consistent_leaves(full, t, 3)
        assert is_strategy_tree(strategy_subtree(s, t, 3), t, 3, p)
