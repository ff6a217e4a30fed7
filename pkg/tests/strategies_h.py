"""Hypothesis strategies for random trees and games."""

from hypothesis import strategies as st

from galestewart.games import Clopen, Closed, Game
from galestewart.trees import Tree, full_tree


@st.composite
def trees(draw, max_alphabet=3, max_depth=3, pruned_to=None):
    a = draw(st.integers(1, max_alphabet))
    d = pruned_to if pruned_to is not None else draw(st.integers(0, max_depth))
    nodes, frontier = {()}, [()]
    while frontier:
        x = frontier.pop()
        if len(x) == d:
            continue
        kids = draw(st.sets(st.integers(0, a - 1), min_size=1 if pruned_to is not None else 0, max_size=a))
        for c in sorted(kids):
            nodes.add(x + (c,))
            frontier.append(x + (c,))
    return Tree(a, d, frozenset(nodes))


@st.composite
def clopen_games(draw, max_alphabet=2, max_horizon=3):
    h = draw(st.integers(1, max_horizon))
    t = draw(trees(max_alphabet=max_alphabet, pruned_to=h))
    leaves = t.level(h)
    accept = draw(st.sets(st.sampled_from(leaves))) if leaves else set()
    return Game(t, h, Clopen(frozenset(accept)))


@st.composite
def closed_games(draw, alphabet=2, max_horizon=3, max_generators=2):
    h = draw(st.integers(1, max_horizon))
    t = full_tree(alphabet, h)
    gens = draw(st.sets(st.sampled_from(t.sorted_nodes), max_size=max_generators))
    return Game(t, h, Closed(frozenset(gens)))
