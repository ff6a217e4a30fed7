"""Game, code and tree-system fixtures shared by the self-test and the test suite."""

from __future__ import annotations

import itertools
import random
from typing import Iterator

from .borel import ClosedGen, Complement, CylinderGen, Union
from .games import Clopen, Closed, Game, Player, normalize_generators
from .strategies import enumerate_strategies, play
from .treecat import InverseSystem, TreeMorphism
from .trees import Node, Tree, full_tree


def all_clopen_games(a: int, h: int) -> Iterator[Game]:
    t = full_tree(a, h)
    leaves = t.level(h)
    for mask in range(2 ** len(leaves)):
        yield Game(t, h, Clopen(frozenset(x for i, x in enumerate(leaves) if mask >> i & 1)))


def random_clopen_games(rng: random.Random, a: int, h: int, n: int) -> list[Game]:
    t = full_tree(a, h)
    leaves = t.level(h)
    return [Game(t, h, Clopen(frozenset(x for x in leaves if rng.random() < 0.5))) for _ in range(n)]


def random_pruned_tree(rng: random.Random, a: int, h: int) -> Tree:
    nodes, frontier = {()}, [()]
    while frontier:
        x = frontier.pop()
        if len(x) == h:
            continue
        kids = [c for c in range(a) if rng.random() < 0.7] or [rng.randrange(a)]
        for c in kids:
            nodes.add(x + (c,))
            frontier.append(x + (c,))
    return Tree(a, h, frozenset(nodes))


def random_closed_games(rng: random.Random, max_a: int, max_h: int, n: int) -> list[Game]:
    games = []
    for _ in range(n):
        a, h = rng.randint(2, max_a), rng.randint(1, max_h)
        t = random_pruned_tree(rng, a, h)
        candidates = [x for x in t.sorted_nodes if x]
        gens = rng.sample(candidates, min(len(candidates), rng.randint(0, 3)))
        games.append(Game(t, h, Closed(frozenset(gens))))
    return games


def closed_generator_sets(a: int, h: int, max_size: int) -> list[frozenset]:
    """Distinct normalized generator sets built from at most ``max_size`` nodes."""
    nodes = full_tree(a, h).sorted_nodes
    seen = {}
    for size in range(max_size + 1):
        for combo in itertools.combinations(nodes, size):
            gens = normalize_generators(combo)
            seen.setdefault(gens, None)
    return list(seen)


def exhaustive_winners(g: Game) -> tuple[bool, bool]:
    """Whether each player has a winning strategy, by trying every strategy pair."""
    zero = list(enumerate_strategies(g.tree, g.horizon, Player.ZERO))
    one = list(enumerate_strategies(g.tree, g.horizon, Player.ONE))
    accept = {x for x in g.leaves if _accepts(g, x)}
    outcome = [[play(s0, s1, g.tree, g.horizon) in accept for s1 in one] for s0 in zero]
    zero_wins = any(all(row) for row in outcome)
    one_wins = any(not any(outcome[i][j] for i in range(len(zero))) for j in range(len(one)))
    return zero_wins, one_wins


def _accepts(g: Game, leaf: Node) -> bool:
    from .games import in_payoff

    return in_payoff(g.payoff, leaf)


def borel_atoms(a: int, max_len: int) -> list:
    """Cylinders and one-generator closed sets over nonempty nodes up to ``max_len``, plus the full set."""
    nodes = [x for x in full_tree(a, max_len).sorted_nodes if x]
    return [CylinderGen(x) for x in nodes] + [ClosedGen([x]) for x in nodes] + [ClosedGen([])]


def borel_code_corpus(a: int = 2, max_len: int = 3) -> list:
    """Every code of nesting depth at most 2 with at most two union children over the atom pool."""
    atoms = borel_atoms(a, max_len)
    codes = list(atoms)
    codes += [Complement(c) for c in atoms]
    codes += [Union((c,)) for c in atoms]
    codes += [Union((c, d)) for c in atoms for d in atoms]
    return codes


# letters available at indices 0, 1, 2 of each stage; letter 2 duplicates letter 1
_STAGE_SHAPES = [(2, 2, 2), (2, 3, 2), (2, 3, 3), (2, 3, 3)]


def _shaped_tree(shape) -> Tree:
    nodes = [w for n in range(len(shape) + 1) for w in itertools.product(*(range(a) for a in shape[:n]))]
    return Tree(max(shape), len(shape), frozenset(nodes))


def three_stage_system() -> InverseSystem:
    """Depth-3 stages whose transition i merges the duplicate letter at index i+1.

    Transition i is therefore a bijection on levels 0..i+1 and two-to-one
    at level i+2, matching the schedule (1, 2, 3).
    """
    stages = [_shaped_tree(shape) for shape in _STAGE_SHAPES]
    transitions = []
    for i in range(3):
        src, tgt = stages[i + 1], stages[i]
        mapping = {x: tuple(min(c, tgt_a - 1) for c, tgt_a in zip(x, _STAGE_SHAPES[i])) for x in src.nodes}
        transitions.append(TreeMorphism(src, tgt, mapping))
    return InverseSystem.finite(stages, transitions, (1, 2, 3))


def three_stage_coverings():
    """The fixture system with fiber-tracking strategy maps on every transition."""
    from .coverings import Covering, CoveringSystem, fiber_tracking_phi

    sys = three_stage_system()
    coverings = tuple(Covering(sys.transition(i), fiber_tracking_phi(sys.transition(i), 3), sys.schedule(i), 3)
                      for i in range(3))
    return CoveringSystem(coverings, (1, 2, 3))
