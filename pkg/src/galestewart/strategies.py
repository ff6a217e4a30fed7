"""Prestrategies, quasistrategies and strategies as functions on own positions.

A prestrategy maps each own position to a set of permitted letters (missing
keys mean no permitted move).  Strategy trees are derived from it through
:func:`strategy_subtree`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .caps import check_cap
from .games import Game, Player, eval_payoff, is_position
from .trees import EMPTY, Node, Tree, node_str


class InvalidStrategy(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PreStrategy:
    player: Player
    choices: Mapping[Node, frozenset] = field(default_factory=dict)

    def allowed(self, x: Node) -> frozenset:
        return self.choices.get(x, frozenset())

    def normalized(self) -> dict[Node, frozenset]:
        return {x: frozenset(c) for x, c in self.choices.items() if c}

    def __eq__(self, other) -> bool:
        if not isinstance(other, PreStrategy):
            return NotImplemented
        return self.player == other.player and self.normalized() == other.normalized()

    def __hash__(self) -> int:
        return hash((self.player, frozenset(self.normalized().items())))

    def check(self, t: Tree, horizon: int) -> None:
        """Raise unless every key is an own position of ``t`` with legal letters."""
        for x, letters in self.choices.items():
            if x not in t or not is_position(x, self.player) or len(x) >= horizon:
                raise InvalidStrategy(f"{node_str(x)} is not a position of player {self.player}")
            for a in letters:
                if x + (a,) not in t:
                    raise InvalidStrategy(f"letter {a} does not extend {node_str(x)} in the tree")

    def is_subsumed_by(self, other: PreStrategy) -> bool:
        return all(c <= other.allowed(x) for x, c in self.choices.items())


class QuasiStrategy(PreStrategy):
    def check(self, t: Tree, horizon: int) -> None:
        super().check(t, horizon)
        sub = strategy_subtree(self, t, horizon)
        for x in sub.nodes:
            if len(x) < horizon and is_position(x, self.player) and not self.allowed(x):
                raise InvalidStrategy(f"no move at reachable position {node_str(x)}")


class Strategy(QuasiStrategy):
    """A functional strategy: one letter at every own position it is defined on."""

    @classmethod
    def from_moves(cls, player: Player, moves: Mapping[Node, int]) -> Strategy:
        return cls(Player(player), {x: frozenset((a,)) for x, a in moves.items()})

    @property
    def moves(self) -> dict[Node, int]:
        return {x: next(iter(c)) for x, c in self.choices.items() if c}

    def move(self, x: Node) -> int | None:
        c = self.choices.get(x)
        return next(iter(c)) if c else None

    def check(self, t: Tree, horizon: int) -> None:
        super().check(t, horizon)
        for x, c in self.choices.items():
            if len(c) > 1:
                raise InvalidStrategy(f"several moves at {node_str(x)}")


def full_quasistrategy(t: Tree, horizon: int, p: Player) -> QuasiStrategy:
    return QuasiStrategy(p, {
        x: frozenset(t.children(x)) for x in t.nodes if len(x) < horizon and is_position(x, p)
    })


def _walk(s: PreStrategy, t: Tree, horizon: int) -> Iterator[Node]:
    stack = [EMPTY] if EMPTY in t else []
    while stack:
        x = stack.pop()
        yield x
        if len(x) >= horizon:
            continue
        if is_position(x, s.player):
            kids = [a for a in s.allowed(x) if x + (a,) in t]
        else:
            kids = t.children(x)
        stack.extend(x + (a,) for a in kids)


def strategy_subtree(s: PreStrategy, t: Tree, horizon: int) -> Tree:
    """Nodes reachable when own moves stay inside the permitted sets."""
    return Tree.trusted(t.alphabet_size, t.depth_bound, _walk(s, t, horizon))


def consistent_leaves(s: PreStrategy, t: Tree, horizon: int) -> set[Node]:
    return {x for x in _walk(s, t, horizon) if len(x) == horizon}


def is_winning(s: PreStrategy, g: Game) -> bool:
    return all(eval_payoff(g, leaf) == s.player for leaf in consistent_leaves(s, g.tree, g.horizon))


def restrict_levels(s: PreStrategy, n: int) -> PreStrategy:
    """Keep the choices at positions shorter than ``n``."""
    return type(s)(s.player, {x: c for x, c in s.choices.items() if len(x) < n})


def own_positions(t: Tree, horizon: int, p: Player) -> list[Node]:
    return [x for x in t.sorted_nodes if len(x) < horizon and is_position(x, p) and t.children(x)]


def count_strategies(t: Tree, horizon: int, p: Player) -> int:
    return math.prod(len(t.children(x)) for x in own_positions(t, horizon, p))


def enumerate_strategies(t: Tree, horizon: int, p: Player, cap: int | None = None) -> Iterator[Strategy]:
    """Every total functional strategy of ``p``, in canonical order."""
    p = Player(p)
    check_cap(f"strategies of player {p}", count_strategies(t, horizon, p), cap)
    positions = own_positions(t, horizon, p)
    for picks in itertools.product(*(t.children(x) for x in positions)):
        yield Strategy.from_moves(p, dict(zip(positions, picks)))


def _reduced_count(t: Tree, horizon: int, p: Player, x: Node) -> int:
    if len(x) >= horizon:
        return 1
    kids = t.children(x)
    if is_position(x, p):
        return sum(_reduced_count(t, horizon, p, x + (a,)) for a in kids)
    return math.prod(_reduced_count(t, horizon, p, x + (a,)) for a in kids)


def count_reduced_strategies(t: Tree, horizon: int, p: Player, root: Node = EMPTY) -> int:
    return _reduced_count(t, horizon, Player(p), root)


def canonical_completion(t: Tree, horizon: int, p: Player, moves: Mapping[Node, int]) -> dict[Node, int]:
    """Fill unassigned own positions with their least letter."""
    full = {x: t.children(x)[0] for x in own_positions(t, horizon, p)}
    full.update(moves)
    return full


def enumerate_reduced_moves(
    t: Tree, horizon: int, p: Player, root: Node = EMPTY, cap: int | None = None
) -> Iterator[dict[Node, int]]:
    """Move tables varying only at positions reachable under the table itself.

    Each strategy tree below ``root`` is produced exactly once; the
    positions it never reaches are left out.
    """
    p = Player(p)
    check_cap(f"reduced strategies of player {p}", count_reduced_strategies(t, horizon, p, root), cap)

    def rec(x: Node) -> Iterator[dict[Node, int]]:
        if len(x) >= horizon:
            yield {}
            return
        kids = t.children(x)
        if is_position(x, p):
            for a in kids:
                for rest in rec(x + (a,)):
                    yield {x: a, **rest}
        else:
            for parts in itertools.product(*(list(rec(x + (a,))) for a in kids)):
                merged: dict[Node, int] = {}
                for part in parts:
                    merged.update(part)
                yield merged

    yield from rec(root)


def enumerate_reduced_strategies(
    t: Tree, horizon: int, p: Player, cap: int | None = None
) -> Iterator[Strategy]:
    """One total strategy per strategy tree, off-path positions at their least letter."""
    for moves in enumerate_reduced_moves(t, horizon, p, cap=cap):
        yield Strategy.from_moves(p, canonical_completion(t, horizon, p, moves))


def play(s0: Strategy, s1: Strategy, t: Tree, horizon: int) -> Node:
    """The unique play of two functional strategies."""
    x = EMPTY
    by_player = {Player(s0.player): s0, Player(s1.player): s1}
    while len(x) < horizon:
        a = by_player[Player(len(x) % 2)].move(x)
        if a is None or x + (a,) not in t:
            raise InvalidStrategy(f"no legal move at {node_str(x)}")
        x = x + (a,)
    return x


def is_strategy_tree(sub: Tree, t: Tree, horizon: int, p: Player) -> bool:
    """Every opponent successor stays in ``sub``; own positions keep one child at least."""
    if EMPTY not in sub:
        return False
    for x in sub.nodes:
        if len(x) >= horizon or x not in t:
            continue
        kids = set(sub.children(x))
        if not kids <= set(t.children(x)):
            return False
        if is_position(x, p):
            if not kids:
                return False
        elif kids != set(t.children(x)):
            return False
    return True
