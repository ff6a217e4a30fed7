"""Backward induction for horizon games and the defensive construction for closed ones."""

from __future__ import annotations

from dataclasses import dataclass

from .games import Closed, Game, Player, eval_payoff, is_position
from .strategies import QuasiStrategy, Strategy, own_positions
from .trees import EMPTY, Node


class NoDefensiveStrategy(Exception):
    """Player one already wins from the root."""


@dataclass(frozen=True)
class SolveResult:
    winner: Player
    strategy: Strategy
    region: frozenset  # positions from which player one wins


def winning_region(g: Game, p: Player) -> frozenset:
    """Nodes from which ``p`` can force a won leaf, by backward induction."""
    p = Player(p)
    region: set[Node] = set()
    for x in sorted(g.tree.nodes, key=len, reverse=True):
        if len(x) == g.horizon:
            if eval_payoff(g, x) == p:
                region.add(x)
            continue
        kids = [x + (a,) for a in g.tree.children(x)]
        if is_position(x, p):
            if any(c in region for c in kids):
                region.add(x)
        elif all(c in region for c in kids):
            region.add(x)
    return frozenset(region)


def backward_induction(g: Game) -> SolveResult:
    """Zermelo: the winner and a winning strategy picking the least winning child."""
    zero_region = winning_region(g, Player.ZERO)
    one_region = winning_region(g, Player.ONE)
    winner = Player.ZERO if EMPTY in zero_region else Player.ONE
    region = zero_region if winner == Player.ZERO else one_region
    moves = {}
    for x in own_positions(g.tree, g.horizon, winner):
        kids = g.tree.children(x)
        good = [a for a in kids if x + (a,) in region]
        moves[x] = good[0] if good else kids[0]
    return SolveResult(winner, Strategy.from_moves(winner, moves), one_region)


def defensive_quasistrategy(g: Game) -> QuasiStrategy:
    """Player zero's moves that never enter player one's winning region."""
    if not isinstance(g.payoff, Closed):
        raise TypeError("the defensive construction needs a closed payoff")
    danger = winning_region(g, Player.ONE)
    if EMPTY in danger:
        raise NoDefensiveStrategy("player one wins from the root")
    choices = {
        x: frozenset(a for a in g.tree.children(x) if x + (a,) not in danger)
        for x in own_positions(g.tree, g.horizon, Player.ZERO)
    }
    return QuasiStrategy(Player.ZERO, choices)
