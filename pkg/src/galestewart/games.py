"""Horizon-truncated Gale-Stewart games and their payoff representations.

A game is a tree pruned up to the horizon ``H`` together with a payoff.  A
depth-``H`` node stands for every infinite branch through it, so payoffs are
evaluated on depth-``H`` leaves.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Union as TUnion

from .trees import Node, Tree, is_pruned_to_horizon, node_str, unpruned_nodes


class Player(enum.IntEnum):
    ZERO = 0
    ONE = 1

    @property
    def opponent(self) -> Player:
        return Player(1 - self)

    def __str__(self) -> str:
        return str(int(self))


def opponent(p: Player) -> Player:
    return p.opponent


def is_position(x: Node, p: Player) -> bool:
    """Player zero moves at even lengths, the root included."""
    return len(x) % 2 == int(p)


def mover(x: Node) -> Player:
    return Player(len(x) % 2)


class InvalidGame(ValueError):
    pass


class MalformedLeaf(ValueError):
    pass


def normalize_generators(generators) -> frozenset:
    """Drop generators that have a proper prefix among the generators."""
    gens = frozenset(tuple(g) for g in generators)
    return frozenset(g for g in gens if not any(g[:i] in gens for i in range(len(g))))


def hits(generators: frozenset, leaf: Node) -> bool:
    """Some generator is a prefix of ``leaf``."""
    return any(leaf[:i] in generators for i in range(len(leaf) + 1))


@dataclass(frozen=True)
class Clopen:
    accept: frozenset

    def __post_init__(self):
        object.__setattr__(self, "accept", frozenset(tuple(x) for x in self.accept))


@dataclass(frozen=True)
class Closed:
    """Branches avoiding every generator cone."""

    generators: frozenset

    def __post_init__(self):
        object.__setattr__(self, "generators", normalize_generators(self.generators))


@dataclass(frozen=True)
class Open:
    """Branches through some generator."""

    generators: frozenset

    def __post_init__(self):
        object.__setattr__(self, "generators", normalize_generators(self.generators))


@dataclass(frozen=True)
class Borel:
    code: Any  # a borel.BorelCode; kept untyped to avoid the import cycle


Payoff = TUnion[Clopen, Closed, Open, Borel]


@dataclass(frozen=True)
class Game:
    tree: Tree
    horizon: int
    payoff: Payoff

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidGame("horizon must be at least 1")
        if self.tree.depth_bound < self.horizon:
            raise InvalidGame(f"tree depth bound {self.tree.depth_bound} below horizon {self.horizon}")
        if any(len(x) > self.horizon for x in self.tree.nodes):
            raise InvalidGame("tree stores nodes beyond the horizon")
        if not is_pruned_to_horizon(self.tree, self.horizon):
            bad = unpruned_nodes(self.tree, self.horizon)
            where = node_str(bad[0]) if bad else "ε"
            raise InvalidGame(f"tree is not pruned to horizon {self.horizon}: node {where} has no child")
        self._check_payoff()

    def _check_payoff(self):
        p = self.payoff
        if isinstance(p, Clopen):
            for x in p.accept:
                if len(x) != self.horizon or x not in self.tree:
                    raise InvalidGame(f"accepted node {node_str(x)} is not a depth-{self.horizon} leaf")
        elif isinstance(p, (Closed, Open)):
            for x in p.generators:
                if len(x) > self.horizon or x not in self.tree:
                    raise InvalidGame(f"generator {node_str(x)} is not a node of the game tree")
        elif isinstance(p, Borel):
            check = getattr(p.code, "check_nodes", None)
            if check is not None:
                check(self.tree, self.horizon)
        else:
            raise InvalidGame(f"unknown payoff {p!r}")

    @property
    def leaves(self) -> list[Node]:
        return self.tree.level(self.horizon)

    def with_payoff(self, payoff: Payoff) -> Game:
        return Game(self.tree, self.horizon, payoff)


def in_payoff(payoff: Payoff, leaf: Node) -> bool:
    if isinstance(payoff, Clopen):
        return leaf in payoff.accept
    if isinstance(payoff, Closed):
        return not hits(payoff.generators, leaf)
    if isinstance(payoff, Open):
        return hits(payoff.generators, leaf)
    if isinstance(payoff, Borel):
        return payoff.code.contains(leaf)
    raise TypeError(f"unknown payoff {payoff!r}")


def eval_payoff(g: Game, leaf: Node) -> Player:
    """The winner of the play through ``leaf``."""
    if len(leaf) != g.horizon or leaf not in g.tree:
        raise MalformedLeaf(f"{node_str(leaf)} is not a depth-{g.horizon} leaf of the game")
    return Player.ZERO if in_payoff(g.payoff, leaf) else Player.ONE


def winners(g: Game) -> dict[Node, Player]:
    return {leaf: eval_payoff(g, leaf) for leaf in g.leaves}


def accepted_leaves(g: Game) -> frozenset:
    return frozenset(leaf for leaf in g.leaves if in_payoff(g.payoff, leaf))


def to_clopen(g: Game) -> Game:
    """The extensionally equal game with an explicit accept set."""
    return g.with_payoff(Clopen(accepted_leaves(g)))


def complement_payoff(payoff: Payoff, g: Game | None = None) -> Payoff:
    if isinstance(payoff, Clopen):
        if g is None:
            raise ValueError("complementing a clopen payoff needs the game")
        return Clopen(frozenset(g.leaves) - payoff.accept)
    if isinstance(payoff, Closed):
        return Open(payoff.generators)
    if isinstance(payoff, Open):
        return Closed(payoff.generators)
    if isinstance(payoff, Borel):
        from .borel import Complement

        return Borel(Complement(payoff.code))
    raise TypeError(f"unknown payoff {payoff!r}")


def decision_depth(g: Game, x: Node) -> int | None:
    """Least depth d >= |x| by which every play through x has a decided winner.

    Always at most the horizon for truncated games; ``None`` is kept for
    payoffs that a horizon cannot decide.
    """
    if x not in g.tree:
        raise ValueError(f"{node_str(x)} is not in the game tree")
    win = winners(g)
    below = [leaf for leaf in win if leaf[: len(x)] == x]
    for d in range(len(x), g.horizon + 1):
        outcome: dict[Node, Player] = {}
        if all(outcome.setdefault(leaf[:d], win[leaf]) == win[leaf] for leaf in below):
            return d
    return None
