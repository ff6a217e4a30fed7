"""Finite Borel codes and the determinacy pipeline built from unravelings.

A code is unraveled by structural recursion.  Generators go through
:func:`build_unravel_covering`; complements reuse their child's covering;
a union chains one covering per child, each at a higher fixing level,
reads the composite off the limit of that chain, and finally unravels the
closed complement of the (now open) pulled-back union.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coverings import (Covering, CoveringSystem, compose_coverings, extend_limit_covering)
from .games import Borel, Clopen, Closed, Game, Player, hits, normalize_generators
from .solver import backward_induction
from .strategies import Strategy, is_winning
from .treecat import TreeMorphism, fixing_level
from .trees import Node, Tree, node_str
from .unravel import build_unravel_covering

DEFAULT_MAX_HEIGHT = 4


class HorizonTooSmall(ValueError):
    pass


class InvalidCode(ValueError):
    pass


class PipelineFalsified(AssertionError):
    """The transferred strategy does not win, or the winner disagrees with the oracle."""


@dataclass(frozen=True)
class CylinderGen:
    node: Node

    def __post_init__(self):
        object.__setattr__(self, "node", tuple(self.node))

    def contains(self, leaf: Node) -> bool:
        return leaf[: len(self.node)] == self.node

    def pullback(self, pi: TreeMorphism):
        # the cylinder pulls back to the open set through the preimage of its node
        return Complement(ClosedGen(pi.preimage([self.node])))

    def nodes(self):
        return [self.node]

    @property
    def height(self) -> int:
        return 1


@dataclass(frozen=True)
class ClosedGen:
    generators: frozenset

    def __post_init__(self):
        object.__setattr__(self, "generators", normalize_generators(self.generators))

    def contains(self, leaf: Node) -> bool:
        return not hits(self.generators, leaf)

    def pullback(self, pi: TreeMorphism):
        return ClosedGen(pi.preimage(self.generators))

    def nodes(self):
        return sorted(self.generators)

    @property
    def height(self) -> int:
        return 1


@dataclass(frozen=True)
class Complement:
    child: object

    def contains(self, leaf: Node) -> bool:
        return not self.child.contains(leaf)

    def pullback(self, pi: TreeMorphism):
        return Complement(self.child.pullback(pi))

    def nodes(self):
        return self.child.nodes()

    @property
    def height(self) -> int:
        return 1 + self.child.height


@dataclass(frozen=True)
class Union:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise InvalidCode("a union needs at least one child")

    def contains(self, leaf: Node) -> bool:
        return any(c.contains(leaf) for c in self.children)

    def pullback(self, pi: TreeMorphism):
        return Union(tuple(c.pullback(pi) for c in self.children))

    def nodes(self):
        return [x for c in self.children for x in c.nodes()]

    @property
    def height(self) -> int:
        return 1 + max(c.height for c in self.children)


BorelCode = CylinderGen | ClosedGen | Complement | Union


def eval_code(code, leaf: Node) -> bool:
    return code.contains(leaf)


def check_code(code, tree: Tree, horizon: int, max_height: int = DEFAULT_MAX_HEIGHT) -> None:
    for x in code.nodes():
        if len(x) > horizon or x not in tree:
            raise InvalidCode(f"code refers to {node_str(x)}, which is not a node of the game tree")
    if code.height > max_height:
        raise InvalidCode(f"code nesting depth {code.height} exceeds {max_height}")


def _special_parameter(level: int) -> int:
    """Unraveling parameter whose covering is ``level``-fixing."""
    return (level + 1) // 2


def required_horizon(code, level: int = 0) -> int:
    """Least horizon at which the code can be unraveled starting at ``level``."""
    if isinstance(code, (CylinderGen, ClosedGen)):
        return 2 * _special_parameter(level) + 2
    if isinstance(code, Complement):
        return required_horizon(code.child, level)
    if isinstance(code, Union):
        m = len(code.children)
        need = [required_horizon(c, level + j) for j, c in enumerate(code.children)]
        need.append(2 * _special_parameter(level + m) + 2)
        return max(need)
    raise InvalidCode(f"unknown code {code!r}")


def minimal_horizon(code) -> int:
    """The minimal admissible horizon: unravelable and deep enough for the code's nodes."""
    deepest = max((len(x) for x in code.nodes()), default=0)
    return max(required_horizon(code), deepest, 1)


@dataclass(frozen=True, eq=False)
class CodeUnraveling:
    covering: Covering
    accept: frozenset  # source leaves in the pulled-back set
    chain: tuple  # the generator unravelings used, in construction order
    stages: int  # unraveling stages consumed

    @property
    def source(self) -> Tree:
        return self.covering.source

    def preimage_game(self, horizon: int) -> Game:
        return Game(self.source, horizon, Clopen(self.accept))


def unravel_code(g: Game, code, k: int = 0) -> CodeUnraveling:
    """A k-covering of g's tree pulling the coded set back to a clopen set."""
    need = required_horizon(code, k)
    if g.horizon < need:
        raise HorizonTooSmall(f"code needs horizon {need} at level {k}, game has {g.horizon}")
    return _unravel(g.tree, g.horizon, code, k)


def _unravel(tree: Tree, h: int, code, level: int) -> CodeUnraveling:
    if isinstance(code, ClosedGen):
        u, cov = build_unravel_covering(Game(tree, h, Closed(code.generators)), _special_parameter(level))
        cov = Covering(cov.pi, cov.phi, level, h)
        return CodeUnraveling(cov, u.preimage_accepts(), (cov,), 1)
    if isinstance(code, CylinderGen):
        inner = _unravel(tree, h, ClosedGen([code.node]), level)
        return _complemented(inner, h)
    if isinstance(code, Complement):
        return _complemented(_unravel(tree, h, code.child, level), h)
    if isinstance(code, Union):
        return _unravel_union(tree, h, code, level)
    raise InvalidCode(f"unknown code {code!r}")


def _complemented(r: CodeUnraveling, h: int) -> CodeUnraveling:
    leaves = frozenset(r.source.level(h))
    return CodeUnraveling(r.covering, leaves - r.accept, r.chain, r.stages)


def _unravel_union(tree: Tree, h: int, code: Union, level: int) -> CodeUnraveling:
    links: list[Covering] = []
    accepts: list[frozenset] = []
    chain: list[Covering] = []
    stages = 0
    top = tree
    to_base: TreeMorphism | None = None
    for j, child in enumerate(code.children):
        pulled = child if to_base is None else child.pullback(to_base)
        r = _unravel(top, h, pulled, level + j)
        # sets found earlier live on the previous stage; carry them up
        accepts = [frozenset(r.covering.pi.preimage(a)) for a in accepts] + [r.accept]
        links.append(r.covering)
        chain.extend(r.chain)
        stages += r.stages
        top = r.source
        to_base = r.covering.pi if to_base is None else _compose_pi(to_base, r.covering.pi)
    system = CoveringSystem(tuple(links), tuple(level + j for j in range(len(links))))
    limit = extend_limit_covering(system, h, 0)
    union = frozenset().union(*accepts)
    # the pulled-back union is open: generated by the nodes whose whole cone lies in it
    generators = _open_generators(top, h, union)
    final = _unravel(top, h, ClosedGen(generators), level + len(links))
    leaves = frozenset(final.source.level(h))
    total = compose_coverings(limit, final.covering)
    return CodeUnraveling(Covering(total.pi, total.phi, level, h), leaves - final.accept,
                          tuple(chain) + final.chain, stages + final.stages)


def _compose_pi(outer: TreeMorphism, inner: TreeMorphism) -> TreeMorphism:
    return TreeMorphism(inner.source, outer.target, {x: outer.mapping[y] for x, y in inner.mapping.items()})


def _open_generators(tree: Tree, h: int, accept: frozenset) -> frozenset:
    inside: set[Node] = set()
    for x in sorted(tree.nodes, key=len, reverse=True):
        if len(x) == h:
            if x in accept:
                inside.add(x)
        elif all(x + (a,) in inside for a in tree.children(x)):
            inside.add(x)
    return normalize_generators(inside)


@dataclass(frozen=True, eq=False)
class PipelineReport:
    winner: Player
    base_strategy: Strategy
    covering_chain: tuple
    total_fixing: int
    oracle_winner: Player
    unraveled_nodes: int = 0
    stages: int = 0
    notes: list = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return self.winner == self.oracle_winner


def oracle_winner(g: Game) -> Player:
    """Backward induction on the extensional clopen expansion, independent of any covering."""
    accept = frozenset(leaf for leaf in g.leaves if g.payoff.code.contains(leaf))
    return backward_induction(g.with_payoff(Clopen(accept))).winner


def solve_borel(g: Game) -> PipelineReport:
    if not isinstance(g.payoff, Borel):
        raise TypeError("solve_borel needs a Borel payoff")
    code = g.payoff.code
    r = unravel_code(g, code, 0)
    top = r.preimage_game(g.horizon)
    sol = backward_induction(top)
    base_strategy = r.covering.phi.apply(sol.winner, sol.strategy)
    if not is_winning(base_strategy, g):
        raise PipelineFalsified(f"transferred strategy of player {sol.winner} does not win the base game")
    oracle = oracle_winner(g)
    if oracle != sol.winner:
        raise PipelineFalsified(f"pipeline winner {sol.winner} disagrees with the oracle {oracle}")
    return PipelineReport(sol.winner, base_strategy, r.chain, fixing_level(r.covering.pi), oracle,
                          len(r.source.nodes), r.stages)
