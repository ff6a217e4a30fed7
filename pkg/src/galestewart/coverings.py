"""Coverings: a tree morphism paired with a map on strategies.

A covering ``(π, φ): T' → T`` must satisfy locality (the first n levels of
``φ(σ)`` depend only on the first n levels of ``σ``) and lifting (every play
of ``φ(σ)`` is the image of a play of ``σ``).  It is a k-covering when π is
bijective on the first k levels and φ is the map π induces there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

from .caps import check_cap, enumeration_cap
from .games import Borel, Clopen, Closed, Game, Open, Payoff, Player, in_payoff, is_position
from .strategies import (
    Strategy,
    canonical_completion,
    consistent_leaves,
    count_reduced_strategies,
    enumerate_reduced_moves,
    own_positions,
)
from .treecat import (
    InverseSystem,
    MorphismMismatch,
    TreeMorphism,
    compose,
    fixing_level,
    identity,
    level_inverse,
    level_is_bijective,
    limit_tree,
)
from .trees import EMPTY, Node, Tree, node_str


class LiftStranded(Exception):
    """Tracking found no lift of an opponent move."""

    def __init__(self, sigma, x: Node, b: int):
        super().__init__(f"no lift of move {b} at {node_str(x)}")
        self.sigma = sigma
        self.x = x
        self.b = b


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True, eq=False)
class StrategyMap:
    """``apply(player, σ')`` returns a strategy on the target tree.

    ``fiber_local`` promises that the output below a target node depends
    only on σ' inside the π-preimage of that node's cone; verification uses
    it to split the strategy space by the opponent's first move.
    """

    fn: Callable[[Player, Strategy], Strategy]
    fiber_local: bool = False
    name: str = "φ"

    def apply(self, player: Player, sigma: Strategy) -> Strategy:
        out = self.fn(Player(player), sigma)
        if out.player != sigma.player:
            raise ValueError(f"{self.name} changed the player")
        return out

    def __call__(self, sigma: Strategy) -> Strategy:
        return self.apply(sigma.player, sigma)


@dataclass(frozen=True, eq=False)
class Covering:
    pi: TreeMorphism
    phi: StrategyMap
    k: int
    horizon: int

    @property
    def source(self) -> Tree:
        return self.pi.source

    @property
    def target(self) -> Tree:
        return self.pi.target


# -- strategy maps -----------------------------------------------------------


def identity_map() -> StrategyMap:
    return StrategyMap(lambda p, s: s, fiber_local=True, name="id")


def identity_covering(t: Tree, horizon: int) -> Covering:
    return Covering(identity(t), identity_map(), horizon, horizon)


def induced_moves(pi: TreeMorphism, sigma: Strategy, horizon: int, upto: int) -> dict[Node, int]:
    """Moves on target positions shorter than ``upto`` copied through the level bijections of π."""
    p = sigma.player
    moves: dict[Node, int] = {}
    for n in range(min(upto, horizon)):
        if n % 2 != p or not level_is_bijective(pi, n + 1) or not level_is_bijective(pi, n):
            continue
        for x in pi.source.level(n):
            a = sigma.move(x)
            if a is not None and x + (a,) in pi.source:
                moves[pi.mapping[x]] = pi.mapping[x + (a,)][-1]
    return moves


def fiber_tracking_phi(pi: TreeMorphism, horizon: int) -> StrategyMap:
    """Play on the target while tracking one lift in the source.

    Own moves copy σ' at the tracked lift; an opponent letter moves the lift
    to its least child projecting onto that letter.  Positions off the play
    get their least letter.
    """
    src, tgt = pi.source, pi.target
    fixed = fixing_level(pi)

    def apply(p: Player, sigma: Strategy) -> Strategy:
        moves: dict[Node, int] = {}
        stack = [(EMPTY, EMPTY)]
        while stack:
            x, lift = stack.pop()
            if len(x) >= horizon:
                continue
            if is_position(x, p):
                a = sigma.move(lift)
                if a is None or lift + (a,) not in src:
                    raise LiftStranded(sigma, x, -1)
                nxt = lift + (a,)
                b = pi.mapping[nxt][-1]
                moves[x] = b
                stack.append((x + (b,), nxt))
            else:
                for b in tgt.children(x):
                    cands = [a for a in src.children(lift) if pi.mapping[lift + (a,)][-1] == b]
                    if not cands:
                        raise LiftStranded(sigma, x, b)
                    stack.append((x + (b,), lift + (cands[0],)))
        below = induced_moves(pi, sigma, horizon, fixed)
        return Strategy.from_moves(p, canonical_completion(tgt, horizon, p, {**below, **moves}))

    return StrategyMap(apply, fiber_local=True, name="fiber-tracking")


def compose_maps(outer: StrategyMap, inner: StrategyMap) -> StrategyMap:
    return StrategyMap(lambda p, s: outer.apply(p, inner.apply(p, s)),
                       fiber_local=outer.fiber_local and inner.fiber_local,
                       name=f"{outer.name}∘{inner.name}")


def compose_coverings(c1: Covering, c2: Covering) -> Covering:
    """``c1 ∘ c2`` for ``c2: T2 → T1`` and ``c1: T1 → T0``."""
    if c1.pi.source != c2.pi.target:
        raise MorphismMismatch("coverings do not chain")
    if c1.horizon != c2.horizon:
        raise MorphismMismatch("coverings live at different horizons")
    return Covering(compose(c1.pi, c2.pi), compose_maps(c1.phi, c2.phi), min(c1.k, c2.k), c1.horizon)


def transfer(c: Covering, g: Game, sigma_prime: Strategy) -> Strategy:
    if g.tree != c.target:
        raise MorphismMismatch("game does not live on the covering's target")
    return c.phi.apply(sigma_prime.player, sigma_prime)


# -- payoffs -----------------------------------------------------------------


def preimage_payoff(c: Covering, g: Game) -> Clopen:
    """Accepted source leaves: those whose image is won by player zero."""
    h = g.horizon
    return Clopen(frozenset(x for x in c.source.level(h) if in_payoff(g.payoff, c.pi.mapping[x])))


def pullback_payoff(pi: TreeMorphism, payoff: Payoff) -> Payoff:
    """Structural preimage; Closed and Open pull back generator-wise."""
    if isinstance(payoff, Clopen):
        return Clopen(pi.preimage(payoff.accept))
    if isinstance(payoff, Closed):
        return Closed(pi.preimage(payoff.generators))
    if isinstance(payoff, Open):
        return Open(pi.preimage(payoff.generators))
    if isinstance(payoff, Borel):
        return Borel(payoff.code.pullback(pi))
    raise TypeError(f"unknown payoff {payoff!r}")


def preimage_game(c: Covering, g: Game) -> Game:
    return Game(c.source, g.horizon, preimage_payoff(c, g))


# -- verification ------------------------------------------------------------


@dataclass
class CoveringCheck:
    ok: bool = True
    failure: str | None = None
    counterexample: object = None
    strategies: dict = field(default_factory=lambda: {Player.ZERO: 0, Player.ONE: 0})
    winning_transferred: int = 0
    stranded: int = 0

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, msg: str, witness=None):
        if self.ok:
            self.ok = False
            self.failure = msg
            self.counterexample = witness


def _components(c: Covering, p: Player):
    """Split points for the strategy space of ``p`` on the source.

    Yields (target cone root, source roots); a fiber-local map splits at the
    first level whenever the root belongs to the opponent.
    """
    src, tgt = c.source, c.target
    if c.phi.fiber_local and not is_position(EMPTY, p) and c.horizon >= 1:
        for b in tgt.children(EMPTY):
            yield (b,), [(a,) for a in src.children(EMPTY) if c.pi.mapping[(a,)] == (b,)]
    else:
        yield EMPTY, [EMPTY]


def verify_covering(c: Covering, h: int | None = None, budget: int | None = None,
                    game: Game | None = None) -> CoveringCheck:
    """Check locality, lifting and the k-clause for every strategy of both players.

    Strategies are enumerated one per strategy tree.  With ``game`` given,
    every strategy winning in the preimage game must also transfer to a
    winning strategy of ``game``.
    """
    h = c.horizon if h is None else h
    budget = enumeration_cap() if budget is None else budget
    report = CoveringCheck()
    src, tgt = c.source, c.target
    k = min(c.k, h)
    if fixing_level(c.pi) < k:
        report.fail(f"π is only {fixing_level(c.pi)}-fixing, covering claims {c.k}")
        return report
    inverses: dict[Node, Node] = {}
    for n in range(k + 1):
        inverses.update(level_inverse(c.pi, n))
    winner_of = None
    if game is not None:
        target_win = {y: in_payoff(game.payoff, y) for y in tgt.level(h)}
        winner_of = (target_win, {x: target_win[c.pi.mapping[x]] for x in src.level(h)})
    for p in (Player.ZERO, Player.ONE):
        for cone, roots in _components(c, p):
            count = math.prod(count_reduced_strategies(src, h, p, r) for r in roots)
            try:
                check_cap(f"strategies of player {p} below {node_str(cone)}", count, budget)
            except Exception as exc:
                raise BudgetExceeded(str(exc)) from None
            _verify_component(c, h, p, cone, roots, inverses, k, winner_of, report)
            if not report.ok:
                return report
    return report


def _verify_component(c, h, p, cone, roots, inverses, k, winner_of, report):
    src, tgt = c.source, c.target
    n_cone = len(cone)
    in_cone = (lambda y: y[:n_cone] == cone)
    background = canonical_completion(src, h, p, {})
    alt_background = {x: src.children(x)[-1] for x in own_positions(src, h, p)}
    per_root = [list(enumerate_reduced_moves(src, h, p, root=r)) for r in roots]
    seen: list[dict] = [dict() for _ in range(h + 1)]
    tgt_own = [y for y in own_positions(tgt, h, p) if in_cone(y)]
    for idx, parts in enumerate(itertools.product(*per_root)):
        part: dict[Node, int] = {}
        for piece in parts:
            part.update(piece)
        moves = dict(background)
        moves.update(part)
        sigma = Strategy.from_moves(p, moves)
        report.strategies[p] += 1
        try:
            image = c.phi.apply(p, sigma)
        except LiftStranded as exc:
            report.stranded += 1
            report.fail(f"lift stranded for player {p}: {exc}", sigma)
            return
        if n_cone and idx % 8 == 0:
            # the split relies on fiber locality; probe it with another background
            other = dict(alt_background)
            other.update(part)
            try:
                image2 = c.phi.apply(p, Strategy.from_moves(p, other))
            except LiftStranded as exc:
                report.stranded += 1
                report.fail(f"lift stranded for player {p}: {exc}", sigma)
                return
            if any(image.move(y) != image2.move(y) for y in tgt_own):
                report.fail(f"strategy map is not fiber-local below {node_str(cone)}", sigma)
                return
        out_moves = image.moves
        for y in tgt_own:
            a = out_moves.get(y)
            if a is None or y + (a,) not in tgt:
                report.fail(f"image strategy has no legal move at {node_str(y)}", sigma)
                return
        # lifting
        lifted = {c.pi.mapping[x] for x in consistent_leaves(sigma, src, h) if in_cone(c.pi.mapping[x])}
        plays = {y for y in consistent_leaves(image, tgt, h) if in_cone(y)}
        missing = plays - lifted
        if missing:
            report.fail(f"play {node_str(min(missing))} of φ(σ) has no lift", (sigma, min(missing)))
            return
        # k-clause
        for y in tgt_own:
            if len(y) < k:
                x = inverses[y]
                expect = c.pi.mapping[x + (moves[x],)][-1]
                if out_moves[y] != expect:
                    report.fail(f"φ(σ) is not induced by π at {node_str(y)}", sigma)
                    return
        # locality
        for n in range(h + 1):
            key = frozenset((x, a) for x, a in part.items() if len(x) < n)
            val = frozenset((y, out_moves[y]) for y in tgt_own if len(y) < n)
            prev = seen[n].setdefault(key, val)
            if prev != val:
                report.fail(f"locality fails at level {n}", sigma)
                return
        if winner_of is not None:
            target_win, source_win = winner_of
            leaves = [x for x in consistent_leaves(sigma, src, h) if in_cone(c.pi.mapping[x])]
            if all(source_win[x] == (p == Player.ZERO) for x in leaves):
                won = all(target_win[y] == (p == Player.ZERO) for y in plays)
                if not won:
                    report.fail("a winning strategy transferred to a losing one", sigma)
                    return
                report.winning_transferred += 1


# -- limits ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoveringSystem:
    """A finite chain of coverings; ``coverings[i]`` maps stage i+1 onto stage i."""

    coverings: tuple
    schedule: tuple | None = None

    def __post_init__(self):
        for i in range(len(self.coverings) - 1):
            if self.coverings[i].pi.source != self.coverings[i + 1].pi.target:
                raise MorphismMismatch(f"coverings {i} and {i + 1} do not chain")
        if self.schedule is None:
            object.__setattr__(self, "schedule", tuple(cv.k for cv in self.coverings))

    @property
    def stages(self) -> list[Tree]:
        return [self.coverings[0].target] + [cv.source for cv in self.coverings]

    def inverse_system(self) -> InverseSystem:
        return InverseSystem.finite(self.stages, [cv.pi for cv in self.coverings], self.schedule)


def extend_limit_covering(sys: CoveringSystem, h: int, i: int) -> Covering:
    """The covering from the limit onto stage i, through the stabilized stage."""
    if not sys.coverings:
        raise ValueError("empty system")
    lim = limit_tree(sys.inverse_system(), h)
    n = lim.representative
    stages = sys.stages
    if lim.tree != stages[n]:
        raise ValueError("limit must be read off a stage of depth equal to the horizon")
    if n <= i:
        cov = identity_covering(stages[i], h)
        return Covering(cov.pi, cov.phi, sys.schedule[i] if i < len(sys.schedule) else h, h)
    cov = sys.coverings[n - 1]
    for j in range(n - 2, i - 1, -1):
        cov = compose_coverings(sys.coverings[j], cov)
    return Covering(cov.pi, cov.phi, sys.schedule[i], h)
