"""Unraveling a closed game into a game whose pulled-back payoff is clopen.

Moves of the unraveled game are pairs ``(letter, tree)``.  The tree records
which continuations the players have committed to:

* before move ``2k`` and after move ``2k+1`` it is forced: the subtree of the
  previous commitment below the letter just played;
* at move ``2k`` player zero commits to a quasistrategy of her own;
* at move ``2k+1`` player one either exhibits a position after which every
  play hits a generator (a *pencil* tree: the path to that position, then
  the full base cone) or commits to a quasistrategy of her own under which
  no joint play hits a generator.

After move ``2k+1`` the winner is known, which is what makes the pulled-back
payoff clopen.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .caps import check_cap
from .coverings import Covering, LiftStranded, StrategyMap, induced_moves
from .games import Closed, Game, Player, hits, in_payoff
from .strategies import Strategy, canonical_completion
from .treecat import TreeMorphism
from .trees import EMPTY, Node, Tree, node_str, sub_at


class PruningFailure(Exception):
    """A position of the unraveled game has no legal continuation."""


@dataclass(frozen=True)
class UnravelLetter:
    base: int
    aux: Tree

    @property
    def sort_key(self):
        return (self.base, self.aux.sort_key)

    def __repr__(self) -> str:
        return f"({self.base}, {self.aux!r})"


def _subsets(items):
    items = list(items)
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)


def quasi_subtrees(r: Tree, offset: int, player: Player) -> list[Tree]:
    """Strategy subtrees of all quasistrategies of ``player`` on ``r``.

    ``r`` is rooted at global length ``offset``, which fixes whose turn
    each of its nodes is.
    """
    if EMPTY not in r:
        return []
    depth = r.depth_bound

    def rec(y: Node) -> list[frozenset]:
        if len(y) >= depth:
            return [frozenset([y])]
        kids = r.children(y)
        if (offset + len(y)) % 2 == player:
            out = []
            for chosen in _subsets(kids):
                for parts in itertools.product(*(rec(y + (c,)) for c in chosen)):
                    out.append(frozenset([y]).union(*parts))
            return out
        return [frozenset([y]).union(*parts) for parts in itertools.product(*(rec(y + (c,)) for c in kids))]

    return [Tree.trusted(r.alphabet_size, depth, ns) for ns in rec(EMPTY)]


def is_quasi_subtree(aux: Tree, r: Tree, offset: int, player: Player) -> bool:
    if aux.depth_bound != r.depth_bound or EMPTY not in aux or not aux.nodes <= r.nodes:
        return False
    for y in aux.nodes:
        if len(y) >= r.depth_bound:
            continue
        kids, allowed = aux.children(y), r.children(y)
        if (offset + len(y)) % 2 == player:
            if not kids:
                return False
        elif kids != allowed:
            return False
    return True


class Unraveling:
    """Move rules of the unraveling of a closed game at parameter k."""

    def __init__(self, game: Game, k: int):
        if not isinstance(game.payoff, Closed):
            raise TypeError("only closed games are unraveled")
        if not 2 * k + 1 < game.horizon:
            raise ValueError(f"need 2k+1 < H, got k={k}, H={game.horizon}")
        self.game = game
        self.k = k
        self.horizon = game.horizon
        self.base = game.tree
        self.generators = game.payoff.generators
        self.special = 2 * k

    @cached_property
    def dead(self) -> frozenset:
        """Base nodes all of whose depth-H leaves hit a generator."""
        out = set()
        for y in sorted(self.base.nodes, key=len, reverse=True):
            if len(y) == self.horizon:
                if hits(self.generators, y):
                    out.add(y)
            elif all(y + (c,) in out for c in self.base.children(y)):
                out.add(y)
        return frozenset(out)

    # -- positions are tuples of UnravelLetter ---------------------------------

    @staticmethod
    def project(x) -> Node:
        return tuple(a.base for a in x)

    def get_tree(self, x) -> Tree:
        return x[-1].aux if x else self.base

    def pencil(self, p: Node, w: Node) -> Tree:
        """Path to w, then every base continuation of p·w."""
        nodes = {w[:i] for i in range(len(w))}
        nodes.update(w + y for y in sub_at(self.base, p + w).nodes)
        return Tree.trusted(self.base.alphabet_size, self.horizon - len(p), nodes)

    def pencil_spine(self, p: Node, aux: Tree) -> Node | None:
        """The position a pencil tree exhibits, or None if aux is not a pencil."""
        w = EMPTY
        while True:
            if w not in aux:
                return None
            if aux == self.pencil(p, w):
                return w
            kids = aux.children(w)
            if len(kids) != 1:
                return None
            w = w + kids

    def winning_condition(self, x, a: UnravelLetter) -> bool:
        """a exhibits a position, first on its path to seal a win for player one."""
        if len(x) != self.special + 1:
            raise ValueError("winning condition is checked at move 2k+1")
        p = self.project(x) + (a.base,)
        r2 = sub_at(self.get_tree(x), (a.base,))
        w = self.pencil_spine(p, a.aux)
        if w is None or w not in r2:
            return False
        if p + w not in self.dead:
            return False
        return not any(p + w[:i] in self.dead for i in range(len(w)))

    def losing_condition(self, x, a: UnravelLetter) -> bool:
        """a is a quasistrategy of player one under which no joint play hits a generator."""
        if len(x) != self.special + 1:
            raise ValueError("losing condition is checked at move 2k+1")
        p = self.project(x) + (a.base,)
        r2 = sub_at(self.get_tree(x), (a.base,))
        if not is_quasi_subtree(a.aux, r2, len(p), Player.ONE):
            return False
        depth = self.horizon - len(p)
        return not any(hits(self.generators, p + y) for y in a.aux.nodes if len(y) == depth)

    def valid_ext(self, x, a: UnravelLetter) -> bool:
        here = self.get_tree(x)
        if (a.base,) not in here:
            return False
        n = len(x)
        if n == self.special:
            r = sub_at(here, (a.base,))
            return is_quasi_subtree(a.aux, r, n + 1, Player.ZERO)
        if n == self.special + 1:
            return self.losing_condition(x, a) or self.winning_condition(x, a)
        return a.aux == sub_at(here, (a.base,))

    def candidates(self, x) -> list[UnravelLetter]:
        """Every letter extending x validly (generated, not searched)."""
        here = self.get_tree(x)
        n = len(x)
        out = []
        for b in here.children(EMPTY):
            r = sub_at(here, (b,))
            if n == self.special:
                out.extend(UnravelLetter(b, s) for s in quasi_subtrees(r, n + 1, Player.ZERO))
            elif n == self.special + 1:
                p = self.project(x) + (b,)
                out.extend(UnravelLetter(b, self.pencil(p, w)) for w in self._first_dead(p, r))
                depth = self.horizon - len(p)
                for theta in quasi_subtrees(r, len(p), Player.ONE):
                    if not any(hits(self.generators, p + y) for y in theta.nodes if len(y) == depth):
                        out.append(UnravelLetter(b, theta))
            else:
                out.append(UnravelLetter(b, r))
        return out

    def _first_dead(self, p: Node, r: Tree) -> list[Node]:
        found, stack = [], [EMPTY]
        while stack:
            w = stack.pop()
            if p + w in self.dead:
                found.append(w)
            else:
                stack.extend(w + (c,) for c in r.children(w))
        return sorted(found)

    def build(self) -> UnravelGame:
        levels = [[()]]
        edges: dict[tuple, list[UnravelLetter]] = {}
        for n in range(self.horizon):
            nxt = []
            for x in levels[-1]:
                letters = list(dict.fromkeys(self.candidates(x)))
                if not letters:
                    raise PruningFailure(
                        f"position {node_str(self.project(x))} at length {n} has no valid extension")
                edges[x] = letters
                nxt.extend(x + (a,) for a in letters)
            check_cap(f"unraveled positions of length {n + 1}", len(nxt))
            levels.append(nxt)
        alphabet = sorted({a for letters in edges.values() for a in letters}, key=lambda a: a.sort_key)
        index = {a: i for i, a in enumerate(alphabet)}
        nodes = [tuple(index[a] for a in x) for level in levels for x in level]
        tree = Tree.trusted(len(alphabet), self.horizon, nodes)
        pi = TreeMorphism(tree, self.base, {x: tuple(alphabet[i].base for i in x) for x in nodes})
        return UnravelGame(self.game, self.k, tree, tuple(alphabet), pi, self)


@dataclass(frozen=True, eq=False)
class UnravelGame:
    base_game: Game
    k: int
    tree: Tree
    letters: tuple
    pi: TreeMorphism
    rules: Unraveling

    @property
    def horizon(self) -> int:
        return self.base_game.horizon

    def position(self, x: Node) -> tuple:
        return tuple(self.letters[i] for i in x)

    def preimage_accepts(self) -> frozenset:
        payoff = self.base_game.payoff
        return frozenset(x for x in self.tree.level(self.horizon) if in_payoff(payoff, self.pi.mapping[x]))

    def game(self) -> Game:
        from .games import Clopen

        return Game(self.tree, self.horizon, Clopen(self.preimage_accepts()))


def check_preimage_clopen(u: UnravelGame) -> bool:
    """Every position just after the special moves has a constant outcome."""
    cut = 2 * u.k + 2
    accepts = u.preimage_accepts()
    outcome: dict[Node, bool] = {}
    for leaf in u.tree.level(u.horizon):
        if outcome.setdefault(leaf[:cut], leaf in accepts) != (leaf in accepts):
            return False
    return True


def unravel_strategy_map(u: UnravelGame) -> StrategyMap:
    """Map strategies of the unraveled game to strategies of the base game.

    The map plays the base game while maintaining a lift of the current
    position.  Player one's special response is resolved in hindsight: the
    lift commits to a quasistrategy as long as the play allows it and
    switches to an exhibited position once the play is steered into one.
    """
    rules = u.rules
    tree, letters, base, H = u.tree, u.letters, rules.base, u.horizon
    e = rules.special
    dead = rules.dead

    def child(lift: Node, pred) -> int | None:
        for a in tree.children(lift):
            if pred(letters[a]):
                return a
        return None

    def forced_child(lift: Node, b: int, sigma, x) -> Node:
        a = child(lift, lambda l: l.base == b)
        if a is None:
            raise LiftStranded(sigma, x, b)
        return lift + (a,)

    def follow(lift: Node, path: Node, sigma, x) -> Node:
        for b in path:
            lift = forced_child(lift, b, sigma, x)
        return lift

    def apply(p: Player, sigma: Strategy) -> Strategy:
        moves: dict[Node, int] = {}

        def own_move(x: Node, lift: Node) -> tuple[int, Node]:
            a = sigma.move(lift)
            if a is None or lift + (a,) not in tree:
                raise LiftStranded(sigma, x, -1)
            b = letters[a].base
            moves[x] = b
            return b, lift + (a,)

        def track(x: Node, lift: Node):
            # lift projects onto x and its continuations are forced or σ-driven
            if len(x) >= H:
                return
            if p == Player.ZERO and len(x) == e + 1:
                return zero_special(x, lift)
            if p == Player.ONE and len(x) == e:
                return one_special(x, lift)
            if len(x) % 2 == p:
                b, nxt = own_move(x, lift)
                track(x + (b,), nxt)
            else:
                for b in base.children(x):
                    track(x + (b,), forced_child(lift, b, sigma, x))

        # player zero: resolve player one's response by an attractor
        def zero_special(x: Node, lift: Node):
            s_tree = letters[lift[-1]].aux
            for b1 in base.children(x):
                p2 = x + (b1,)
                r2 = sub_at(s_tree, (b1,))
                attr = _attractor(r2, len(p2), Player.ZERO, lambda z: p2 + z in dead, H - len(p2))
                ctx = (lift, b1, p2, r2, attr)
                if EMPTY in attr:
                    zero_force(p2, EMPTY, ctx)
                    continue
                theta = _avoiding_subtree(r2, len(p2), Player.ONE, attr)
                a = child(lift, lambda l: l.base == b1 and l.aux == theta)
                if a is None:
                    raise LiftStranded(sigma, x, b1)
                zero_theta(p2, lift + (a,), ctx)

        def zero_theta(x: Node, lift: Node, ctx):
            if len(x) >= H:
                return
            _, _, p2, _, attr = ctx
            if len(x) % 2 == Player.ZERO:
                b, nxt = own_move(x, lift)
                zero_theta(x + (b,), nxt, ctx)
                return
            for b in base.children(x):
                z = x[len(p2):] + (b,)
                if z in attr:
                    zero_force(x + (b,), z, ctx)
                else:
                    zero_theta(x + (b,), forced_child(lift, b, sigma, x), ctx)

        def zero_force(x: Node, z: Node, ctx):
            lift_e1, b1, p2, r2, attr = ctx
            if x in dead:
                pencil = rules.pencil(p2, z)
                a = child(lift_e1, lambda l: l.base == b1 and l.aux == pencil)
                if a is None:
                    raise LiftStranded(sigma, x, b1)
                return track(x, follow(lift_e1 + (a,), z, sigma, x))
            if len(x) >= H:
                raise LiftStranded(sigma, x, -1)
            if len(x) % 2 == Player.ZERO:
                b = next(c for c in r2.children(z) if z + (c,) in attr)
                moves[x] = b
                zero_force(x + (b,), z + (b,), ctx)
            else:
                for b in base.children(x):
                    zero_force(x + (b,), z + (b,), ctx)

        # player one: steer into a position her strategy would exhibit
        def one_special(x: Node, lift: Node):
            for b0 in base.children(x):
                p0 = x + (b0,)
                exhibits: dict[Node, tuple[int, int]] = {}
                for a_s in tree.children(lift):
                    if letters[a_s].base != b0:
                        continue
                    a1 = sigma.move(lift + (a_s,))
                    if a1 is None or lift + (a_s, a1) not in tree:
                        raise LiftStranded(sigma, p0, -1)
                    resp = letters[a1]
                    p2 = p0 + (resp.base,)
                    w = rules.pencil_spine(p2, resp.aux)
                    if w is not None and p2 + w in dead:
                        exhibits.setdefault(p2 + w, (a_s, a1))
                r = sub_at(base, p0)
                attr = _attractor(r, len(p0), Player.ONE, lambda z: p0 + z in exhibits, H - len(p0))
                ctx = (lift, p0, exhibits, attr)
                if EMPTY in attr:
                    one_force(p0, ctx)
                    continue
                s_star = _avoiding_subtree(r, len(p0), Player.ZERO, attr)
                a_s = child(lift, lambda l: l.base == b0 and l.aux == s_star)
                if a_s is None:
                    raise LiftStranded(sigma, x, b0)
                lift_s = lift + (a_s,)
                b1, nxt = own_move(p0, lift_s)
                if rules.pencil_spine(p0 + (b1,), letters[nxt[-1]].aux) is not None \
                        and p0 + (b1,) + rules.pencil_spine(p0 + (b1,), letters[nxt[-1]].aux) in dead:
                    # an exhibited position compatible with a quasistrategy avoiding them all
                    raise LiftStranded(sigma, p0, b1)
                one_theta(p0 + (b1,), nxt, ctx)

        def one_theta(x: Node, lift: Node, ctx):
            if len(x) >= H:
                return
            _, p0, _, attr = ctx
            if len(x) % 2 == Player.ONE:
                b, nxt = own_move(x, lift)
                one_theta(x + (b,), nxt, ctx)
                return
            for b in base.children(x):
                if x[len(p0):] + (b,) in attr:
                    one_force(x + (b,), ctx)
                else:
                    one_theta(x + (b,), forced_child(lift, b, sigma, x), ctx)

        def one_force(x: Node, ctx):
            lift_e, p0, exhibits, attr = ctx
            if x in exhibits:
                a_s, a1 = exhibits[x]
                spine = x[len(p0) + 1:]
                return track(x, follow(lift_e + (a_s, a1), spine, sigma, x))
            if len(x) >= H:
                raise LiftStranded(sigma, x, -1)
            z = x[len(p0):]
            if len(x) % 2 == Player.ONE:
                b = next(c for c in base.children(x) if z + (c,) in attr)
                moves[x] = b
                one_force(x + (b,), ctx)
            else:
                for b in base.children(x):
                    one_force(x + (b,), ctx)

        track(EMPTY, EMPTY)
        below = induced_moves(u.pi, sigma, H, e)
        return Strategy.from_moves(p, canonical_completion(base, H, p, {**below, **moves}))

    return StrategyMap(apply, fiber_local=True, name="unravel")


def _attractor(r: Tree, offset: int, player: Player, target, depth: int) -> frozenset:
    """Nodes of r from which ``player`` forces reaching ``target``."""
    out = set()
    for y in sorted(r.nodes, key=len, reverse=True):
        if target(y):
            out.add(y)
        elif len(y) < depth:
            kids = [y + (c,) for c in r.children(y)]
            if (offset + len(y)) % 2 == player:
                if any(c in out for c in kids):
                    out.add(y)
            elif kids and all(c in out for c in kids):
                out.add(y)
    return frozenset(out)


def _avoiding_subtree(r: Tree, offset: int, player: Player, attr: frozenset) -> Tree:
    """Strategy subtree of ``player`` keeping exactly the moves that stay out of ``attr``."""
    nodes, stack = set(), [EMPTY]
    while stack:
        y = stack.pop()
        nodes.add(y)
        kids = r.children(y)
        if (offset + len(y)) % 2 == player:
            kids = [c for c in kids if y + (c,) not in attr]
        stack.extend(y + (c,) for c in kids)
    return Tree.trusted(r.alphabet_size, r.depth_bound, nodes)


def build_unravel_covering(g: Game, k: int, h: int | None = None) -> tuple[UnravelGame, Covering]:
    """Unravel a closed game at parameter k; the covering is 2k-fixing."""
    if h is not None and h != g.horizon:
        raise ValueError("horizon differs from the game's")
    u = Unraveling(g, k).build()
    return u, Covering(u.pi, unravel_strategy_map(u), k, g.horizon)


def preimage_decision_depth(u: UnravelGame) -> int:
    """Least d such that the pulled-back payoff is constant below every length-d position."""
    accepts = u.preimage_accepts()
    leaves = u.tree.level(u.horizon)
    for d in range(u.horizon + 1):
        outcome: dict[Node, bool] = {}
        if all(outcome.setdefault(x[:d], x in accepts) == (x in accepts) for x in leaves):
            return d
    return u.horizon


def invalid_positions(u: UnravelGame) -> list[Node]:
    """Stored positions that are not valid extensions, or that are left without one."""
    bad = []
    for x in u.tree.sorted_nodes:
        if x and not u.rules.valid_ext(u.position(x[:-1]), u.letters[x[-1]]):
            bad.append(x)
        elif len(x) < u.horizon and not u.tree.children(x):
            bad.append(x)
    return bad
