"""Exhaustive invariant sweeps at small alphabet and horizon, run by ``selftest``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from . import corpus
from .borel import minimal_horizon, solve_borel
from .coverings import Covering, fiber_tracking_phi, identity_covering, verify_covering
from .formats import dump_game, parse_game_file
from .games import Borel, Closed, Game, Player, to_clopen
from .solver import NoDefensiveStrategy, backward_induction, defensive_quasistrategy
from .strategies import Strategy, is_winning, own_positions
from .treecat import (compose, enumerate_morphisms, fixing_level, is_k_fixing, level_functor_check,
                      letterwise, limit_tree)
from .trees import count_trees, enumerate_trees, full_tree, sub_at
from .unravel import build_unravel_covering, check_preimage_clopen


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    def expect(self, ok: bool, what: str):
        self.checked += 1
        if not ok:
            self.failures.append(what)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        return f"suite {self.name}: {self.checked} checked, {len(self.failures)} falsified"


def suite_trees(max_a: int, max_h: int) -> SuiteResult:
    r = SuiteResult("trees")
    for a in range(1, max_a + 1):
        for d in range(0, max_h + 1):
            if count_trees(a, d) > 20000:
                continue
            trees = enumerate_trees(a, d)
            r.expect(len(trees) == count_trees(a, d), f"tree count a={a} d={d}")
            for t in trees:
                for x in t.nodes:
                    r.expect(all(x + y in t for y in sub_at(t, x).nodes), f"sub_at {t!r} at {x}")
    return r


def suite_zermelo(max_a: int, max_h: int, rng: random.Random) -> SuiteResult:
    r = SuiteResult("zermelo")
    for a in range(2, min(max_a, 2) + 1):
        for h in range(1, min(max_h, 3) + 1):
            leaves = a ** h
            games = corpus.all_clopen_games(a, h) if leaves <= 8 else corpus.random_clopen_games(rng, a, h, 60)
            for g in games:
                sol = backward_induction(g)
                zero, one = corpus.exhaustive_winners(g)
                r.expect(zero != one, f"determinacy/uniqueness on {dump_game(g)}")
                r.expect((sol.winner == Player.ZERO) == zero, f"winner on {dump_game(g)}")
                r.expect(is_winning(sol.strategy, g), f"solver strategy loses on {dump_game(g)}")
    return r


def suite_defensive(max_a: int, max_h: int, rng: random.Random) -> SuiteResult:
    r = SuiteResult("defensive")
    for g in corpus.random_closed_games(rng, max_a, max_h, 40):
        try:
            q = defensive_quasistrategy(g)
        except NoDefensiveStrategy:
            r.expect(backward_induction(g).winner == Player.ONE, "defensive construction refused a zero win")
            continue
        for _ in range(5):
            s = random_refinement(q, g, rng)
            r.expect(is_winning(s, g), f"defensive refinement loses on {dump_game(g)}")
    return r


def random_refinement(q, g: Game, rng: random.Random) -> Strategy:
    moves = {}
    for x in own_positions(g.tree, g.horizon, q.player):
        allowed = sorted(q.allowed(x)) or list(g.tree.children(x))
        moves[x] = rng.choice(allowed)
    return Strategy.from_moves(q.player, moves)


def suite_limits(max_a: int, max_h: int) -> SuiteResult:
    r = SuiteResult("limits")
    sys = corpus.three_stage_system()
    r.expect(sys.validate(), "fixture system invalid")
    for depth in range(4):
        lim = limit_tree(sys, depth)
        for i, proj in lim.projections.items():
            want = min(sys.schedule(i) if i < 3 else depth, depth)
            r.expect(is_k_fixing(proj, want), f"projection {i} at depth {depth}")
        for n in range(depth + 1):
            r.expect(level_functor_check(sys, n, depth), f"level {n} at depth {depth}")
    trees = [t for t in enumerate_trees(2, min(max_h, 2)) if t.nodes]
    for s in trees:
        for t in trees:
            for f in enumerate_morphisms(s, t):
                for u in trees:
                    for g in enumerate_morphisms(t, u):
                        r.expect(fixing_level(compose(g, f)) >= min(fixing_level(g), fixing_level(f)),
                                 "composite fixing")
    return r


def suite_coverings(max_a: int, max_h: int) -> SuiteResult:
    r = SuiteResult("coverings")
    for a in range(1, min(max_a, 2) + 1):
        for h in range(1, min(max_h, 3) + 1):
            t = full_tree(a, h)
            r.expect(verify_covering(identity_covering(t, h)).ok, f"identity a={a} h={h}")
            swap = letterwise(t, t, lambda c: a - 1 - c)
            cov = Covering(swap, fiber_tracking_phi(swap, h), h, h)
            r.expect(verify_covering(cov).ok, f"letter swap a={a} h={h}")
    return r


def suite_unravel(max_a: int, max_h: int) -> SuiteResult:
    r = SuiteResult("unravel")
    for h in range(2, min(max_h, 3) + 1):
        t = full_tree(2, h)
        for gens in corpus.closed_generator_sets(2, h, 1):
            g = Game(t, h, Closed(gens))
            u, cov = build_unravel_covering(g, 0)
            r.expect(check_preimage_clopen(u), f"preimage not clopen for {sorted(gens)} at H={h}")
            r.expect(all(u.tree.children(x) for x in u.tree.level(1)), "unpruned at the special move")
            check = verify_covering(cov, game=g)
            r.expect(check.ok, f"covering check for {sorted(gens)} at H={h}: {check.failure}")
            sol = backward_induction(u.game())
            r.expect(sol.winner == backward_induction(g).winner, "unraveled winner")
            r.expect(is_winning(cov.phi.apply(sol.winner, sol.strategy), g), "transfer of the solution")
    return r


def suite_borel(max_a: int, max_h: int) -> SuiteResult:
    r = SuiteResult("borel")
    for code in corpus.borel_code_corpus(2, min(max_h, 3)):
        h = minimal_horizon(code)
        if h > max_h:
            continue
        g = Game(full_tree(2, h), h, Borel(code))
        report = solve_borel(g)
        r.expect(report.agrees, f"pipeline disagrees with the oracle on {code!r}")
    return r


def suite_formats(max_a: int, max_h: int, rng: random.Random) -> SuiteResult:
    r = SuiteResult("formats")
    games = list(corpus.random_closed_games(rng, max_a, max_h, 20))
    games += corpus.random_clopen_games(rng, 2, min(max_h, 3), 10)
    for g in games:
        r.expect(parse_game_file(dump_game(g)) == g, "round trip")
        r.expect(backward_induction(to_clopen(g)).winner == backward_induction(g).winner,
                 "winner changes under clopen expansion")
    return r


SUITES: dict[str, Callable] = {
    "trees": lambda a, h, rng: suite_trees(a, h),
    "zermelo": suite_zermelo,
    "defensive": suite_defensive,
    "limits": lambda a, h, rng: suite_limits(a, h),
    "coverings": lambda a, h, rng: suite_coverings(a, h),
    "unravel": lambda a, h, rng: suite_unravel(a, h),
    "borel": lambda a, h, rng: suite_borel(a, h),
    "formats": suite_formats,
}


def run_selftest(max_a: int, max_h: int, seed: int = 0, only=None, out=print) -> bool:
    rng = random.Random(seed)
    ok = True
    for name, suite in SUITES.items():
        if only and name not in only:
            continue
        result = suite(max_a, max_h, rng)
        out(result.line())
        for failure in result.failures[:5]:
            out(f"  falsified: {failure}")
        ok = ok and result.ok
    return ok
