import pytest
from hypothesis import given, settings, strategies as st

from galestewart.borel import (ClosedGen, Complement, CylinderGen, HorizonTooSmall, InvalidCode, Union, check_code,
                               eval_code, minimal_horizon, oracle_winner, required_horizon, solve_borel,
                               unravel_code)
from galestewart.coverings import verify_covering
from galestewart.games import Borel, Clopen, Closed, Game, Player, in_payoff
from galestewart.strategies import is_winning
from galestewart.treecat import fixing_level
from galestewart.trees import full_tree
from galestewart.unravel import build_unravel_covering

UNION_00_11 = Union((CylinderGen((0, 0)), CylinderGen((1, 1))))


def borel_game(code, h=None):
    h = minimal_horizon(code) if h is None else h
    return Game(full_tree(2, h), h, Borel(code))


def test_eval_code_examples():
    assert eval_code(CylinderGen((0,)), (0, 1))
    assert not eval_code(Complement(CylinderGen((0,))), (0, 1))
    assert eval_code(UNION_00_11, (1, 1))
    assert not eval_code(ClosedGen([(1,)]), (1, 0))


def test_required_horizons():
    assert required_horizon(ClosedGen([(1,)])) == 2
    assert required_horizon(Complement(CylinderGen((0,)))) == 2
    assert required_horizon(UNION_00_11) == 4
    assert required_horizon(ClosedGen([]), 1) == 4
    with pytest.raises(HorizonTooSmall):
        unravel_code(borel_game(UNION_00_11, 2), UNION_00_11)


def test_closed_code_delegates_to_unravel_fixture():
    g = borel_game(ClosedGen([(1,)]))
    r = unravel_code(g, ClosedGen([(1,)]))
    u, cov = build_unravel_covering(Game(g.tree, g.horizon, Closed({(1,)})), 0)
    assert r.covering.pi == cov.pi
    assert r.accept == u.preimage_accepts()


def test_complement_reuses_the_covering():
    code = ClosedGen([(1,)])
    g = borel_game(code)
    r = unravel_code(g, code)
    rc = unravel_code(g, Complement(code))
    assert rc.covering is not None and rc.covering.pi == r.covering.pi
    assert rc.accept == frozenset(r.source.level(2)) - r.accept
    rcc = unravel_code(g, Complement(Complement(code)))
    assert rcc.accept == r.accept


def test_union_of_two_cylinders():
    g = borel_game(UNION_00_11)
    r = unravel_code(g, UNION_00_11)
    assert r.covering.k == 0 and r.stages == 3
    for x in r.source.level(4):
        assert (x in r.accept) == eval_code(UNION_00_11, r.covering.pi(x))
    # decided by the last special pair, at 2 * ceil((k + m) / 2) + 2 = 4
    cut = 4
    outcome = {}
    assert all(outcome.setdefault(x[:cut], x in r.accept) == (x in r.accept) for x in r.source.level(4))


def test_union_chain_fixing_schedule():
    r = unravel_code(borel_game(UNION_00_11), UNION_00_11)
    levels = [fixing_level(c.pi) for c in r.chain]
    assert levels[0] >= 0 and levels[1] >= 1 and levels[2] >= 2


def test_solve_borel_examples():
    rep = solve_borel(borel_game(CylinderGen((0,))))
    assert rep.winner == Player.ZERO and rep.base_strategy.move(()) == 0
    rep = solve_borel(borel_game(UNION_00_11))
    assert rep.winner == Player.ONE == rep.oracle_winner
    rep = solve_borel(borel_game(Complement(ClosedGen([]))))
    assert rep.winner == Player.ONE


def test_pipeline_strategy_wins_base_game():
    code = Union((ClosedGen([(0, 1)]), CylinderGen((1, 0, 1))))
    g = borel_game(code)
    rep = solve_borel(g)
    assert is_winning(rep.base_strategy, g)
    assert rep.agrees


def test_atom_coverings_verify():
    for code in (ClosedGen([(1,)]), CylinderGen((0, 1)), Complement(ClosedGen([(0,)]))):
        for h in (2, 3):
            g = borel_game(code, h)
            r = unravel_code(g, code)
            preimage = Game(r.source, h, Clopen(r.accept))
            clopen_g = g.with_payoff(Clopen(frozenset(x for x in g.leaves if eval_code(code, x))))
            check = verify_covering(r.covering, game=clopen_g)
            assert check.ok, check.failure
            assert all((x in r.accept) == in_payoff(clopen_g.payoff, r.covering.pi(x)) for x in preimage.leaves)


def test_check_code():
    t = full_tree(2, 2)
    check_code(UNION_00_11, t, 2)
    with pytest.raises(InvalidCode):
        check_code(CylinderGen((0, 0, 0)), t, 2)
    with pytest.raises(InvalidCode):
        check_code(Complement(Complement(Complement(Complement(ClosedGen([]))))), t, 2)
    with pytest.raises(InvalidCode):
        Union(())


NODES = full_tree(2, 3).sorted_nodes
atoms = st.one_of(st.sampled_from(NODES[1:]).map(CylinderGen),
                  st.frozensets(st.sampled_from(NODES), max_size=2).map(ClosedGen))
codes = st.one_of(atoms, atoms.map(Complement), st.lists(atoms, min_size=1, max_size=2).map(tuple).map(Union))


@settings(max_examples=40, deadline=None)
@given(codes)
def test_pipeline_agrees_with_oracle(code):
    g = borel_game(code)
    rep = solve_borel(g)
    assert rep.winner == oracle_winner(g)


@settings(max_examples=40, deadline=None)
@given(codes)
def test_complement_involution_is_extensional(code):
    g = borel_game(code)
    a = unravel_code(g, code)
    b = unravel_code(g, Complement(Complement(code)))
    assert a.accept == b.accept
