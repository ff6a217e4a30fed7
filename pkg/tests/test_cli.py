import json

import pytest

from galestewart import corpus
from galestewart.borel import Union
from galestewart.cli import run_command
from galestewart.formats import (FormatError, dump_game, format_strategy, parse_game_file, parse_strategy_file)
from galestewart.games import Borel, Clopen, Closed, Game, Open, to_clopen
from galestewart.solver import backward_induction
from galestewart.trees import full_tree

G_CYL = '{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"clopen": ["00", "01"]}}'
G_MATCH = '{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"clopen": ["00", "11"]}}'


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_parse_examples():
    g = parse_game_file(G_CYL)
    assert g == Game(full_tree(2, 2), 2, Clopen(frozenset({(0, 0), (0, 1)})))
    with pytest.raises(FormatError, match="node 0"):
        parse_game_file('{"alphabet": 2, "horizon": 2, "tree": ["", "0"], "payoff": {"clopen": []}}')
    b = parse_game_file('{"alphabet": 2, "horizon": 2, "tree": "full", '
                        '"payoff": {"borel": {"union": [{"cyl": "00"}, {"cyl": "11"}]}}}')
    assert isinstance(b.payoff, Borel) and isinstance(b.payoff.code, Union)


def test_parse_errors_are_positioned():
    with pytest.raises(FormatError) as info:
        parse_game_file('{"alphabet": 2,\n "horizon": }')
    assert info.value.line == 2 and info.value.column is not None


@pytest.mark.parametrize("text,match", [
    ('{"alphabet": 2, "horizon": 2, "tree": "full"}', "payoff"),
    ('{"alphabet": 11, "horizon": 2, "tree": "full", "payoff": {"clopen": []}}', "alphabet"),
    ('{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"clopen": ["02"]}}', "outside the alphabet"),
    ('{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"weird": []}}', "unknown payoff"),
    ('{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"borel": {"cyl": "000"}}}', "not a node"),
])
def test_validation_errors(text, match):
    with pytest.raises(FormatError, match=match):
        parse_game_file(text)


def test_round_trip_fixtures():
    import random
    rng = random.Random(3)
    games = corpus.random_closed_games(rng, 3, 3, 15) + corpus.random_clopen_games(rng, 2, 3, 5)
    games.append(Game(full_tree(2, 3), 3, Open({(1, 0)})))
    games += [Game(full_tree(2, 4), 4, Borel(c)) for c in corpus.borel_code_corpus(2, 2)[::37]]
    for g in games:
        assert parse_game_file(dump_game(g)) == g


def test_strategy_files(files):
    g = parse_game_file(G_CYL)
    s = parse_strategy_file("player: 0\nε -> 0\n", g)
    assert s.move(()) == 0
    assert parse_strategy_file(format_strategy(s, g), g) == s
    with pytest.raises(FormatError, match="line 2"):
        parse_strategy_file("player: 0\n0 -> 1\n", g)
    with pytest.raises(FormatError):
        parse_strategy_file("player: 2\n", g)


def test_solve_command(files, capsys):
    assert run_command(["solve", files("g_cyl.json", G_CYL)]) == 0
    assert capsys.readouterr().out.strip() == "winner: 0; ε -> 0"
    assert run_command(["solve", files("g_match.json", G_MATCH)]) == 0
    assert capsys.readouterr().out.startswith("winner: 1")
    assert run_command(["solve", "--json", files("m.json", G_MATCH)]) == 0
    assert json.loads(capsys.readouterr().out)["winner"] == 1


def test_solve_borel_through_pipeline(files, capsys):
    text = '{"alphabet": 2, "horizon": 4, "tree": "full", "payoff": {"borel": {"union": [{"cyl": "00"}, {"cyl": "11"}]}}}'
    assert run_command(["solve", "--pipeline", files("b.json", text)]) == 0
    assert capsys.readouterr().out.startswith("winner: 1")


def test_solve_winner_invariant_under_clopen_expansion(files, capsys):
    g = Game(full_tree(2, 3), 3, Closed({(1,), (0, 0, 1)}))
    run_command(["solve", files("closed.json", dump_game(g))])
    closed_out = capsys.readouterr().out.split(";")[0]
    run_command(["solve", files("clopen.json", dump_game(to_clopen(g)))])
    assert capsys.readouterr().out.split(";")[0] == closed_out


def test_verify_strategy_command(files):
    game = files("g.json", G_CYL)
    assert run_command(["verify-strategy", game, files("s0.txt", "player: 0\nε -> 0\n")]) == 0
    assert run_command(["verify-strategy", game, files("s1.txt", "player: 0\nε -> 1\n")]) == 1


def test_usage_and_parse_errors(files):
    assert run_command([]) == 2
    assert run_command(["solve", files("bad.json", "{")]) == 2
    assert run_command(["solve", "/nonexistent/game.json"]) == 2
    bad_tree = '{"alphabet": 2, "horizon": 2, "tree": ["", "0"], "payoff": {"clopen": []}}'
    assert run_command(["solve", files("unpruned.json", bad_tree)]) == 2


def test_unravel_and_verify_covering(tmp_path, files, capsys):
    game = files("c.json", '{"alphabet": 2, "horizon": 3, "tree": "full", "payoff": {"closed": ["1"]}}')
    out = tmp_path / "bundle"
    assert run_command(["unravel", game, "--k", "0", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fixing_level"] == 0 and summary["decision_depth"] <= 2
    assert run_command(["verify-covering", str(out)]) == 0
    assert run_command(["verify-covering", str(out), "--budget", "10"]) == 3


def test_mutated_bundle_is_falsified(tmp_path, files):
    game = files("c.json", '{"alphabet": 2, "horizon": 3, "tree": "full", "payoff": {"closed": ["01"]}}')
    out = tmp_path / "bundle"
    run_command(["unravel", game, "--out", str(out)])
    body = json.loads((out / "unraveled.json").read_text())
    # drop every leaf under one special response of player one
    victim = next(x for x in body["nodes"] if len(x) == 2)
    body["nodes"] = [x for x in body["nodes"] if x[:2] != victim]
    (out / "unraveled.json").write_text(json.dumps(body))
    assert run_command(["verify-covering", str(out)]) == 1


def test_mutated_letter_is_falsified(tmp_path, files):
    game = files("c.json", '{"alphabet": 2, "horizon": 3, "tree": "full", "payoff": {"closed": ["1"]}}')
    out = tmp_path / "bundle"
    run_command(["unravel", game, "--out", str(out)])
    body = json.loads((out / "unraveled.json").read_text())
    letter = next(d for d in body["letters"] if d["depth"] == 1)
    letter["base"] = 1 - letter["base"]
    (out / "unraveled.json").write_text(json.dumps(body))
    assert run_command(["verify-covering", str(out)]) == 1


def test_unravel_rejects_non_closed(files):
    assert run_command(["unravel", files("g.json", G_CYL), "--out", "x"]) == 2
    closed = '{"alphabet": 2, "horizon": 2, "tree": "full", "payoff": {"closed": ["1"]}}'
    assert run_command(["unravel", files("c.json", closed), "--k", "1", "--out", "x"]) == 2


def test_cap_exceeded_exit(files, monkeypatch):
    monkeypatch.setenv("GS_CAPS", "5")
    game = files("c.json", '{"alphabet": 2, "horizon": 3, "tree": "full", "payoff": {"closed": ["1"]}}')
    assert run_command(["unravel", game, "--out", "x"]) == 3


def test_selftest_single_suite(capsys):
    assert run_command(["selftest", "--suite", "zermelo", "--max-horizon", "2"]) == 0
    out = capsys.readouterr().out
    assert "suite zermelo:" in out and "0 falsified" in out
