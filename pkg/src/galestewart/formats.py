"""JSON game files, strategy files and unraveled-game bundles."""

from __future__ import annotations

import json
from pathlib import Path

from . import borel
from .games import Borel, Clopen, Closed, Game, InvalidGame, Open, Player, is_position
from .strategies import Strategy, canonical_completion, own_positions
from .treecat import TreeMorphism
from .trees import InvalidTree, Tree, format_node, full_tree, parse_node, tree_from_nodes
from .unravel import UnravelGame, UnravelLetter, Unraveling

MAX_FILE_ALPHABET = 10


class FormatError(ValueError):
    """Malformed or invalid input; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.column = column


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None


def _node(s, alphabet: int):
    if not isinstance(s, str):
        raise FormatError(f"node must be a digit string, got {s!r}")
    try:
        x = parse_node(s)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if any(a >= alphabet for a in x):
        raise FormatError(f"node {s!r} uses a letter outside the alphabet of size {alphabet}")
    return x


def _nodes(items, alphabet: int, what: str):
    if not isinstance(items, list):
        raise FormatError(f"{what} must be a list of node strings")
    return [_node(s, alphabet) for s in items]


# -- borel codes -------------------------------------------------------------


def code_from_dict(d, alphabet: int):
    if not isinstance(d, dict) or len(d) != 1:
        raise FormatError(f"a Borel code is an object with one key, got {d!r}")
    (kind, body), = d.items()
    if kind == "cyl":
        return borel.CylinderGen(_node(body, alphabet))
    if kind == "closed":
        return borel.ClosedGen(_nodes(body, alphabet, "closed generators"))
    if kind == "complement":
        return borel.Complement(code_from_dict(body, alphabet))
    if kind == "union":
        if not isinstance(body, list) or not body:
            raise FormatError("a union needs a nonempty list of codes")
        return borel.Union(tuple(code_from_dict(c, alphabet) for c in body))
    raise FormatError(f"unknown Borel code kind {kind!r}")


def code_to_dict(code) -> dict:
    if isinstance(code, borel.CylinderGen):
        return {"cyl": format_node(code.node)}
    if isinstance(code, borel.ClosedGen):
        return {"closed": [format_node(x) for x in sorted(code.generators)]}
    if isinstance(code, borel.Complement):
        return {"complement": code_to_dict(code.child)}
    if isinstance(code, borel.Union):
        return {"union": [code_to_dict(c) for c in code.children]}
    raise TypeError(f"unknown code {code!r}")


# -- games -------------------------------------------------------------------


def game_from_dict(d) -> Game:
    if not isinstance(d, dict):
        raise FormatError("a game file holds a JSON object")
    missing = [key for key in ("alphabet", "horizon", "tree", "payoff") if key not in d]
    if missing:
        raise FormatError(f"missing field {missing[0]!r}")
    alphabet, horizon = d["alphabet"], d["horizon"]
    if not isinstance(alphabet, int) or not 1 <= alphabet <= MAX_FILE_ALPHABET:
        raise FormatError(f"alphabet must be an integer between 1 and {MAX_FILE_ALPHABET}")
    if not isinstance(horizon, int) or horizon < 1:
        raise FormatError("horizon must be a positive integer")
    try:
        if d["tree"] == "full":
            tree = full_tree(alphabet, horizon)
        else:
            tree = tree_from_nodes(alphabet, horizon, _nodes(d["tree"], alphabet, "tree"))
        payoff = d["payoff"]
        if not isinstance(payoff, dict) or len(payoff) != 1:
            raise FormatError("payoff must be an object with exactly one of clopen/closed/open/borel")
        (kind, body), = payoff.items()
        if kind == "clopen":
            p = Clopen(frozenset(_nodes(body, alphabet, "clopen accept list")))
        elif kind == "closed":
            p = Closed(frozenset(_nodes(body, alphabet, "closed generators")))
        elif kind == "open":
            p = Open(frozenset(_nodes(body, alphabet, "open generators")))
        elif kind == "borel":
            p = Borel(code_from_dict(body, alphabet))
        else:
            raise FormatError(f"unknown payoff kind {kind!r}")
        game = Game(tree, horizon, p)
        if isinstance(p, Borel):
            borel.check_code(p.code, tree, horizon)
        return game
    except (InvalidGame, InvalidTree, borel.InvalidCode) as exc:
        raise FormatError(str(exc)) from None


def parse_game_file(text: str) -> Game:
    return game_from_dict(_load_json(text))


def game_to_dict(g: Game) -> dict:
    a = g.tree.alphabet_size
    if g.tree == full_tree(a, g.horizon):
        tree = "full"
    else:
        tree = [format_node(x) for x in g.tree.sorted_nodes]
    p = g.payoff
    if isinstance(p, Clopen):
        payoff = {"clopen": [format_node(x) for x in sorted(p.accept)]}
    elif isinstance(p, Closed):
        payoff = {"closed": [format_node(x) for x in sorted(p.generators)]}
    elif isinstance(p, Open):
        payoff = {"open": [format_node(x) for x in sorted(p.generators)]}
    else:
        payoff = {"borel": code_to_dict(p.code)}
    return {"alphabet": a, "horizon": g.horizon, "tree": tree, "payoff": payoff}


def dump_game(g: Game) -> str:
    return json.dumps(game_to_dict(g), indent=2)


# -- strategies --------------------------------------------------------------


def parse_strategy_file(text: str, g: Game) -> Strategy:
    """``player: P`` then ``node -> letter`` lines; '#' starts a comment."""
    player = None
    moves = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if player is None:
            key, _, val = line.partition(":")
            if key.strip() != "player" or val.strip() not in ("0", "1"):
                raise FormatError("first line must be 'player: 0' or 'player: 1'", lineno, 1)
            player = Player(int(val))
            continue
        lhs, arrow, rhs = line.partition("->")
        if not arrow:
            raise FormatError("expected 'node -> letter'", lineno, 1)
        lhs = lhs.strip()
        x = () if lhs in ("", "ε") else _node(lhs, g.tree.alphabet_size)
        try:
            a = int(rhs.strip())
        except ValueError:
            raise FormatError(f"letter must be an integer, got {rhs.strip()!r}", lineno, raw.index("->") + 3) from None
        if x not in g.tree or len(x) >= g.horizon or not is_position(x, player):
            raise FormatError(f"{format_node(x) or 'ε'} is not a position of player {player}", lineno, 1)
        if x + (a,) not in g.tree:
            raise FormatError(f"letter {a} is not a legal move at {format_node(x) or 'ε'}", lineno, 1)
        moves[x] = a
    if player is None:
        raise FormatError("empty strategy file")
    return Strategy.from_moves(player, canonical_completion(g.tree, g.horizon, player, moves))


def format_strategy(s: Strategy, g: Game, reachable_only: bool = True) -> str:
    from .strategies import strategy_subtree

    keep = strategy_subtree(s, g.tree, g.horizon).nodes if reachable_only else None
    lines = [f"player: {int(s.player)}"]
    for x in own_positions(g.tree, g.horizon, s.player):
        if keep is None or x in keep:
            lines.append(f"{format_node(x) or 'ε'} -> {s.move(x)}")
    return "\n".join(lines) + "\n"


# -- unraveled bundles -------------------------------------------------------


def letter_to_dict(a: UnravelLetter) -> dict:
    return {"base": a.base, "depth": a.aux.depth_bound,
            "aux": [format_node(x) for x in a.aux.sorted_nodes]}


def letter_from_dict(d, alphabet: int) -> UnravelLetter:
    try:
        aux = tree_from_nodes(alphabet, d["depth"], _nodes(d["aux"], alphabet, "aux"))
        return UnravelLetter(int(d["base"]), aux)
    except (KeyError, TypeError, InvalidTree) as exc:
        raise FormatError(f"malformed unraveled letter {d!r}: {exc}") from None


def write_unravel_bundle(out: Path, u: UnravelGame, summary: dict) -> None:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "base.json").write_text(dump_game(u.base_game) + "\n")
    body = {
        "k": u.k,
        "horizon": u.horizon,
        "letters": [letter_to_dict(a) for a in u.letters],
        "nodes": [list(x) for x in u.tree.sorted_nodes],
    }
    (out / "unraveled.json").write_text(json.dumps(body) + "\n")
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


def read_unravel_bundle(path: Path) -> tuple[UnravelGame, dict]:
    path = Path(path)
    try:
        base = parse_game_file((path / "base.json").read_text())
        body = _load_json((path / "unraveled.json").read_text())
        summary = _load_json((path / "summary.json").read_text())
    except OSError as exc:
        raise FormatError(f"cannot read bundle: {exc}") from None
    if not isinstance(base.payoff, Closed):
        raise FormatError("the base game of an unraveled bundle must be closed")
    alphabet = base.tree.alphabet_size
    try:
        k, horizon = int(body["k"]), int(body["horizon"])
        letters = tuple(letter_from_dict(d, alphabet) for d in body["letters"])
        nodes = [tuple(int(i) for i in x) for x in body["nodes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed unraveled game: {exc}") from None
    if horizon != base.horizon:
        raise FormatError("unraveled horizon differs from the base game's")
    if any(i < 0 or i >= len(letters) for x in nodes for i in x):
        raise FormatError("node refers to an unknown letter")
    try:
        tree = tree_from_nodes(max(len(letters), 1), horizon, nodes)
    except InvalidTree as exc:
        raise FormatError(str(exc)) from None
    pi = TreeMorphism(tree, base.tree, {x: tuple(letters[i].base for i in x) for x in tree.nodes})
    return UnravelGame(base, k, tree, letters, pi, Unraveling(base, k)), summary
