"""Command-line entry point.

Exit statuses: 0 success, 1 a checked property was falsified, 2 usage or
parse error, 3 an enumeration cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .borel import HorizonTooSmall, PipelineFalsified, solve_borel
from .caps import CapExceeded
from .coverings import BudgetExceeded, Covering, verify_covering
from .formats import (FormatError, parse_game_file, parse_strategy_file,
                      read_unravel_bundle, write_unravel_bundle)
from .games import Borel, Closed, Open, to_clopen
from .selftest import SUITES, run_selftest
from .solver import backward_induction
from .strategies import is_winning, strategy_subtree
from .treecat import fixing_level
from .trees import format_node
from .unravel import (PruningFailure, Unraveling, build_unravel_covering, check_preimage_clopen,
                      invalid_positions, preimage_decision_depth, unravel_strategy_map)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def cmd_solve(args) -> int:
    g = parse_game_file(_read(args.file))
    if args.pipeline and isinstance(g.payoff, Borel):
        report = solve_borel(g)
        winner, strategy = report.winner, report.base_strategy
    else:
        base = to_clopen(g) if isinstance(g.payoff, Borel) else g
        sol = backward_induction(base)
        winner, strategy = sol.winner, sol.strategy
    reach = strategy_subtree(strategy, g.tree, g.horizon).nodes
    table = {format_node(x): a for x, a in sorted(strategy.moves.items()) if x in reach}
    if args.json:
        print(json.dumps({"winner": int(winner), "strategy": table}))
    else:
        moves = "; ".join(f"{x or 'ε'} -> {a}" for x, a in table.items())
        print(f"winner: {int(winner)}" + (f"; {moves}" if moves else ""))
    return EXIT_OK


def cmd_verify_strategy(args) -> int:
    g = parse_game_file(_read(args.file))
    s = parse_strategy_file(_read(args.strategy), g)
    if is_winning(s, g):
        print(f"winning for player {int(s.player)}")
        return EXIT_OK
    print(f"not winning for player {int(s.player)}")
    return EXIT_FALSIFIED


def _summary(u, covering_k: int) -> dict:
    return {
        "k": u.k,
        "covering_k": covering_k,
        "fixing_level": fixing_level(u.pi),
        "decision_depth": preimage_decision_depth(u),
        "letters": len(u.letters),
        "nodes": len(u.tree.nodes),
    }


def cmd_unravel(args) -> int:
    g = parse_game_file(_read(args.file))
    if isinstance(g.payoff, Open):
        print("open payoffs are unraveled through their closed complement; pass the closed game", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(g.payoff, Closed):
        print("unravel needs a closed payoff", file=sys.stderr)
        return EXIT_USAGE
    if not 2 * args.k + 1 < g.horizon:
        print(f"need 2k+1 < horizon, got k={args.k}, horizon={g.horizon}", file=sys.stderr)
        return EXIT_USAGE
    u, cov = build_unravel_covering(g, args.k)
    summary = _summary(u, cov.k)
    write_unravel_bundle(Path(args.out), u, summary)
    print(json.dumps(summary))
    return EXIT_OK if check_preimage_clopen(u) else EXIT_FALSIFIED


def cmd_verify_covering(args) -> int:
    u, summary = read_unravel_bundle(Path(args.dir))
    bad = invalid_positions(u)
    if bad:
        print(f"falsified: stored position {bad[0]} is not a valid extension")
        return EXIT_FALSIFIED
    rebuilt = Unraveling(u.base_game, u.k).build()
    if {u.position(x) for x in u.tree.nodes} != {rebuilt.position(x) for x in rebuilt.tree.nodes}:
        print("falsified: stored tree differs from the unraveling of the base game")
        return EXIT_FALSIFIED
    expected = _summary(u, u.k)
    for key in ("fixing_level", "decision_depth"):
        if summary.get(key) != expected[key]:
            print(f"falsified: summary {key} is {summary.get(key)}, recomputed {expected[key]}")
            return EXIT_FALSIFIED
    if not check_preimage_clopen(u):
        print("falsified: pulled-back payoff is not decided after the special moves")
        return EXIT_FALSIFIED
    cov = Covering(u.pi, unravel_strategy_map(u), u.k, u.horizon)
    report = verify_covering(cov, game=u.base_game, budget=args.budget)
    counts = {int(p): n for p, n in report.strategies.items()}
    if not report.ok:
        print(f"falsified: {report.failure}")
        return EXIT_FALSIFIED
    print(f"covering verified: strategies {counts}, winning transferred {report.winning_transferred}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    only = args.suite or None
    ok = run_selftest(args.max_alphabet, args.max_horizon, seed=args.seed, only=only)
    print("selftest passed" if ok else "selftest FALSIFIED")
    return EXIT_OK if ok else EXIT_FALSIFIED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="galestewart", description="Finite-horizon Gale-Stewart games and unravelings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="winner and winning strategy by backward induction")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--pipeline", action="store_true", help="solve Borel payoffs through the unraveling pipeline")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify-strategy", help="check that a strategy file wins the game")
    p.add_argument("file")
    p.add_argument("strategy")
    p.set_defaults(func=cmd_verify_strategy)

    p = sub.add_parser("unravel", help="unravel a closed game and write a bundle")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_unravel)

    p = sub.add_parser("verify-covering", help="re-check a bundle written by unravel")
    p.add_argument("dir")
    p.add_argument("--budget", type=int, default=None, help="strategy enumeration budget")
    p.set_defaults(func=cmd_verify_covering)

    p = sub.add_parser("selftest", help="run the exhaustive invariant suites")
    p.add_argument("--max-alphabet", type=int, default=2)
    p.add_argument("--max-horizon", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.set_defaults(func=cmd_selftest)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HorizonTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, BudgetExceeded) as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PruningFailure, PipelineFalsified) as exc:
        print(f"falsified: {exc}")
        return EXIT_FALSIFIED


def main() -> None:
    sys.exit(run_command())
