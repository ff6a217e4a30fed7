"""Finite-horizon Gale-Stewart games, coverings between game trees, and unravelings."""

from .borel import ClosedGen, Complement, CylinderGen, Union, eval_code, solve_borel, unravel_code
from .coverings import Covering, StrategyMap, transfer, verify_covering
from .games import Borel, Clopen, Closed, Game, Open, Player
from .solver import backward_induction, defensive_quasistrategy, winning_region
from .strategies import PreStrategy, QuasiStrategy, Strategy, is_winning
from .treecat import TreeMorphism, fixing_level, limit_tree
from .trees import Tree, full_tree, sub_at
from .unravel import build_unravel_covering, check_preimage_clopen

__all__ = [
    "Borel", "Clopen", "Closed", "ClosedGen", "Complement", "Covering", "CylinderGen", "Game",
    "Open", "Player", "PreStrategy", "QuasiStrategy", "Strategy", "StrategyMap", "Tree",
    "TreeMorphism", "Union", "backward_induction", "build_unravel_covering", "check_preimage_clopen",
    "defensive_quasistrategy", "eval_code", "fixing_level", "full_tree", "is_winning", "limit_tree",
    "solve_borel", "sub_at", "transfer", "unravel_code", "verify_covering", "winning_region",
]
