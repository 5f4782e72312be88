"""Dynamic games with unawareness: normal forms, dominance procedures and rationalizability."""
from .elimination import Mutations, iterate
from .model import GameForest, load_game, parse_game, partial_game, validate_forest
from .normal_form import GeneralizedNormalForm, build_gnf
from .rationalizability import Oracle, efr_levels, pr_levels, prr_levels
from .strategies import PartialStrategy, StrategyUniverse

__all__ = [
    "GameForest", "GeneralizedNormalForm", "Mutations", "Oracle", "PartialStrategy", "StrategyUniverse",
    "build_gnf", "efr_levels", "iterate", "load_game", "parse_game", "partial_game", "pr_levels", "prr_levels",
    "validate_forest",
]
