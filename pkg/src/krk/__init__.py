"""KRK endgame strategy: verification engine and interactive playground."""

from .model import BoardSpec, KRKPosition, Square, Variant, classic8, generalized, pos
from .strategy import MoveKind, StrategyMove, classify, strategy_function

__all__ = [
    "BoardSpec",
    "KRKPosition",
    "Square",
    "Variant",
    "classic8",
    "generalized",
    "pos",
    "MoveKind",
    "StrategyMove",
    "classify",
    "strategy_function",
]
