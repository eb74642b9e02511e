from typing import Callable, Dict

from .base import SelectionContext
from .bandwidth import select_random
from .congestion import select_congestion_aware
from .geographic import select_geo_diversity, select_geo_latency
from .guard import select_guard
from .kinds import StrategyKind
from ..circuit.circuit import Circuit

SELECTORS: Dict[StrategyKind, Callable[[SelectionContext], Circuit]] = {
    StrategyKind.RANDOM: select_random,
    StrategyKind.GUARD: select_guard,
    StrategyKind.CONGESTION_AWARE: select_congestion_aware,
    StrategyKind.GEO_LATENCY: select_geo_latency,
    StrategyKind.GEO_DIVERSITY: select_geo_diversity,
}


def select(kind: StrategyKind, ctx: SelectionContext) -> Circuit:
    """Build one circuit with the given strategy."""
    return SELECTORS[kind](ctx)
