"""Bandwidth-weighted random selection, the baseline strategy."""
import logging

from .base import SelectionContext, Triple, assemble, selection
from .kinds import StrategyKind
from ..errors import CircuitBuildFailure
from ..network.relay import ROLES

LOGGER = logging.getLogger(__name__)


def position_pools(ctx: SelectionContext, strategy: StrategyKind):
    pools = tuple(ctx.pool(role) for role in ROLES)
    for role, pool in zip(ROLES, pools):
        if pool is None:
            raise CircuitBuildFailure(strategy.value, f"no eligible {role.value} relay")
    return pools


@selection(StrategyKind.RANDOM)
def select_random(ctx: SelectionContext) -> Triple:
    """Each hop drawn with probability proportional to its bandwidth."""
    guards, middles, exits = position_pools(ctx, StrategyKind.RANDOM)
    rng = ctx.rng
    return assemble(ctx, StrategyKind.RANDOM,
                    (lambda: guards.draw(rng),
                     lambda: middles.draw(rng),
                     lambda: exits.draw(rng)))
