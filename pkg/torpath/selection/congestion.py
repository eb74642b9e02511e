"""Congestion-aware selection."""
from typing import List
import logging
import math
from sortedcontainers import SortedKeyList

from .base import SelectionContext, Triple, assemble, selection
from .kinds import StrategyKind
from ..errors import CircuitBuildFailure
from ..network.relay import Role, ROLES

LOGGER = logging.getLogger(__name__)


def congestion_score(bandwidth_kbps: float, congestion: float) -> float:
    return bandwidth_kbps * (1.0 - congestion)


def ranked_candidates(ctx: SelectionContext, role: Role) -> SortedKeyList:
    """Uncongested candidates of a position, best score first (ties by id)."""
    topology = ctx.topology
    threshold = topology.params.congestion_threshold
    ranking = SortedKeyList(key=lambda entry: (-entry[0], entry[1]))
    for relay_id in ctx.eligible(role):
        relay = topology[relay_id]
        if relay.congestion < threshold:
            ranking.add((congestion_score(relay.bandwidth_kbps, relay.congestion), relay_id))
    return ranking


def top_quartile(ctx: SelectionContext, role: Role) -> List[int]:
    def compute() -> List[int]:
        ranking = ranked_candidates(ctx, role)
        if not ranking:
            return []
        size = max(1, math.ceil(len(ranking) * ctx.topology.params.quartile_fraction))
        LOGGER.debug("%s: %d uncongested, top %d kept", role.value, len(ranking), size)
        return [relay_id for _, relay_id in ranking[:size]]
    # congestion only changes between epochs, so per-epoch ranking is per-circuit ranking
    return ctx.cached(('top-quartile', role), compute)


@selection(StrategyKind.CONGESTION_AWARE)
def select_congestion_aware(ctx: SelectionContext) -> Triple:
    """Uniform choice among the top quartile of uncongested relays per hop.

    Relays with congestion at or above the threshold are excluded; the
    rest are ranked by bandwidth x (1 - congestion).
    """
    quartiles = [top_quartile(ctx, role) for role in ROLES]
    for role, candidates in zip(ROLES, quartiles):
        if not candidates:
            raise CircuitBuildFailure(StrategyKind.CONGESTION_AWARE.value,
                                      f"every {role.value} relay is congested")
    rng = ctx.rng

    def picker(candidates: List[int]):
        return lambda: candidates[int(rng.integers(len(candidates)))]

    return assemble(ctx, StrategyKind.CONGESTION_AWARE, tuple(picker(c) for c in quartiles))
