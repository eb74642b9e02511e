"""Region-driven strategies: latency-optimized and diversity-optimized."""
from typing import List, Sequence, Set
import logging

from .base import SelectionContext, Triple, WeightedPool, assemble, selection, weighted_sample
from .kinds import StrategyKind
from ..errors import CircuitBuildFailure
from ..network.regions import REGIONS, RegionId, RegionTriple
from ..network.relay import Role, ROLES

LOGGER = logging.getLogger(__name__)


def feasible_triples(ctx: SelectionContext) -> List[RegionTriple]:
    """Region triples with an eligible relay for every hop, cheapest first."""
    def compute() -> List[RegionTriple]:
        return [triple for _, _, triple in ctx.topology.latency.triples_by_cost()
                if all(ctx.pool(role, region) is not None
                       for role, region in zip(ROLES, triple))]
    return ctx.cached('feasible-triples', compute)


@selection(StrategyKind.GEO_LATENCY)
def select_geo_latency(ctx: SelectionContext) -> Triple:
    """Bandwidth-weighted hops inside the cheapest feasible region triple.

    Diversity retries stay inside the triple; on exhaustion the next
    cheapest feasible triple is used.
    """
    rng = ctx.rng
    for triple in feasible_triples(ctx):
        pools = [ctx.pool(role, region) for role, region in zip(ROLES, triple)]
        try:
            return assemble(ctx, StrategyKind.GEO_LATENCY,
                            tuple(_drawer(pool, rng) for pool in pools))
        except CircuitBuildFailure:
            LOGGER.debug("region triple %s exhausted", [r.value for r in triple])
    raise CircuitBuildFailure(StrategyKind.GEO_LATENCY.value,
                              "no feasible region triple yields a diverse circuit")


def _drawer(pool: WeightedPool, rng):
    return lambda: pool.draw(rng)


def sample_region(ctx: SelectionContext, role: Role,
                  preferences: Sequence[Set[RegionId]],
                  strategy: StrategyKind = StrategyKind.GEO_DIVERSITY) -> RegionId:
    """Region for a hop, weighted by its eligible population.

    :param preferences: successively weaker sets of regions to avoid; the
        first one leaving a populated region wins
    """
    for excluded in preferences:
        regions = [r for r in REGIONS
                   if r not in excluded and ctx.pool(role, r) is not None]
        if regions:
            weights = [len(ctx.pool(role, r)) for r in regions]
            return REGIONS[weighted_sample([r.index for r in regions], weights, ctx.rng)]
    raise CircuitBuildFailure(strategy.value, f"no eligible {role.value} relay")


@selection(StrategyKind.GEO_DIVERSITY)
def select_geo_diversity(ctx: SelectionContext) -> Triple:
    """Hops in pairwise distinct regions whenever the population allows it.

    Regions are drawn guard, then middle, then exit, each excluding the
    regions already used; hops are bandwidth-weighted within their region.
    """
    rng = ctx.rng
    guard_region = sample_region(ctx, Role.GUARD, [set()])
    middle_region = sample_region(ctx, Role.MIDDLE, [{guard_region}, set()])
    exit_region = sample_region(ctx, Role.EXIT,
                                [{guard_region, middle_region}, {middle_region}, set()])
    LOGGER.debug("regions %s %s %s", guard_region.value, middle_region.value, exit_region.value)
    pools = [ctx.pool(role, region)
             for role, region in zip(ROLES, (guard_region, middle_region, exit_region))]
    return assemble(ctx, StrategyKind.GEO_DIVERSITY, tuple(_drawer(pool, rng) for pool in pools))
