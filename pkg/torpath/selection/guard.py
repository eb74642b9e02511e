"""Persistent entry guards."""
from typing import Dict, List, Tuple
import logging
import numpy

from .base import Picker, SelectionContext, Triple, assemble, selection
from .bandwidth import position_pools
from .geographic import sample_region
from .kinds import StrategyKind
from ..errors import CircuitBuildFailure
from ..network.relay import Role
from ..network.topology import NetworkTopology, role_counts_for

LOGGER = logging.getLogger(__name__)

GUARD_LIST_SIZE = 3


def composite_scores(topology: NetworkTopology) -> Dict[int, float]:
    """Guard score: mean of the bandwidth percentile among guards and stability.

    The percentile of a guard is the fraction of guards whose bandwidth is
    at most its own, in (0, 1].
    """
    ids = list(topology.role_index[Role.GUARD])
    bandwidths = topology.bandwidths[ids]
    ranks = numpy.searchsorted(numpy.sort(bandwidths), bandwidths, side='right')
    percentiles = ranks / len(ids)
    return {relay_id: 0.5 * float(pct) + 0.5 * topology[relay_id].stability
            for relay_id, pct in zip(ids, percentiles)}


def guard_overflow(topology: NetworkTopology, network_relays: int) -> float:
    """Share of a persistent guard's clients beyond what it can carry.

    Every client of the network picks the same top-scoring guards, so each
    persistent guard takes the client share of ``guards / 3`` ordinary
    guards while it can carry ``params.guard_capacity`` of them.

    :param network_relays: size of the network the topology stands for
    """
    params = topology.params
    guards = role_counts_for(network_relays, params)[Role.GUARD]
    if guards <= 0:
        return 0.0
    return max(0.0, 1.0 - params.guard_capacity * GUARD_LIST_SIZE / guards)


class GuardState:

    """The persistent guard list of one run and how often each guard was used.

    :param overflow: probability that a circuit spills over from its
        saturated guard, see :func:`guard_overflow`
    """

    def __init__(self, guard_ids: List[int], overflow: float = 0.0):
        self.__guards = list(guard_ids)
        self.__uses = {g: 0 for g in self.__guards}
        self.__overflow = overflow

    @classmethod
    def top_scoring(cls, topology: NetworkTopology, overflow: float = 0.0) -> 'GuardState':
        scores = composite_scores(topology)
        if len(scores) < GUARD_LIST_SIZE:
            raise CircuitBuildFailure(StrategyKind.GUARD.value,
                                      f"{len(scores)} guards, {GUARD_LIST_SIZE} needed")
        best = sorted(scores, key=lambda g: (-scores[g], g))[:GUARD_LIST_SIZE]
        LOGGER.info("persistent guards: %s (overflow %.2f)", best, overflow)
        return cls(best, overflow)

    @property
    def guard_ids(self) -> List[int]:
        return list(self.__guards)

    @property
    def use_counts(self) -> Dict[int, int]:
        return dict(self.__uses)

    @property
    def overflow(self) -> float:
        return self.__overflow

    def rotation(self) -> List[int]:
        """Guards from least to most used, ties by lower id."""
        return sorted(self.__guards, key=lambda g: (self.__uses[g], g))

    def record_use(self, guard_id: int):
        self.__uses[guard_id] += 1


def _overflow_pickers(ctx: SelectionContext, guard_id: int) -> Tuple[None, Picker, Picker]:
    # spilled traffic leaves the saturated guard's region
    guard_region = ctx.topology[guard_id].region
    middle_region = sample_region(ctx, Role.MIDDLE, [{guard_region}, set()],
                                  StrategyKind.GUARD)
    exit_region = sample_region(ctx, Role.EXIT,
                                [{guard_region, middle_region}, {middle_region}, set()],
                                StrategyKind.GUARD)
    middles = ctx.pool(Role.MIDDLE, middle_region)
    exits = ctx.pool(Role.EXIT, exit_region)
    rng = ctx.rng
    return (None, lambda: middles.draw(rng), lambda: exits.draw(rng))


@selection(StrategyKind.GUARD)
def select_guard(ctx: SelectionContext) -> Triple:
    """Least-used persistent guard, bandwidth-weighted middle and exit.

    A circuit spilling over from a saturated guard takes its middle and
    exit outside the guard's region, preferring pairwise distinct regions.
    When no diverse middle and exit can be found behind the least-used
    guard, the next guard of the rotation is tried.
    """
    if ctx.state is None:
        ctx.state = GuardState.top_scoring(
            ctx.topology, guard_overflow(ctx.topology, ctx.network_relays))
    state = ctx.state
    _, middles, exits = position_pools(ctx, StrategyKind.GUARD)
    rng = ctx.rng
    for guard_id in state.rotation():
        pickers = (None, lambda: middles.draw(rng), lambda: exits.draw(rng))
        if state.overflow > 0 and rng.random() < state.overflow:
            pickers = _overflow_pickers(ctx, guard_id)
        try:
            triple = assemble(ctx, StrategyKind.GUARD, pickers, guard_id=guard_id)
        except CircuitBuildFailure:
            LOGGER.debug("guard %d: no diverse middle/exit", guard_id)
            continue
        state.record_use(guard_id)
        return triple
    raise CircuitBuildFailure(StrategyKind.GUARD.value,
                              "no diverse middle/exit behind any persistent guard")
