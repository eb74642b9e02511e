"""Shared machinery of the path-selection strategies."""
from typing import Any, Callable, Hashable, List, Optional, Sequence, Set, Tuple
import functools
import logging
import time
import numpy

from .kinds import StrategyKind
from ..circuit.circuit import Circuit, make_circuit
from ..errors import CircuitBuildFailure, InvalidParameter, NoCandidates
from ..network.regions import RegionId
from ..network.relay import Role
from ..network.topology import NetworkTopology

LOGGER = logging.getLogger(__name__)

Triple = Tuple[int, int, int]
Picker = Callable[[], int]

GUARD, MIDDLE, EXIT = 0, 1, 2


class WeightedPool:

    """Candidates with positive weights, sampled by inverse CDF.

    Cumulative weights are computed once; each draw is a binary search,
    so a pool can be reused for every circuit of a run.
    """

    def __init__(self, candidates: Sequence[int], weights: Sequence[float], position: str = ''):
        if len(candidates) == 0:
            raise NoCandidates(position or 'any')
        if len(weights) != len(candidates):
            raise InvalidParameter("weights", "must match the candidates one to one")
        weights = numpy.asarray(weights, dtype=float)
        if not numpy.all(weights > 0):
            raise InvalidParameter("weights", "must all be positive")
        self.__candidates = numpy.asarray(candidates, dtype=numpy.int64)
        self.__cumulative = numpy.cumsum(weights)

    def __len__(self) -> int:
        return len(self.__candidates)

    @property
    def candidates(self) -> numpy.ndarray:
        return self.__candidates

    @property
    def total(self) -> float:
        return float(self.__cumulative[-1])

    def draw(self, rng: numpy.random.Generator) -> int:
        index = numpy.searchsorted(self.__cumulative, rng.random() * self.total, side='right')
        return int(self.__candidates[min(index, len(self.__candidates) - 1)])


def weighted_sample(candidates: Sequence[int], weights: Sequence[float],
                    rng: numpy.random.Generator) -> int:
    """Pick one candidate with probability weights[i] / sum(weights)."""
    return WeightedPool(candidates, weights).draw(rng)


def passes_diversity(topology: NetworkTopology, guard_id: int,
                     middle_id: int, exit_id: int) -> bool:
    """True iff the three relays have pairwise distinct ids, AS numbers and /16s."""
    return not conflicting_positions(topology, (guard_id, middle_id, exit_id))


def conflicting_positions(topology: NetworkTopology, triple: Triple) -> Set[int]:
    """Positions to resample so that the triple may become diverse.

    A middle clashing with the guard is resampled, and so is an exit
    clashing with the guard. When the middle and the exit clash, both are
    resampled. The guard never is.
    """
    ases = topology.as_numbers
    prefixes = topology.prefixes

    def clash(a: int, b: int) -> bool:
        return a == b or ases[a] == ases[b] or prefixes[a] == prefixes[b]

    g, m, e = triple
    positions = set()
    if clash(g, m):
        positions.add(MIDDLE)
    if clash(m, e):
        positions.update((MIDDLE, EXIT))
    if clash(g, e):
        positions.add(EXIT)
    return positions


class SelectionContext:

    """Per-run selection state: topology, random stream and strategy state.

    A context lives for one (scenario, strategy) run; its caches assume the
    topology's bandwidths never change, and are keyed on the congestion
    epoch where congestion matters.

    :param topology: read-shared relay population
    :param rng: random stream of this run
    :param target_port: port the exit must permit
    :param network_relays: size of the network the topology stands for,
        when it is a scaled-down sample of it
    """

    def __init__(self, topology: NetworkTopology,
                 rng: numpy.random.Generator,
                 target_port: Optional[int] = None,
                 retry_budget: Optional[int] = None,
                 network_relays: Optional[int] = None):
        self.__topology = topology
        self.__rng = rng
        self.__network_relays = network_relays if network_relays is not None else len(topology)
        params = topology.params
        self.__target_port = target_port if target_port is not None else params.target_port
        self.__retry_budget = retry_budget if retry_budget is not None else params.retry_budget
        self.__pools = dict()
        self.__cache = dict()
        self.__state = None

    @classmethod
    def seeded(cls, topology: NetworkTopology, seed: int, **kwargs) -> 'SelectionContext':
        return cls(topology, numpy.random.default_rng(seed), **kwargs)

    @property
    def topology(self) -> NetworkTopology:
        return self.__topology

    @property
    def rng(self) -> numpy.random.Generator:
        return self.__rng

    @property
    def state(self) -> Any:
        """Strategy-private state, kept across the circuits of a run."""
        return self.__state

    @state.setter
    def state(self, state: Any):
        self.__state = state

    @property
    def target_port(self) -> int:
        return self.__target_port

    @property
    def retry_budget(self) -> int:
        return self.__retry_budget

    @property
    def network_relays(self) -> int:
        return self.__network_relays

    def eligible(self, role: Role, region: Optional[RegionId] = None) -> List[int]:
        return self.__topology.eligible(role, port=self.__target_port, region=region)

    def pool(self, role: Role, region: Optional[RegionId] = None) -> Optional[WeightedPool]:
        """Bandwidth-weighted pool for a position, None when it has no candidate."""
        key = (role, region)
        if key not in self.__pools:
            ids = self.eligible(role, region)
            self.__pools[key] = (WeightedPool(ids, self.__topology.bandwidths[ids], role.value)
                                 if ids else None)
        return self.__pools[key]

    def cached(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """Memoize ``compute()`` for the current congestion epoch."""
        entry = self.__cache.get(key)
        epoch = self.__topology.congestion_epoch
        if entry is None or entry[0] != epoch:
            entry = (epoch, compute())
            self.__cache[key] = entry
        return entry[1]


def assemble(ctx: SelectionContext, strategy: StrategyKind,
             pickers: Tuple[Picker, Picker, Picker],
             guard_id: Optional[int] = None) -> Triple:
    """Draw a triple and resample clashing positions until it is diverse.

    :param pickers: one sampler per position
    :param guard_id: fixed guard; its picker is then never called
    :raises CircuitBuildFailure: when the retry budget is exhausted
    """
    pick_guard, pick_middle, pick_exit = pickers
    triple = [guard_id if guard_id is not None else pick_guard(), pick_middle(), pick_exit()]
    for attempt in range(1, ctx.retry_budget + 1):
        positions = conflicting_positions(ctx.topology, tuple(triple))
        if not positions:
            LOGGER.debug("diverse triple %s after %d attempt(s)", triple, attempt)
            return tuple(triple)
        if attempt == ctx.retry_budget:
            break
        if MIDDLE in positions:
            triple[MIDDLE] = pick_middle()
        if EXIT in positions:
            triple[EXIT] = pick_exit()
    raise CircuitBuildFailure(strategy.value,
                              f"no diverse triple within {ctx.retry_budget} attempts")


def selection(kind: StrategyKind):
    """Turn a triple-selection function into a circuit selector.

    The selector times the selection and returns a Circuit.
    """
    def decorator(fun: Callable[[SelectionContext], Triple]) -> Callable[[SelectionContext], Circuit]:
        @functools.wraps(fun)
        def selector(ctx: SelectionContext) -> Circuit:
            tic = time.perf_counter_ns()
            guard_id, middle_id, exit_id = fun(ctx)
            toc = time.perf_counter_ns()
            circuit = make_circuit(ctx.topology, kind, guard_id, middle_id, exit_id,
                                   build_time_us=(toc - tic) // 1000)
            LOGGER.debug("%s", circuit)
            return circuit
        return selector
    return decorator
