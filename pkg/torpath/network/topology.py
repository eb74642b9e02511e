"""Synthetic relay populations."""
from typing import Any, Dict, Iterator, List, Optional, Tuple
from collections import Counter
import logging
import math
import numpy

from .params import ModelParameters
from .regions import LatencyMatrix, RegionId, REGIONS
from .relay import Relay, Role, ROLES
from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)

MIN_RELAYS = 10
# relays per generation batch; each batch draws from its own stream, so the
# value is part of every generated population
GENERATION_BATCH = 2500
SEED_MASK = 0xFFFFFFFFFFFFFFFF
# 10.0.0.0 onwards, one /16 per prefix index
PREFIX_BASE = 0x0A00


class NetworkTopology:

    """Relay population, latency matrix and role indexes.

    Only congestion changes after generation (see :func:`update_congestion`);
    every other attribute is read-shared by strategy evaluations.

    :param relays: relays, with ids dense in [0, N)
    :param latency: region latency matrix
    :param rng_seed: seed the topology was generated from
    :param params: model parameters the topology was generated with
    """

    def __init__(self, relays: List[Relay], latency: LatencyMatrix,
                 rng_seed: int, params: Optional[ModelParameters] = None,
                 congestion_epoch: int = 0):
        if [r.id for r in relays] != list(range(len(relays))):
            raise InvalidParameter("relay ids", "must be dense in [0, N) and ordered")
        self.__relays = relays
        self.__latency = latency
        self.__rng_seed = int(rng_seed)
        self.__params = params if params is not None else ModelParameters()
        self.__congestion_epoch = congestion_epoch
        self.__role_index = {role: tuple(r.id for r in relays if r.role == role)
                             for role in ROLES}
        # Columnar copies of the immutable attributes for vectorised selection
        self.__bandwidth = numpy.array([r.bandwidth_kbps for r in relays], dtype=float)
        self.__region = numpy.array([r.region.index for r in relays], dtype=int)
        self.__as_number = numpy.array([r.as_number for r in relays], dtype=numpy.int64)
        self.__prefix = numpy.array([r.prefix16 for r in relays], dtype=numpy.int64)

    def __len__(self) -> int:
        return len(self.__relays)

    def __iter__(self) -> Iterator[Relay]:
        return iter(self.__relays)

    def __getitem__(self, relay_id: int) -> Relay:
        return self.__relays[relay_id]

    def __eq__(self, other: 'NetworkTopology') -> bool:
        return (self.__rng_seed == other.__rng_seed
                and self.__latency == other.__latency
                and self.__relays == other.__relays)

    @property
    def relays(self) -> List[Relay]:
        return self.__relays

    @property
    def latency(self) -> LatencyMatrix:
        return self.__latency

    @property
    def role_index(self) -> Dict[Role, Tuple[int, ...]]:
        return self.__role_index

    @property
    def rng_seed(self) -> int:
        return self.__rng_seed

    @property
    def params(self) -> ModelParameters:
        return self.__params

    @property
    def congestion_epoch(self) -> int:
        """Number of congestion updates applied so far."""
        return self.__congestion_epoch

    @property
    def bandwidths(self) -> numpy.ndarray:
        return self.__bandwidth

    @property
    def regions(self) -> numpy.ndarray:
        """Region enumeration index of each relay."""
        return self.__region

    @property
    def as_numbers(self) -> numpy.ndarray:
        return self.__as_number

    @property
    def prefixes(self) -> numpy.ndarray:
        return self.__prefix

    def congestions(self) -> numpy.ndarray:
        return numpy.array([r.congestion for r in self.__relays], dtype=float)

    def eligible(self, role: Role, port: Optional[int] = None,
                 region: Optional[RegionId] = None) -> List[int]:
        """Ids of relays that can fill the position of a given role.

        :param port: for exits, only those whose policy permits the port
        :param region: only relays located in that region
        """
        relays = self.__relays
        return [i for i in self.__role_index[role]
                if (port is None or role != Role.EXIT or relays[i].permits(port))
                and (region is None or relays[i].region == region)]

    def role_counts(self) -> Dict[Role, int]:
        return {role: len(ids) for role, ids in self.__role_index.items()}

    def region_counts(self, role: Role) -> Dict[RegionId, int]:
        counts = Counter(self.__relays[i].region for i in self.__role_index[role])
        return {region: counts.get(region, 0) for region in REGIONS}

    def set_congestion(self, values: numpy.ndarray):
        for relay, value in zip(self.__relays, values):
            relay.congestion = value
        self.__congestion_epoch += 1

    def to_json(self) -> Dict[str, Any]:
        return {
            'rng_seed': self.__rng_seed,
            'congestion_epoch': self.__congestion_epoch,
            'latency': self.__latency.to_rows(),
            'relays': [r.to_dict() for r in self.__relays],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any],
                  params: Optional[ModelParameters] = None) -> 'NetworkTopology':
        return cls([Relay.from_dict(r) for r in data['relays']],
                   LatencyMatrix.from_rows(data['latency']),
                   data['rng_seed'], params,
                   congestion_epoch=data.get('congestion_epoch', 0))


def role_counts_for(n_relays: int, params: ModelParameters) -> Dict[Role, int]:
    """Role counts of a generated population.

    Guard and exit counts are rounded half up; the residue goes to middles.
    """
    guards = math.floor(params.guard_fraction * n_relays + 0.5)
    exits = math.floor(params.exit_fraction * n_relays + 0.5)
    return {Role.GUARD: guards, Role.MIDDLE: n_relays - guards - exits, Role.EXIT: exits}


def _sample_congestion(rng: numpy.random.Generator, size: int,
                       load_factor: float, params: ModelParameters) -> numpy.ndarray:
    mean = params.congestion_mean(load_factor)
    alpha = params.congestion_concentration * mean
    beta = params.congestion_concentration * (1.0 - mean)
    return numpy.clip(rng.beta(alpha, beta, size=size), 0.0, 1.0)


def generate_topology(n_relays: int, seed: int,
                      params: Optional[ModelParameters] = None) -> NetworkTopology:
    """Generate a synthetic relay population.

    Roles are laid out by a seeded permutation, then relay attributes are
    drawn in batches of ``GENERATION_BATCH`` relays, each batch with its
    own child random stream.

    :param n_relays: population size, at least 10
    :param seed: 64-bit seed; equal (n_relays, seed, params) give equal topologies
    """
    params = params if params is not None else ModelParameters()
    if n_relays < MIN_RELAYS:
        raise InvalidParameter("relay count",
                               f"{n_relays} < {MIN_RELAYS} cannot populate all three roles")
    seed = int(seed) & SEED_MASK
    counts = role_counts_for(n_relays, params)
    if min(counts.values()) < 1:
        raise InvalidParameter("relay count", f"{n_relays} leaves a role empty")

    root = numpy.random.SeedSequence(seed)
    layout_seq, address_seq, *batch_seqs = root.spawn(
        2 + -(-n_relays // GENERATION_BATCH))

    layout_rng = numpy.random.default_rng(layout_seq)
    roles = numpy.array([Role.GUARD] * counts[Role.GUARD]
                        + [Role.MIDDLE] * counts[Role.MIDDLE]
                        + [Role.EXIT] * counts[Role.EXIT], dtype=object)
    roles = roles[layout_rng.permutation(n_relays)]

    address_rng = numpy.random.default_rng(address_seq)
    n_prefixes = max(1, int(round(n_relays / params.prefix_divisor)))
    n_as = max(1, n_relays // params.as_divisor)
    prefixes = address_rng.integers(0, n_prefixes, size=n_relays)
    hosts = address_rng.integers(1, 0xFFFF, size=n_relays)
    as_numbers = address_rng.integers(1, n_as + 1, size=n_relays)

    relays = []
    for batch, batch_seq in enumerate(batch_seqs):
        start = batch * GENERATION_BATCH
        stop = min(n_relays, start + GENERATION_BATCH)
        relays.extend(_generate_batch(numpy.random.default_rng(batch_seq),
                                      start, roles[start:stop],
                                      prefixes, hosts, as_numbers, params))
        LOGGER.debug("generated relays [%d, %d)", start, stop)

    topology = NetworkTopology(relays, params.latency, seed, params)
    LOGGER.info("Topology of %d relays (seed %d): %s", n_relays, seed,
                {role.value: n for role, n in topology.role_counts().items()})
    return topology


def _generate_batch(rng: numpy.random.Generator, start: int, roles: numpy.ndarray,
                    prefixes: numpy.ndarray, hosts: numpy.ndarray,
                    as_numbers: numpy.ndarray, params: ModelParameters) -> List[Relay]:
    size = len(roles)
    bandwidth = numpy.empty(size)
    uptime = numpy.empty(size)
    for role in ROLES:
        mask = roles == role
        median, sigma = params.bandwidth[role]
        bandwidth[mask] = rng.lognormal(numpy.log(median), sigma, size=int(mask.sum()))
        uptime[mask] = rng.exponential(params.mean_uptime_hours[role], size=int(mask.sum()))
    regions = rng.choice(len(REGIONS), size=size, p=params.region_probabilities)
    congestion = _sample_congestion(rng, size, 0.0, params)
    extra = rng.random((size, len(params.extra_exit_ports))) < params.extra_exit_port_probability

    relays = []
    for k in range(size):
        relay_id = start + k
        role = roles[k]
        ports = ()
        if role == Role.EXIT:
            ports = set(params.exit_ports)
            ports.update(p for p, accepted in zip(params.extra_exit_ports, extra[k]) if accepted)
        ipv4 = ((PREFIX_BASE + int(prefixes[relay_id])) << 16) | int(hosts[relay_id])
        relays.append(Relay(relay_id, role,
                            bandwidth_kbps=float(bandwidth[k]),
                            region=REGIONS[regions[k]],
                            uptime_hours=float(uptime[k]),
                            stability=float(uptime[k] / (uptime[k] + params.stability_scale_hours)),
                            congestion=float(congestion[k]),
                            as_number=int(as_numbers[relay_id]),
                            ipv4=ipv4,
                            exit_ports=ports))
    return relays


def update_congestion(topology: NetworkTopology, load_factor: float, seed_step: int):
    """Redraw every relay's congestion for a new update epoch.

    Values are drawn i.i.d. from a Beta distribution whose mean grows with
    the load factor; the draw depends only on (topology seed, seed_step).

    :param load_factor: users per relay; nonpositive values are clamped to
        a small epsilon (idle network)
    :param seed_step: update step number
    """
    load_factor = max(float(load_factor), numpy.finfo(float).eps)
    rng = numpy.random.default_rng(
        numpy.random.SeedSequence([topology.rng_seed, int(seed_step) & SEED_MASK, 0xC0]))
    values = _sample_congestion(rng, len(topology), load_factor, topology.params)
    topology.set_congestion(values)
    LOGGER.debug("congestion step %d (load %.2f): mean %.3f",
                 seed_step, load_factor, float(values.mean()))
