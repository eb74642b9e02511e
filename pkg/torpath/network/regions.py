"""Geographic regions and the inter-region latency model."""
from typing import Iterator, List, Mapping, Sequence, Tuple
import enum
import itertools
import logging
import networkx
from sortedcontainers import SortedKeyList

from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)


class RegionId(enum.Enum):
    NORTH_AMERICA = 'north_america'
    EUROPE = 'europe'
    ASIA = 'asia'
    REST_OF_WORLD = 'rest_of_world'

    @property
    def index(self) -> int:
        return REGIONS.index(self)


REGIONS = tuple(RegionId)

RegionTriple = Tuple[RegionId, RegionId, RegionId]

DEFAULT_LATENCIES = {
    (RegionId.NORTH_AMERICA, RegionId.NORTH_AMERICA): 20.0,
    (RegionId.EUROPE, RegionId.EUROPE): 20.0,
    (RegionId.ASIA, RegionId.ASIA): 20.0,
    (RegionId.REST_OF_WORLD, RegionId.REST_OF_WORLD): 20.0,
    (RegionId.NORTH_AMERICA, RegionId.EUROPE): 45.0,
    (RegionId.NORTH_AMERICA, RegionId.ASIA): 80.0,
    (RegionId.NORTH_AMERICA, RegionId.REST_OF_WORLD): 70.0,
    (RegionId.EUROPE, RegionId.ASIA): 90.0,
    (RegionId.EUROPE, RegionId.REST_OF_WORLD): 60.0,
    (RegionId.ASIA, RegionId.REST_OF_WORLD): 75.0,
}


class LatencyMatrix:

    """Symmetric region-to-region latency table, in milliseconds.

    The table is stored as an undirected graph over the four regions;
    intra-region latencies are self-loops, so symmetry holds by construction.

    :param latencies: mapping of region pairs to latency; every unordered
        pair (including each region with itself) must be present
    """

    def __init__(self, latencies: Mapping[Tuple[RegionId, RegionId], float] = DEFAULT_LATENCIES):
        self.__graph = networkx.Graph()
        self.__graph.add_nodes_from(REGIONS)
        for (a, b), value in latencies.items():
            value = float(value)
            if not value > 0:
                raise InvalidParameter(f"latency {a.value}-{b.value}",
                                       f"{value} is not positive")
            if self.__graph.has_edge(a, b) and self.__graph[a][b]['latency'] != value:
                raise InvalidParameter(f"latency {a.value}-{b.value}",
                                       "asymmetric values given")
            self.__graph.add_edge(a, b, latency=value)
        for a, b in itertools.combinations_with_replacement(REGIONS, 2):
            if not self.__graph.has_edge(a, b):
                raise InvalidParameter(f"latency {a.value}-{b.value}", "missing entry")
        self.__triples = None

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> 'LatencyMatrix':
        """Build a matrix from a 4x4 array in region enumeration order."""
        if len(rows) != len(REGIONS) or any(len(row) != len(REGIONS) for row in rows):
            raise InvalidParameter("latency matrix", "expected a 4x4 array")
        latencies = dict()
        for i, j in itertools.product(range(len(REGIONS)), repeat=2):
            if rows[i][j] != rows[j][i]:
                raise InvalidParameter(f"latency {REGIONS[i].value}-{REGIONS[j].value}",
                                       "asymmetric values given")
            latencies[(REGIONS[i], REGIONS[j])] = rows[i][j]
        return cls(latencies)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float],
                     base: 'LatencyMatrix' = None) -> 'LatencyMatrix':
        """Build a matrix from ``"region_a-region_b": ms`` entries.

        Entries not given are taken from ``base`` (the default matrix if None).
        """
        base = base if base is not None else cls()
        latencies = {(a, b): base(a, b)
                     for a, b in itertools.combinations_with_replacement(REGIONS, 2)}
        for key, value in mapping.items():
            try:
                a, b = (RegionId(name.strip()) for name in key.split('-'))
            except ValueError:
                raise InvalidParameter("latency key", f"'{key}' is not 'region-region'")
            latencies.pop((b, a), None)
            latencies[(a, b)] = value
        return cls(latencies)

    def __call__(self, a: RegionId, b: RegionId) -> float:
        return self.__graph[a][b]['latency']

    def __eq__(self, other: 'LatencyMatrix') -> bool:
        return self.to_rows() == other.to_rows()

    def to_rows(self) -> List[List[float]]:
        return [[self(a, b) for b in REGIONS] for a in REGIONS]

    @property
    def smallest(self) -> float:
        return min(d['latency'] for _, _, d in self.__graph.edges(data=True))

    def triple_cost(self, triple: RegionTriple) -> float:
        rg, rm, re = triple
        return self(rg, rm) + self(rm, re)

    def triples_by_cost(self) -> SortedKeyList:
        """All 64 region triples, cheapest first.

        Ties keep the enumeration order (north america, europe, asia,
        rest of world) of the triple's guard, middle and exit regions.
        """
        if self.__triples is None:
            self.__triples = SortedKeyList(
                ((self.triple_cost(t), order, t)
                 for order, t in enumerate(itertools.product(REGIONS, repeat=3))),
                key=lambda entry: (entry[0], entry[1]))
        return self.__triples

    def min_triple_cost(self) -> float:
        return self.triples_by_cost()[0][0]

    def __iter__(self) -> Iterator[Tuple[RegionId, RegionId, float]]:
        for a, b in itertools.product(REGIONS, repeat=2):
            yield a, b, self(a, b)


def region_latency(matrix: LatencyMatrix, a: RegionId, b: RegionId) -> float:
    return matrix(a, b)
