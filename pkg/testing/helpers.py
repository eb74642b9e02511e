"""Hand-built relay populations for the test suites."""
from typing import Iterable, List, Optional

from torpath.network.params import ModelParameters
from torpath.network.regions import LatencyMatrix, RegionId
from torpath.network.relay import Relay, Role
from torpath.network.topology import NetworkTopology, PREFIX_BASE


def relay(relay_id: int, role: Role, bandwidth: float = 500.0,
          region: RegionId = RegionId.EUROPE, congestion: float = 0.1,
          as_number: Optional[int] = None, prefix: Optional[int] = None,
          ports: Optional[Iterable[int]] = None, stability: float = 0.5) -> Relay:
    """A relay whose AS and /16 default to values unique to its id."""
    if ports is None:
        ports = (80, 443) if role == Role.EXIT else ()
    as_number = relay_id + 1 if as_number is None else as_number
    prefix = relay_id if prefix is None else prefix
    return Relay(relay_id, role, bandwidth, region,
                 uptime_hours=720.0 * stability / (1.0 - stability),
                 stability=stability, congestion=congestion,
                 as_number=as_number, ipv4=((PREFIX_BASE + prefix) << 16) | 1,
                 exit_ports=ports)


def topology_of(relays: List[Relay], seed: int = 0,
                params: Optional[ModelParameters] = None) -> NetworkTopology:
    params = params if params is not None else ModelParameters()
    return NetworkTopology(relays, LatencyMatrix(), seed, params)


def trio(**kwargs) -> NetworkTopology:
    """One guard, one middle and one exit, pairwise diverse."""
    return topology_of([relay(0, Role.GUARD, **kwargs),
                        relay(1, Role.MIDDLE, **kwargs),
                        relay(2, Role.EXIT, **kwargs)])
