from typing import Any, Dict, List, Optional, Tuple
import logging
import math

from .metrics import bottleneck_bandwidth, circuit_latency, circuit_efficiency
from ..network.regions import RegionId
from ..network.relay import Role
from ..network.topology import NetworkTopology
from ..selection.kinds import StrategyKind

LOGGER = logging.getLogger(__name__)

POSITIONS = ('guard', 'middle', 'exit')


class Circuit:

    """An ordered (guard, middle, exit) triple and its metrics.

    Besides the metrics, a circuit keeps the region and the congestion of
    each hop as they were at selection time, for later audit.
    Failed attempts are circuits without relays (``success`` is False).
    """

    def __init__(self, strategy: StrategyKind,
                 relays: Optional[Tuple[int, int, int]],
                 bandwidth_kbps: float = 0.0, latency_ms: float = 0.0,
                 efficiency: float = 0.0, build_time_us: int = 0,
                 regions: Optional[Tuple[RegionId, RegionId, RegionId]] = None,
                 congestion: Optional[Tuple[float, float, float]] = None,
                 reason: Optional[str] = None):
        self.__strategy = strategy
        self.__relays = tuple(relays) if relays is not None else None
        self.__bandwidth = bandwidth_kbps
        self.__latency = latency_ms
        self.__efficiency = efficiency
        self.__build_time = max(0, int(build_time_us))
        self.__regions = regions
        self.__congestion = congestion
        self.__reason = reason

    @classmethod
    def failed(cls, strategy: StrategyKind, build_time_us: int, reason: str) -> 'Circuit':
        return cls(strategy, None, build_time_us=build_time_us, reason=reason)

    @property
    def strategy(self) -> StrategyKind:
        return self.__strategy

    @property
    def success(self) -> bool:
        return self.__relays is not None

    @property
    def relays(self) -> Optional[Tuple[int, int, int]]:
        return self.__relays

    @property
    def guard_id(self) -> Optional[int]:
        return self.__relays[0] if self.success else None

    @property
    def middle_id(self) -> Optional[int]:
        return self.__relays[1] if self.success else None

    @property
    def exit_id(self) -> Optional[int]:
        return self.__relays[2] if self.success else None

    @property
    def bandwidth_kbps(self) -> float:
        return self.__bandwidth

    @property
    def latency_ms(self) -> float:
        return self.__latency

    @property
    def efficiency(self) -> float:
        return self.__efficiency

    @property
    def build_time_us(self) -> int:
        return self.__build_time

    @property
    def regions(self) -> Optional[Tuple[RegionId, RegionId, RegionId]]:
        return self.__regions

    @property
    def congestion(self) -> Optional[Tuple[float, float, float]]:
        return self.__congestion

    @property
    def reason(self) -> Optional[str]:
        return self.__reason

    def __str__(self) -> str:
        if not self.success:
            return f"circuit {self.strategy.value} FAILED ({self.reason})"
        return (f"circuit {self.strategy.value} {self.relays} "
                f"B={self.bandwidth_kbps:.1f} L={self.latency_ms:.1f} E={self.efficiency:.3f}")

    def __eq__(self, other: 'Circuit') -> bool:
        # build time is wall-clock and not part of a circuit's identity
        return (self.__strategy == other.__strategy
                and self.__relays == other.__relays
                and self.__bandwidth == other.__bandwidth
                and self.__latency == other.__latency
                and self.__efficiency == other.__efficiency
                and self.__regions == other.__regions
                and self.__congestion == other.__congestion)

    def __hash__(self) -> int:
        return hash((self.__strategy, self.__relays))

    def to_row(self, scenario_id: int) -> Dict[str, Any]:
        """Per-circuit log row."""
        row = {'strategy': self.strategy.value, 'scenario_id': scenario_id}
        for k, position in enumerate(POSITIONS):
            row[f"{position}_id"] = self.__relays[k] if self.success else None
        row['bandwidth_kbps'] = self.bandwidth_kbps if self.success else None
        row['latency_ms'] = self.latency_ms if self.success else None
        row['efficiency'] = self.efficiency if self.success else None
        row['build_time_us'] = self.build_time_us
        row['success'] = self.success
        for k, position in enumerate(POSITIONS):
            row[f"{position}_region"] = self.__regions[k].value if self.__regions else None
            row[f"{position}_congestion"] = self.__congestion[k] if self.__congestion else None
        return row

    @classmethod
    def from_row(cls, row: Dict[str, Any]) -> 'Circuit':
        strategy = StrategyKind(row['strategy'])
        success = row['success'] in (True, 'True', 'true', '1', 1)
        if not success:
            return cls.failed(strategy, int(row['build_time_us']), 'logged failure')
        return cls(strategy,
                   tuple(int(row[f"{p}_id"]) for p in POSITIONS),
                   float(row['bandwidth_kbps']), float(row['latency_ms']),
                   float(row['efficiency']), int(row['build_time_us']),
                   regions=tuple(RegionId(row[f"{p}_region"]) for p in POSITIONS),
                   congestion=tuple(float(row[f"{p}_congestion"]) for p in POSITIONS))


def make_circuit(topology: NetworkTopology, strategy: StrategyKind,
                 guard_id: int, middle_id: int, exit_id: int,
                 build_time_us: int = 0) -> Circuit:
    """Build a circuit record, computing its metrics from the topology."""
    guard, middle, exit_ = topology[guard_id], topology[middle_id], topology[exit_id]
    bandwidth = bottleneck_bandwidth(guard.bandwidth_kbps, middle.bandwidth_kbps,
                                     exit_.bandwidth_kbps)
    latency = circuit_latency(topology.latency, guard.region, middle.region, exit_.region)
    return Circuit(strategy, (guard_id, middle_id, exit_id),
                   bandwidth, latency, circuit_efficiency(bandwidth, latency),
                   build_time_us,
                   regions=(guard.region, middle.region, exit_.region),
                   congestion=(guard.congestion, middle.congestion, exit_.congestion))


def audit_circuit(topology: NetworkTopology, circuit: Circuit, target_port: int,
                  threshold: Optional[float] = None) -> List[str]:
    """Check a successful circuit against the model from scratch.

    Checks roles, pairwise id / AS / (/16) uniqueness, the exit policy and
    the stored metrics; with ``threshold``, also that no hop's recorded
    congestion reached it.

    :return: the violations found, empty when the circuit is sound
    """
    if not circuit.success:
        return []
    violations = []
    relays = [topology[i] for i in circuit.relays]
    for relay, role in zip(relays, (Role.GUARD, Role.MIDDLE, Role.EXIT)):
        if relay.role != role:
            violations.append(f"relay {relay.id} is not a {role.value}")
    for a in range(3):
        for b in range(a + 1, 3):
            ra, rb = relays[a], relays[b]
            if ra.id == rb.id:
                violations.append(f"relay {ra.id} used twice")
            if ra.as_number == rb.as_number:
                violations.append(f"relays {ra.id} and {rb.id} share AS{ra.as_number}")
            if (ra.ipv4 >> 16) == (rb.ipv4 >> 16):
                violations.append(f"relays {ra.id} and {rb.id} share a /16")
    if target_port not in relays[2].exit_ports:
        violations.append(f"exit {relays[2].id} rejects port {target_port}")
    expected_bw = min(r.bandwidth_kbps for r in relays)
    expected_lat = (topology.latency(relays[0].region, relays[1].region)
                    + topology.latency(relays[1].region, relays[2].region))
    if not math.isclose(circuit.bandwidth_kbps, expected_bw, rel_tol=1e-9):
        violations.append(f"bandwidth {circuit.bandwidth_kbps} != {expected_bw}")
    if not math.isclose(circuit.latency_ms, expected_lat, rel_tol=1e-9):
        violations.append(f"latency {circuit.latency_ms} != {expected_lat}")
    if not math.isclose(circuit.efficiency, expected_bw / (expected_lat + 1), rel_tol=1e-9):
        violations.append(f"efficiency {circuit.efficiency} inconsistent")
    if threshold is not None and circuit.congestion is not None:
        for relay, value in zip(relays, circuit.congestion):
            if value >= threshold:
                violations.append(f"relay {relay.id} congested ({value:.3f}) at selection")
    return violations
