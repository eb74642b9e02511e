"""Per-cell summary statistics."""
from typing import Any, Dict, Optional, Sequence
import logging
import numpy

from ..circuit.circuit import Circuit
from ..errors import EmptyAggregate

LOGGER = logging.getLogger(__name__)

METRICS = ('mean_bandwidth_kbps', 'mean_latency_ms', 'mean_efficiency', 'success_rate',
           'std_bandwidth', 'std_latency', 'std_efficiency')


class AggregateMetrics:

    """Means and population standard deviations of a set of circuits.

    Means and deviations are taken over successful circuits only; the
    success rate is taken over every attempt.
    """

    def __init__(self, mean_bandwidth_kbps: float, mean_latency_ms: float,
                 mean_efficiency: float, success_rate: float,
                 std_bandwidth: float, std_latency: float, std_efficiency: float,
                 circuit_count: int, successes: int,
                 mean_build_time_us: Optional[float] = None):
        self.__values = {
            'mean_bandwidth_kbps': float(mean_bandwidth_kbps),
            'mean_latency_ms': float(mean_latency_ms),
            'mean_efficiency': float(mean_efficiency),
            'success_rate': float(success_rate),
            'std_bandwidth': float(std_bandwidth),
            'std_latency': float(std_latency),
            'std_efficiency': float(std_efficiency),
        }
        self.__count = int(circuit_count)
        self.__successes = int(successes)
        self.__build_time = None if mean_build_time_us is None else float(mean_build_time_us)

    @property
    def mean_bandwidth_kbps(self) -> float:
        return self.__values['mean_bandwidth_kbps']

    @property
    def mean_latency_ms(self) -> float:
        return self.__values['mean_latency_ms']

    @property
    def mean_efficiency(self) -> float:
        return self.__values['mean_efficiency']

    @property
    def success_rate(self) -> float:
        return self.__values['success_rate']

    @property
    def std_bandwidth(self) -> float:
        return self.__values['std_bandwidth']

    @property
    def std_latency(self) -> float:
        return self.__values['std_latency']

    @property
    def std_efficiency(self) -> float:
        return self.__values['std_efficiency']

    @property
    def circuit_count(self) -> int:
        """Number of attempts, failed ones included."""
        return self.__count

    @property
    def successes(self) -> int:
        return self.__successes

    @property
    def mean_build_time_us(self) -> Optional[float]:
        return self.__build_time

    def metric(self, name: str) -> float:
        return self.__values[name]

    def __str__(self) -> str:
        return (f"B={self.mean_bandwidth_kbps:.1f}±{self.std_bandwidth:.1f} "
                f"L={self.mean_latency_ms:.1f}±{self.std_latency:.1f} "
                f"E={self.mean_efficiency:.3f}±{self.std_efficiency:.3f} "
                f"ok={self.successes}/{self.circuit_count}")

    def __eq__(self, other: 'AggregateMetrics') -> bool:
        return (self.__values == other.__values
                and self.__count == other.__count
                and self.__successes == other.__successes)

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        data = dict(self.__values)
        data['circuit_count'] = self.__count
        data['successes'] = self.__successes
        if with_timing and self.__build_time is not None:
            data['mean_build_time_us'] = self.__build_time
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AggregateMetrics':
        return cls(*(data[name] for name in METRICS),
                   circuit_count=data['circuit_count'],
                   successes=data['successes'],
                   mean_build_time_us=data.get('mean_build_time_us'))


def aggregate(circuits: Sequence[Circuit]) -> AggregateMetrics:
    """Summarize a list of circuit attempts.

    :raises EmptyAggregate: on an empty list
    """
    if len(circuits) == 0:
        raise EmptyAggregate()
    built = [c for c in circuits if c.success]
    build_time = float(numpy.mean([c.build_time_us for c in circuits]))
    if not built:
        LOGGER.warning("no successful circuit among %d attempts", len(circuits))
        return AggregateMetrics(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                len(circuits), 0, build_time)
    metrics = numpy.array([(c.bandwidth_kbps, c.latency_ms, c.efficiency) for c in built],
                          dtype=float)
    means = metrics.mean(axis=0)
    stds = metrics.std(axis=0)
    return AggregateMetrics(means[0], means[1], means[2], len(built) / len(circuits),
                            stds[0], stds[1], stds[2],
                            len(circuits), len(built), build_time)
