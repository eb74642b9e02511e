from typing import Any, Dict, FrozenSet, Iterable
import enum
import logging

from .regions import RegionId
from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)


class Role(enum.Enum):
    GUARD = 'guard'
    MIDDLE = 'middle'
    EXIT = 'exit'


ROLES = tuple(Role)


def prefix16(ipv4: int) -> int:
    return (ipv4 >> 16) & 0xFFFF


def format_ipv4(ipv4: int) -> str:
    return '.'.join(str((ipv4 >> shift) & 0xFF) for shift in (24, 16, 8, 0))


class Relay:

    """A relay of the synthetic network.

    Everything but the congestion metric is fixed at generation time;
    congestion is rewritten by the topology between evaluation batches.
    """

    def __init__(self, relay_id: int, role: Role,
                 bandwidth_kbps: float, region: RegionId,
                 uptime_hours: float, stability: float,
                 congestion: float, as_number: int, ipv4: int,
                 exit_ports: Iterable[int] = ()):
        self.__id = int(relay_id)
        self.__role = role
        self.__bandwidth = float(bandwidth_kbps)
        self.__region = region
        self.__uptime = float(uptime_hours)
        self.__stability = float(stability)
        self.__as_number = int(as_number)
        self.__ipv4 = int(ipv4)
        self.__exit_ports = frozenset(int(p) for p in exit_ports)
        if not self.__bandwidth > 0:
            raise InvalidParameter(f"bandwidth of relay {relay_id}",
                                   f"{bandwidth_kbps} is not positive")
        if role == Role.EXIT and not {80, 443} <= self.__exit_ports:
            raise InvalidParameter(f"exit policy of relay {relay_id}",
                                   "exits must accept ports 80 and 443")
        if role != Role.EXIT and self.__exit_ports:
            raise InvalidParameter(f"exit policy of relay {relay_id}",
                                   f"{role.value} relays accept no exit traffic")
        self.congestion = congestion

    @property
    def id(self) -> int:
        return self.__id

    @property
    def role(self) -> Role:
        return self.__role

    @property
    def bandwidth_kbps(self) -> float:
        return self.__bandwidth

    @property
    def region(self) -> RegionId:
        return self.__region

    @property
    def uptime_hours(self) -> float:
        return self.__uptime

    @property
    def stability(self) -> float:
        return self.__stability

    @property
    def congestion(self) -> float:
        return self.__congestion

    @congestion.setter
    def congestion(self, value: float):
        self.__congestion = min(1.0, max(0.0, float(value)))

    @property
    def as_number(self) -> int:
        return self.__as_number

    @property
    def ipv4(self) -> int:
        return self.__ipv4

    @property
    def prefix16(self) -> int:
        return prefix16(self.__ipv4)

    @property
    def exit_ports(self) -> FrozenSet[int]:
        return self.__exit_ports

    def permits(self, port: int) -> bool:
        return port in self.__exit_ports

    def __str__(self) -> str:
        return (f"relay [{self.id}] {self.role.value} {self.region.value} "
                f"{self.bandwidth_kbps:.1f} KB/s c={self.congestion:.2f} "
                f"AS{self.as_number} {format_ipv4(self.ipv4)}")

    def __eq__(self, other: 'Relay') -> bool:
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return self.__id

    def to_dict(self) -> Dict[str, Any]:
        return {
            'id': self.id,
            'role': self.role.value,
            'bandwidth_kbps': self.bandwidth_kbps,
            'region': self.region.value,
            'uptime_hours': self.uptime_hours,
            'stability': self.stability,
            'congestion': self.congestion,
            'as_number': self.as_number,
            'ipv4': self.ipv4,
            'exit_ports': sorted(self.exit_ports),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Relay':
        return cls(data['id'], Role(data['role']),
                   data['bandwidth_kbps'], RegionId(data['region']),
                   data['uptime_hours'], data['stability'],
                   data['congestion'], data['as_number'], data['ipv4'],
                   data['exit_ports'])
