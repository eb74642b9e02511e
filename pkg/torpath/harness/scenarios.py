"""The five scaling scenarios of the evaluation."""
from typing import Any, Dict, List
import logging

from ..errors import InvalidParameter

LOGGER = logging.getLogger(__name__)

MIN_SCALED_RELAYS = 100
MIN_SCALED_CIRCUITS = 100


class ScenarioSpec:

    """A (users, relays, circuits) configuration.

    :param scenario_id: scenario number, 1 to 5 for the default table
    :param circuits: circuits built per strategy in this scenario
    """

    def __init__(self, scenario_id: int, users: int, relays: int, circuits: int,
                 label: str = ''):
        for name, value in (('users', users), ('relays', relays), ('circuits', circuits)):
            if int(value) <= 0:
                raise InvalidParameter(f"scenario {scenario_id} {name}", f"{value} is not positive")
        self.__id = int(scenario_id)
        self.__users = int(users)
        self.__relays = int(relays)
        self.__circuits = int(circuits)
        self.__label = label or f"{users:,} users on {relays:,} relays"

    @property
    def scenario_id(self) -> int:
        return self.__id

    @property
    def users(self) -> int:
        return self.__users

    @property
    def relays(self) -> int:
        return self.__relays

    @property
    def circuits(self) -> int:
        return self.__circuits

    @property
    def label(self) -> str:
        return self.__label

    @property
    def load_factor(self) -> float:
        """Users per relay."""
        return self.__users / self.__relays

    def scaled(self, scale: float) -> 'ScenarioSpec':
        """Desk-scale copy: relays, users and circuits shrunk by ``scale``.

        Relays and circuits never drop below 100; users follow the relay
        count so that the load factor is preserved.
        """
        if not 0 < scale <= 1:
            raise InvalidParameter("scale", f"{scale} is not in (0, 1]")
        if scale == 1:
            return self
        relays = max(MIN_SCALED_RELAYS, int(round(self.relays * scale)))
        users = max(1, int(round(self.load_factor * relays)))
        circuits = max(MIN_SCALED_CIRCUITS, int(round(self.circuits * scale)))
        return ScenarioSpec(self.scenario_id, users, relays, circuits, self.label)

    def __str__(self) -> str:
        return (f"scenario {self.scenario_id}: {self.users} users, {self.relays} relays, "
                f"{self.circuits} circuits")

    def __eq__(self, other: 'ScenarioSpec') -> bool:
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return self.__id

    def to_dict(self) -> Dict[str, Any]:
        return {'scenario_id': self.scenario_id, 'label': self.label,
                'users': self.users, 'relays': self.relays,
                'circuits': self.circuits, 'load_factor': self.load_factor}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ScenarioSpec':
        return cls(data['scenario_id'], data['users'], data['relays'],
                   data['circuits'], data.get('label', ''))


def default_scenarios() -> List[ScenarioSpec]:
    return [
        ScenarioSpec(1, 250_000, 10_000, 2_500),
        ScenarioSpec(2, 500_000, 10_000, 5_000),
        ScenarioSpec(3, 1_000_000, 10_000, 10_000),
        ScenarioSpec(4, 1_000_000, 20_000, 10_000),
        ScenarioSpec(5, 1_000_000, 50_000, 10_000),
    ]
