import enum


class StrategyKind(enum.Enum):
    RANDOM = 'random'
    GUARD = 'guard'
    CONGESTION_AWARE = 'congestion_aware'
    GEO_LATENCY = 'geo_latency'
    GEO_DIVERSITY = 'geo_diversity'

    @property
    def index(self) -> int:
        return STRATEGIES.index(self)

    @classmethod
    def parse(cls, name: str) -> 'StrategyKind':
        return cls(name.strip().lower().replace('-', '_'))


STRATEGIES = tuple(StrategyKind)
