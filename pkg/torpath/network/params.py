"""Model parameters of the synthetic network.

Every constant of the relay population, congestion and selection models
lives here, so that a YAML config file can override any of them and the
effective values can be echoed into the results file.
"""
from typing import Any, Callable, Dict, Mapping, Tuple
from dataclasses import dataclass, field, fields, replace
import logging
import math
import yaml

from .regions import LatencyMatrix, RegionId, REGIONS
from .relay import Role, ROLES
from ..errors import ConfigurationError, InvalidParameter

LOGGER = logging.getLogger(__name__)


def _default_bandwidth() -> Dict[Role, Tuple[float, float]]:
    # (median KB/s, sigma of the underlying normal)
    return {Role.GUARD: (600.0, 0.35),
            Role.MIDDLE: (450.0, 0.40),
            Role.EXIT: (525.0, 0.35)}


def _default_uptime() -> Dict[Role, float]:
    return {Role.GUARD: 720.0, Role.MIDDLE: 360.0, Role.EXIT: 480.0}


@dataclass(frozen=True)
class ModelParameters:
    guard_fraction: float = 0.15
    exit_fraction: float = 0.15
    bandwidth: Dict[Role, Tuple[float, float]] = field(default_factory=_default_bandwidth)
    region_probabilities: Tuple[float, ...] = (0.30, 0.40, 0.20, 0.10)
    mean_uptime_hours: Dict[Role, float] = field(default_factory=_default_uptime)
    stability_scale_hours: float = 720.0
    congestion_base: float = 0.15
    congestion_slope: float = 0.5
    congestion_floor: float = 0.05
    congestion_cap: float = 0.85
    congestion_concentration: float = 10.0
    congestion_threshold: float = 0.70
    retry_budget: int = 50
    quartile_fraction: float = 0.25
    # ordinary guards whose client share one persistent guard can carry
    guard_capacity: float = 750.0
    latency: LatencyMatrix = field(default_factory=LatencyMatrix)
    exit_ports: Tuple[int, ...] = (80, 443)
    extra_exit_ports: Tuple[int, ...] = (22, 53, 8080, 8443)
    extra_exit_port_probability: float = 0.5
    prefix_divisor: int = 8
    as_divisor: int = 10
    congestion_update_interval: int = 500
    target_port: int = 443

    def __post_init__(self):
        def check(key: str, ok: bool, why: str):
            if not ok:
                raise ConfigurationError(key, why)
        check('guard_fraction', 0 < self.guard_fraction < 1, "must be in (0, 1)")
        check('exit_fraction', 0 < self.exit_fraction < 1, "must be in (0, 1)")
        check('exit_fraction', self.guard_fraction + self.exit_fraction < 1,
              "guards and exits must leave room for middles")
        check('bandwidth', set(self.bandwidth) == set(ROLES), "one entry per role")
        for role, (median, sigma) in self.bandwidth.items():
            check('bandwidth', median > 0 and sigma >= 0,
                  f"{role.value} needs median > 0 and sigma >= 0")
        check('region_probabilities', len(self.region_probabilities) == len(REGIONS),
              "one probability per region")
        check('region_probabilities', all(p >= 0 for p in self.region_probabilities)
              and math.isclose(sum(self.region_probabilities), 1.0, abs_tol=1e-9),
              "probabilities must be nonnegative and sum to 1")
        check('mean_uptime_hours', set(self.mean_uptime_hours) == set(ROLES)
              and all(v > 0 for v in self.mean_uptime_hours.values()),
              "one positive mean per role")
        check('stability_scale_hours', self.stability_scale_hours > 0, "must be positive")
        check('congestion_floor', 0 <= self.congestion_floor <= self.congestion_cap < 1,
              "need 0 <= floor <= cap < 1")
        check('congestion_floor', self.congestion_floor > 0, "beta mean must be positive")
        check('congestion_concentration', self.congestion_concentration > 0, "must be positive")
        check('congestion_threshold', 0 < self.congestion_threshold <= 1, "must be in (0, 1]")
        check('retry_budget', self.retry_budget >= 1, "must be at least 1")
        check('quartile_fraction', 0 < self.quartile_fraction <= 1, "must be in (0, 1]")
        check('guard_capacity', self.guard_capacity > 0, "must be positive")
        check('exit_ports', {80, 443} <= set(self.exit_ports), "must include 80 and 443")
        check('extra_exit_port_probability', 0 <= self.extra_exit_port_probability <= 1,
              "must be in [0, 1]")
        check('prefix_divisor', self.prefix_divisor >= 1, "must be at least 1")
        check('as_divisor', self.as_divisor >= 1, "must be at least 1")
        check('congestion_update_interval', self.congestion_update_interval >= 1,
              "must be at least 1")
        check('target_port', 0 < self.target_port < 65536, "not a port number")

    def congestion_mean(self, load_factor: float) -> float:
        """Mean of the per-relay congestion distribution under a given load.

        :param load_factor: users per relay
        """
        mean = self.congestion_base + self.congestion_slope * load_factor / 100.0
        return min(self.congestion_cap, max(self.congestion_floor, mean))

    def lognormal_mean(self, role: Role) -> float:
        median, sigma = self.bandwidth[role]
        return median * math.exp(sigma * sigma / 2.0)

    def to_dict(self) -> Dict[str, Any]:
        """Effective parameters as a JSON-friendly mapping."""
        data = dict()
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == 'bandwidth':
                value = {role.value: {'median': median, 'sigma': sigma}
                         for role, (median, sigma) in value.items()}
            elif f.name == 'mean_uptime_hours':
                value = {role.value: hours for role, hours in value.items()}
            elif f.name == 'region_probabilities':
                value = {region.value: p for region, p in zip(REGIONS, value)}
            elif f.name == 'latency':
                value = value.to_rows()
            elif isinstance(value, tuple):
                value = list(value)
            data[f.name] = value
        return data

    def with_overrides(self, overrides: Mapping[str, Any]) -> 'ModelParameters':
        """Copy of these parameters with config-file overrides applied."""
        changes = dict()
        for key, value in overrides.items():
            if key not in _PARSERS:
                raise ConfigurationError(key, "unknown parameter")
            try:
                changes[key] = _PARSERS[key](self, value)
            except (TypeError, ValueError, KeyError, InvalidParameter) as err:
                raise ConfigurationError(key, f"cannot use {value!r} ({err})")
            LOGGER.info("parameter override %s = %s", key, value)
        return replace(self, **changes)

    @classmethod
    def from_yaml(cls, filename: str) -> 'ModelParameters':
        with open(filename, 'r', encoding='utf-8') as stream:
            try:
                overrides = yaml.safe_load(stream) or dict()
            except yaml.YAMLError as err:
                raise ConfigurationError(filename, f"not a YAML document ({err})")
        if not isinstance(overrides, dict):
            raise ConfigurationError(filename, "config file must hold a mapping")
        LOGGER.info("Loading model parameters from %s", filename)
        return cls().with_overrides(overrides)


def _per_role(cast: Callable[[Any, Any], Any]):
    def parse(params: ModelParameters, value: Mapping[str, Any], current: Dict[Role, Any]):
        result = dict(current)
        for name, entry in value.items():
            role = Role(name)
            result[role] = cast(current[role], entry)
        return result
    return parse


def _bandwidth_entry(current: Tuple[float, float], entry: Any) -> Tuple[float, float]:
    median, sigma = current
    if isinstance(entry, Mapping):
        return (float(entry.get('median', median)), float(entry.get('sigma', sigma)))
    median, sigma = entry
    return (float(median), float(sigma))


def _regions(params: ModelParameters, value: Any) -> Tuple[float, ...]:
    if isinstance(value, Mapping):
        probabilities = dict(zip(REGIONS, params.region_probabilities))
        for name, p in value.items():
            probabilities[RegionId(name)] = float(p)
        return tuple(probabilities[region] for region in REGIONS)
    return tuple(float(p) for p in value)


def _latency(params: ModelParameters, value: Any) -> LatencyMatrix:
    if isinstance(value, Mapping):
        return LatencyMatrix.from_mapping(value, base=params.latency)
    return LatencyMatrix.from_rows(value)


def _ports(params: ModelParameters, value: Any) -> Tuple[int, ...]:
    return tuple(sorted(int(p) for p in value))


def _scalar(cast: Callable[[Any], Any]):
    return lambda params, value: cast(value)


_PARSERS = {
    'guard_fraction': _scalar(float),
    'exit_fraction': _scalar(float),
    'bandwidth': lambda params, value: _per_role(_bandwidth_entry)(params, value, params.bandwidth),
    'region_probabilities': _regions,
    'mean_uptime_hours': lambda params, value: _per_role(lambda _, v: float(v))(
        params, value, params.mean_uptime_hours),
    'stability_scale_hours': _scalar(float),
    'congestion_base': _scalar(float),
    'congestion_slope': _scalar(float),
    'congestion_floor': _scalar(float),
    'congestion_cap': _scalar(float),
    'congestion_concentration': _scalar(float),
    'congestion_threshold': _scalar(float),
    'retry_budget': _scalar(int),
    'quartile_fraction': _scalar(float),
    'guard_capacity': _scalar(float),
    'latency': _latency,
    'exit_ports': _ports,
    'extra_exit_ports': _ports,
    'extra_exit_port_probability': _scalar(float),
    'prefix_divisor': _scalar(int),
    'as_divisor': _scalar(int),
    'congestion_update_interval': _scalar(int),
    'target_port': _scalar(int),
}
