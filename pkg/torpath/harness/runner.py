"""The scenario x strategy evaluation matrix."""
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
from datetime import datetime, timezone
import logging
import time
import numpy

from .aggregate import AggregateMetrics, aggregate
from .scenarios import ScenarioSpec
from .. import __version__
from ..circuit.circuit import Circuit
from ..errors import CircuitBuildFailure, InvalidParameter, NoCandidates
from ..network.params import ModelParameters
from ..network.topology import NetworkTopology, generate_topology, update_congestion
from ..selection.base import SelectionContext
from ..selection.dispatch import select
from ..selection.kinds import StrategyKind

LOGGER = logging.getLogger(__name__)

CircuitSink = Callable[[ScenarioSpec, Circuit], None]
TopologySink = Callable[[ScenarioSpec, NetworkTopology], None]


def scenario_seed(seed: int, scenario_id: int) -> int:
    """64-bit topology seed of a scenario."""
    sequence = numpy.random.SeedSequence(entropy=int(seed), spawn_key=(int(scenario_id),))
    return int(sequence.generate_state(1, dtype=numpy.uint64)[0])


def cell_rng(seed: int, scenario_id: int, strategy: StrategyKind) -> numpy.random.Generator:
    """Random stream of one (scenario, strategy) run."""
    return numpy.random.default_rng(numpy.random.SeedSequence(
        entropy=int(seed), spawn_key=(int(scenario_id), strategy.index)))


class CellResult:

    """Outcome of one (scenario, strategy) run."""

    def __init__(self, scenario: ScenarioSpec, strategy: StrategyKind,
                 metrics: AggregateMetrics, circuits: Optional[List[Circuit]] = None):
        self.__scenario = scenario
        self.__strategy = strategy
        self.__metrics = metrics
        self.__circuits = circuits

    @property
    def scenario(self) -> ScenarioSpec:
        return self.__scenario

    @property
    def strategy(self) -> StrategyKind:
        return self.__strategy

    @property
    def metrics(self) -> AggregateMetrics:
        return self.__metrics

    @property
    def circuits(self) -> Optional[List[Circuit]]:
        """Circuits of the run, when the run kept them."""
        return self.__circuits

    def __str__(self) -> str:
        return f"scenario {self.scenario.scenario_id} / {self.strategy.value}: {self.metrics}"

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        return {'scenario': self.scenario.to_dict(),
                'strategy': self.strategy.value,
                'metrics': self.metrics.to_dict(with_timing)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CellResult':
        return cls(ScenarioSpec.from_dict(data['scenario']),
                   StrategyKind(data['strategy']),
                   AggregateMetrics.from_dict(data['metrics']))


class RunReport:

    """Cells of an evaluation matrix and the configuration that produced them.

    :param cells: one cell per (scenario, strategy), scenario-major
    :param parameters: effective model parameters, as echoed in results
    """

    def __init__(self, cells: List[CellResult], seed: int, scale: float,
                 parameters: Dict[str, Any], timestamp: Optional[str] = None,
                 version: str = __version__):
        self.__cells = cells
        self.__seed = int(seed)
        self.__scale = float(scale)
        self.__parameters = parameters
        self.__timestamp = timestamp or datetime.now(timezone.utc).isoformat(timespec='seconds')
        self.__version = version

    @property
    def cells(self) -> List[CellResult]:
        return self.__cells

    @property
    def seed(self) -> int:
        return self.__seed

    @property
    def scale(self) -> float:
        return self.__scale

    @property
    def parameters(self) -> Dict[str, Any]:
        return self.__parameters

    @property
    def timestamp(self) -> str:
        return self.__timestamp

    @property
    def version(self) -> str:
        return self.__version

    @property
    def scenarios(self) -> List[ScenarioSpec]:
        seen = dict()
        for cell in self.__cells:
            seen.setdefault(cell.scenario.scenario_id, cell.scenario)
        return list(seen.values())

    @property
    def strategies(self) -> List[StrategyKind]:
        return list(dict.fromkeys(cell.strategy for cell in self.__cells))

    def cell(self, scenario_id: int, strategy: StrategyKind) -> CellResult:
        for cell in self.__cells:
            if cell.scenario.scenario_id == scenario_id and cell.strategy == strategy:
                return cell
        raise KeyError((scenario_id, strategy))

    def __len__(self) -> int:
        return len(self.__cells)

    def __iter__(self):
        return iter(self.__cells)

    def to_dict(self, with_timing: bool = False) -> Dict[str, Any]:
        return {
            'config': {
                'version': self.__version,
                'seed': self.__seed,
                'scale': self.__scale,
                'timestamp': self.__timestamp,
                'scenarios': [s.scenario_id for s in self.scenarios],
                'strategies': [s.value for s in self.strategies],
                'parameters': self.__parameters,
            },
            'cells': [cell.to_dict(with_timing) for cell in self.__cells],
            'ranking': [{'rank': k + 1, 'strategy': kind.value, 'mean_efficiency': value}
                        for k, (kind, value) in enumerate(rank_by_efficiency(self))],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunReport':
        config = data['config']
        return cls([CellResult.from_dict(cell) for cell in data['cells']],
                   config['seed'], config['scale'], config['parameters'],
                   config['timestamp'], config.get('version', __version__))


def run_cell(topology: NetworkTopology, scenario: ScenarioSpec, strategy: StrategyKind,
             seed: int, keep_circuits: bool = False,
             on_circuit: Optional[CircuitSink] = None,
             network_relays: Optional[int] = None) -> CellResult:
    """Build ``scenario.circuits`` circuits with one strategy.

    Congestion is redrawn at the start of the run and then every
    ``congestion_update_interval`` circuits; update steps restart at zero
    for every strategy, so all strategies of a scenario face the same
    congestion fields.

    :param network_relays: relays of the unscaled scenario, when
        ``scenario`` is a scaled-down sample of it
    """
    params = topology.params
    interval = params.congestion_update_interval
    ctx = SelectionContext(topology, cell_rng(seed, scenario.scenario_id, strategy),
                           network_relays=network_relays)
    circuits = []
    failures = 0
    for k in range(scenario.circuits):
        if k % interval == 0:
            update_congestion(topology, scenario.load_factor, k // interval)
        tic = time.perf_counter_ns()
        try:
            circuit = select(strategy, ctx)
        except (CircuitBuildFailure, NoCandidates) as failure:
            failures += 1
            reason = failure.reason if isinstance(failure, CircuitBuildFailure) else failure.message
            LOGGER.warning("circuit %d of %s failed: %s", k, strategy.value, reason)
            circuit = Circuit.failed(strategy, (time.perf_counter_ns() - tic) // 1000, reason)
        if on_circuit is not None:
            on_circuit(scenario, circuit)
        circuits.append(circuit)
    metrics = aggregate(circuits)
    if failures:
        LOGGER.warning("%s: %d of %d circuits failed", strategy.value, failures, scenario.circuits)
    return CellResult(scenario, strategy, metrics, circuits if keep_circuits else None)


def run_matrix(scenarios: Sequence[ScenarioSpec], strategies: Sequence[StrategyKind],
               seed: int, scale: float = 1.0,
               params: Optional[ModelParameters] = None,
               keep_circuits: bool = False,
               on_circuit: Optional[CircuitSink] = None,
               on_topology: Optional[TopologySink] = None) -> RunReport:
    """Evaluate every strategy on every scenario.

    One topology is generated per scenario and shared by its strategy runs.
    Guard saturation follows the unscaled scenario size.

    :param scale: in (0, 1], shrinks relays, users and circuits
    :param keep_circuits: keep every circuit in the returned cells
    :param on_circuit: called with every circuit attempt, in order
    :param on_topology: called with each scenario's freshly generated topology
    """
    if not scenarios:
        raise InvalidParameter("scenarios", "at least one scenario is required")
    if not strategies:
        raise InvalidParameter("strategies", "at least one strategy is required")
    params = params if params is not None else ModelParameters()
    cells = []
    for full_scenario in scenarios:
        scenario = full_scenario.scaled(scale)
        LOGGER.info("Running %s (load factor %.1f)", scenario, scenario.load_factor)
        tic = time.process_time()
        topology = generate_topology(scenario.relays,
                                     scenario_seed(seed, scenario.scenario_id), params)
        toc = time.process_time()
        LOGGER.warning("scenario %d topology duration: %.3f", scenario.scenario_id, toc - tic)
        if on_topology is not None:
            on_topology(scenario, topology)
        for strategy in strategies:
            tic = time.process_time()
            cell = run_cell(topology, scenario, strategy, seed, keep_circuits, on_circuit,
                            network_relays=full_scenario.relays)
            toc = time.process_time()
            LOGGER.warning("scenario %d %s duration: %.3f",
                           scenario.scenario_id, strategy.value, toc - tic)
            LOGGER.info("%s", cell)
            cells.append(cell)
    return RunReport(cells, seed, scale, params.to_dict())


def rank_by_efficiency(report: RunReport) -> List[Tuple[StrategyKind, float]]:
    """Strategies by cross-scenario mean efficiency, best first, ties by name."""
    per_strategy = dict()
    for cell in report.cells:
        per_strategy.setdefault(cell.strategy, []).append(cell.metrics.mean_efficiency)
    means = [(kind, float(numpy.mean(values))) for kind, values in per_strategy.items()]
    return sorted(means, key=lambda item: (-item[1], item[0].value))


# (label, metric, higher is better)
HEADLINES = (
    ('throughput', 'mean_bandwidth_kbps', True),
    ('latency', 'mean_latency_ms', False),
    ('efficiency', 'mean_efficiency', True),
    ('throughput_consistency', 'std_bandwidth', False),
    ('latency_consistency', 'std_latency', False),
)


def top_performers(report: RunReport) -> Dict[int, Dict[str, StrategyKind]]:
    """Best strategy of each scenario for every headline metric."""
    best = dict()
    for scenario in report.scenarios:
        cells = [c for c in report.cells if c.scenario.scenario_id == scenario.scenario_id]
        winners = dict()
        for label, metric, higher in HEADLINES:
            sign = -1.0 if higher else 1.0
            winner = min(cells, key=lambda c: (sign * c.metrics.metric(metric), c.strategy.value))
            winners[label] = winner.strategy
        best[scenario.scenario_id] = winners
    return best


def _relative(value: float, reference: float) -> float:
    return value / reference if reference != 0 else float('nan')


def baseline_gains(report: RunReport,
                   baseline: StrategyKind = StrategyKind.RANDOM) -> List[Dict[str, Any]]:
    """Each strategy against a baseline, scenario by scenario.

    ``throughput_gain`` is B/B0 - 1, ``latency_reduction`` is 1 - L/L0 and
    ``efficiency_ratio`` is E/E0.
    """
    if baseline not in report.strategies:
        raise InvalidParameter("baseline", f"{baseline.value} is not part of the report")
    rows = []
    for scenario in report.scenarios:
        reference = report.cell(scenario.scenario_id, baseline).metrics
        for strategy in report.strategies:
            metrics = report.cell(scenario.scenario_id, strategy).metrics
            rows.append({
                'scenario_id': scenario.scenario_id,
                'strategy': strategy,
                'throughput_gain': _relative(metrics.mean_bandwidth_kbps,
                                             reference.mean_bandwidth_kbps) - 1.0,
                'latency_reduction': 1.0 - _relative(metrics.mean_latency_ms,
                                                     reference.mean_latency_ms),
                'efficiency_ratio': _relative(metrics.mean_efficiency,
                                              reference.mean_efficiency),
            })
    return rows


def scaling_trends(report: RunReport) -> Dict[StrategyKind, List[Dict[str, float]]]:
    """Per strategy, its metrics as the scenarios grow, in scenario order."""
    trends = dict()
    for strategy in report.strategies:
        series = []
        for cell in sorted((c for c in report.cells if c.strategy == strategy),
                           key=lambda c: c.scenario.scenario_id):
            m = cell.metrics
            series.append({'scenario_id': cell.scenario.scenario_id,
                           'relays': cell.scenario.relays,
                           'users': cell.scenario.users,
                           'load_factor': cell.scenario.load_factor,
                           'mean_bandwidth_kbps': m.mean_bandwidth_kbps,
                           'mean_latency_ms': m.mean_latency_ms,
                           'mean_efficiency': m.mean_efficiency,
                           'std_bandwidth': m.std_bandwidth,
                           'std_latency': m.std_latency})
        trends[strategy] = series
    return trends
