"""Results file, plot-ready tables, per-circuit logs and topology dumps."""
from typing import Any, Dict, Iterable, List, TextIO
import csv
import json
import logging
import math
import os
import jsonschema

from ..circuit.circuit import Circuit
from ..errors import SchemaMismatch
from ..harness.aggregate import METRICS
from ..harness.runner import (RunReport, baseline_gains, rank_by_efficiency,
                              scaling_trends, top_performers)
from ..harness.scenarios import ScenarioSpec
from ..network.topology import NetworkTopology
from ..selection.kinds import StrategyKind

LOGGER = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6

_NUMBER = {'type': 'number'}
_COUNT = {'type': 'integer', 'minimum': 0}

RESULTS_SCHEMA = {
    '$schema': 'http://json-schema.org/draft-07/schema#',
    'type': 'object',
    'required': ['config', 'cells', 'ranking'],
    'properties': {
        'config': {
            'type': 'object',
            'required': ['version', 'seed', 'scale', 'timestamp',
                         'scenarios', 'strategies', 'parameters'],
            'properties': {
                'version': {'type': 'string'},
                'seed': _COUNT,
                'scale': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1},
                'timestamp': {'type': 'string'},
                'scenarios': {'type': 'array', 'items': {'type': 'integer'}, 'minItems': 1},
                'strategies': {'type': 'array', 'minItems': 1,
                               'items': {'enum': [s.value for s in StrategyKind]}},
                'parameters': {'type': 'object'},
            },
        },
        'cells': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'required': ['scenario', 'strategy', 'metrics'],
                'properties': {
                    'scenario': {
                        'type': 'object',
                        'required': ['scenario_id', 'users', 'relays', 'circuits'],
                        'properties': {
                            'scenario_id': {'type': 'integer'},
                            'label': {'type': 'string'},
                            'users': {'type': 'integer', 'minimum': 1},
                            'relays': {'type': 'integer', 'minimum': 1},
                            'circuits': {'type': 'integer', 'minimum': 1},
                            'load_factor': _NUMBER,
                        },
                    },
                    'strategy': {'enum': [s.value for s in StrategyKind]},
                    'metrics': {
                        'type': 'object',
                        'required': list(METRICS) + ['circuit_count', 'successes'],
                        'properties': dict(
                            {name: _NUMBER for name in METRICS},
                            success_rate={'type': 'number', 'minimum': 0, 'maximum': 1},
                            circuit_count=_COUNT,
                            successes=_COUNT,
                            mean_build_time_us=_NUMBER),
                    },
                },
            },
        },
        'ranking': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['rank', 'strategy', 'mean_efficiency'],
                'properties': {
                    'rank': {'type': 'integer', 'minimum': 1},
                    'strategy': {'enum': [s.value for s in StrategyKind]},
                    'mean_efficiency': _NUMBER,
                },
            },
        },
    },
}


def significant(data: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Copy of a JSON-like structure with every float rounded to ``digits`` significant digits."""
    if isinstance(data, float):
        return float(f"{data:.{digits}g}") if math.isfinite(data) else data
    if isinstance(data, dict):
        return {key: significant(value, digits) for key, value in data.items()}
    if isinstance(data, (list, tuple)):
        return [significant(value, digits) for value in data]
    return data


def validate_results(data: Any):
    """Check a decoded results document against the results schema.

    :raises SchemaMismatch: naming the first failing field
    """
    error = jsonschema.exceptions.best_match(
        jsonschema.Draft7Validator(RESULTS_SCHEMA).iter_errors(data))
    if error is None:
        return
    path = [str(p) for p in error.absolute_path]
    if error.validator == 'required':
        missing = [p for p in error.validator_value if p not in error.instance]
        path.extend(missing[:1])
    raise SchemaMismatch('/'.join(path) or '$', error.message)


def write_results(report: RunReport, filename: str, with_timing: bool = False):
    data = significant(report.to_dict(with_timing))
    with open(filename, 'w', encoding='utf-8') as stream:
        json.dump(data, stream, indent=2)
        stream.write('\n')
    LOGGER.info("results written to %s", filename)


def read_results(filename: str) -> RunReport:
    """Load and validate a results file.

    :raises SchemaMismatch: on undecodable JSON or schema violations
    """
    with open(filename, 'r', encoding='utf-8') as stream:
        try:
            data = json.load(stream)
        except json.JSONDecodeError as err:
            raise SchemaMismatch('$', f"not a JSON document ({err})")
    validate_results(data)
    return RunReport.from_dict(data)


def circuit_log_path(results_filename: str, fmt: str) -> str:
    stem, _ = os.path.splitext(results_filename)
    return f"{stem}.circuits.{fmt}"


class CircuitLog:

    """Per-circuit sidecar log, as JSON lines or CSV.

    Values are written at full precision so that logged circuits can be
    audited against their topology.
    """

    FORMATS = ('jsonl', 'csv')

    def __init__(self, stream: TextIO, fmt: str = 'jsonl'):
        if fmt not in self.FORMATS:
            raise ValueError(f"unknown circuit log format {fmt}")
        self.__stream = stream
        self.__format = fmt
        self.__writer = None
        self.__count = 0

    @property
    def count(self) -> int:
        return self.__count

    def __call__(self, scenario: ScenarioSpec, circuit: Circuit):
        row = circuit.to_row(scenario.scenario_id)
        if self.__format == 'jsonl':
            self.__stream.write(json.dumps(row) + '\n')
        else:
            if self.__writer is None:
                self.__writer = csv.DictWriter(self.__stream, fieldnames=list(row))
                self.__writer.writeheader()
            self.__writer.writerow(row)
        self.__count += 1


def read_circuit_log(stream: TextIO, fmt: str = 'jsonl') -> List[Dict[str, Any]]:
    """Rows of a circuit log, with CSV blanks read back as None."""
    if fmt == 'jsonl':
        return [json.loads(line) for line in stream if line.strip()]
    return [{key: (value if value != '' else None) for key, value in row.items()}
            for row in csv.DictReader(stream)]


def dump_topology(topology: NetworkTopology, directory: str, scenario: ScenarioSpec) -> str:
    os.makedirs(directory, exist_ok=True)
    filename = os.path.join(directory, f"topology-{scenario.scenario_id}.json")
    with open(filename, 'w', encoding='utf-8') as stream:
        json.dump(topology.to_json(), stream)
    LOGGER.info("topology of scenario %d written to %s", scenario.scenario_id, filename)
    return filename


def load_topology(filename: str) -> NetworkTopology:
    with open(filename, 'r', encoding='utf-8') as stream:
        return NetworkTopology.from_json(json.load(stream))


def long_rows(report: RunReport) -> Iterable[Dict[str, Any]]:
    """Tidy (scenario, strategy, metric, value) rows."""
    for cell in report.cells:
        for metric in METRICS:
            yield {'scenario_id': cell.scenario.scenario_id,
                   'strategy': cell.strategy.value,
                   'metric': metric,
                   'value': cell.metrics.metric(metric)}


def write_csv(report: RunReport, stream: TextIO):
    writer = csv.DictWriter(stream, fieldnames=['scenario_id', 'strategy', 'metric', 'value'],
                            lineterminator='\n')
    writer.writeheader()
    for row in long_rows(report):
        writer.writerow(row)


def cell_table(report: RunReport) -> str:
    lines = [f"{'scenario':>8} {'strategy':<17} {'B (KB/s)':>10} {'L (ms)':>8} "
             f"{'E':>8} {'success':>8}"]
    for cell in report.cells:
        m = cell.metrics
        lines.append(f"{cell.scenario.scenario_id:>8} {cell.strategy.value:<17} "
                     f"{m.mean_bandwidth_kbps:>10.1f} {m.mean_latency_ms:>8.1f} "
                     f"{m.mean_efficiency:>8.3f} {m.success_rate:>8.1%}")
    return '\n'.join(lines)


def ranking_table(report: RunReport) -> str:
    lines = ["efficiency ranking:"]
    for rank, (kind, value) in enumerate(rank_by_efficiency(report), 1):
        lines.append(f"  {rank}. {kind.value:<17} {value:.3f}")
    return '\n'.join(lines)


def summary_table(report: RunReport) -> str:
    """Cross-scenario averages per strategy, best efficiency first."""
    lines = [f"{'strategy':<17} {'B (KB/s)':>10} {'L (ms)':>8} {'E':>8} "
             f"{'std B':>8} {'std L':>8} {'success':>8}"]
    for kind, efficiency in rank_by_efficiency(report):
        cells = [c.metrics for c in report.cells if c.strategy == kind]

        def mean(metric: str) -> float:
            return sum(m.metric(metric) for m in cells) / len(cells)

        lines.append(f"{kind.value:<17} {mean('mean_bandwidth_kbps'):>10.1f} "
                     f"{mean('mean_latency_ms'):>8.1f} {efficiency:>8.3f} "
                     f"{mean('std_bandwidth'):>8.1f} {mean('std_latency'):>8.1f} "
                     f"{mean('success_rate'):>8.1%}")
    lines.append('')
    lines.append("top performers:")
    for scenario_id, winners in top_performers(report).items():
        lines.append(f"  scenario {scenario_id}: " + ', '.join(
            f"{label}={kind.value}" for label, kind in winners.items()))
    return '\n'.join(lines)


def matrix_table(report: RunReport, metric: str = 'mean_efficiency') -> str:
    """Wide scenario x strategy table of one metric."""
    strategies = report.strategies
    lines = [f"{'scenario':>8} {'relays':>7} {'users':>9} "
             + ' '.join(f"{s.value:>17}" for s in strategies)]
    for scenario in report.scenarios:
        values = [report.cell(scenario.scenario_id, s).metrics.metric(metric)
                  for s in strategies]
        lines.append(f"{scenario.scenario_id:>8} {scenario.relays:>7} {scenario.users:>9} "
                     + ' '.join(f"{v:>17.3f}" for v in values))
    return '\n'.join(lines)


def gains_table(report: RunReport,
                baseline: StrategyKind = StrategyKind.RANDOM) -> str:
    lines = [f"versus {baseline.value}:",
             f"{'scenario':>8} {'strategy':<17} {'throughput':>11} {'latency':>9} {'E ratio':>8}"]
    for row in baseline_gains(report, baseline):
        if row['strategy'] == baseline:
            continue
        lines.append(f"{row['scenario_id']:>8} {row['strategy'].value:<17} "
                     f"{row['throughput_gain']:>+11.1%} {-row['latency_reduction']:>+9.1%} "
                     f"{row['efficiency_ratio']:>8.2f}")
    return '\n'.join(lines)


def trends_csv(report: RunReport, stream: TextIO):
    """Scenario-ordered series per strategy, for scalability plots."""
    writer = None
    for kind, series in scaling_trends(report).items():
        for point in series:
            row = dict(strategy=kind.value, **point)
            if writer is None:
                writer = csv.DictWriter(stream, fieldnames=list(row), lineterminator='\n')
                writer.writeheader()
            writer.writerow(row)
