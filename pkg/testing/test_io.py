import io
import json
import logging
import os
import tempfile
import unittest

from torpath.circuit.circuit import Circuit
from torpath.errors import SchemaMismatch
from torpath.harness.aggregate import METRICS
from torpath.harness.runner import run_matrix
from torpath.harness.scenarios import default_scenarios
from torpath.network.topology import generate_topology
from torpath.selection.kinds import StrategyKind
from torpath.utils.io import (CircuitLog, dump_topology, gains_table, load_topology,
                              matrix_table, read_circuit_log, read_results, significant,
                              summary_table, trends_csv, validate_results, write_csv,
                              write_results)
from torpath.utils.logger import setup_logging

STRATEGIES = [StrategyKind.RANDOM, StrategyKind.CONGESTION_AWARE, StrategyKind.GEO_LATENCY]


class TestResults(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.report = run_matrix(default_scenarios()[:2], STRATEGIES, seed=9, scale=0.01,
                                keep_circuits=True)

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.filename = os.path.join(self.directory.name, 'results.json')

    def tearDown(self):
        self.directory.cleanup()

    def test_significant(self):
        self.assertEqual(significant(3.14159265), 3.14159)
        self.assertEqual(significant({'a': [123456789.0, 2]}), {'a': [123457000.0, 2]})
        self.assertEqual(significant(True), True)

    def test_round_trip(self):
        write_results(self.report, self.filename)
        with open(self.filename, 'r', encoding='utf-8') as stream:
            data = json.load(stream)
        validate_results(data)
        self.assertEqual(set(data), {'config', 'cells', 'ranking'})
        self.assertNotIn('mean_build_time_us', data['cells'][0]['metrics'])
        loaded = read_results(self.filename)
        self.assertEqual(len(loaded), 6)
        self.assertEqual(loaded.seed, 9)
        self.assertEqual(loaded.parameters, significant(self.report.parameters))
        for before, after in zip(self.report, loaded):
            self.assertAlmostEqual(before.metrics.mean_efficiency, after.metrics.mean_efficiency,
                                   delta=1e-5 * before.metrics.mean_efficiency)

    def test_timing(self):
        write_results(self.report, self.filename, with_timing=True)
        with open(self.filename, 'r', encoding='utf-8') as stream:
            data = json.load(stream)
        self.assertIn('mean_build_time_us', data['cells'][0]['metrics'])
        validate_results(data)

    def test_missing_field(self):
        data = significant(self.report.to_dict())
        del data['cells'][1]['metrics']['mean_latency_ms']
        with self.assertRaises(SchemaMismatch) as ctx:
            validate_results(data)
        self.assertEqual(ctx.exception.field, 'cells/1/metrics/mean_latency_ms')
        del data['ranking']
        with self.assertRaises(SchemaMismatch):
            validate_results(data)

    def test_bad_values(self):
        data = significant(self.report.to_dict())
        data['cells'][0]['strategy'] = 'nosuch'
        with self.assertRaises(SchemaMismatch) as ctx:
            validate_results(data)
        self.assertEqual(ctx.exception.field, 'cells/0/strategy')

    def test_truncated(self):
        write_results(self.report, self.filename)
        with open(self.filename, 'r', encoding='utf-8') as stream:
            text = stream.read()
        with open(self.filename, 'w', encoding='utf-8') as stream:
            stream.write(text[:len(text) // 2])
        with self.assertRaises(SchemaMismatch) as ctx:
            read_results(self.filename)
        self.assertEqual(ctx.exception.field, '$')

    def test_tables(self):
        stream = io.StringIO()
        write_csv(self.report, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], 'scenario_id,strategy,metric,value')
        self.assertEqual(len(lines) - 1, 2 * 3 * len(METRICS))
        self.assertIn('geo_latency', summary_table(self.report))
        self.assertEqual(len(matrix_table(self.report).splitlines()), 3)
        self.assertEqual(len(gains_table(self.report).splitlines()), 2 + 2 * 2)
        stream = io.StringIO()
        trends_csv(self.report, stream)
        self.assertEqual(len(stream.getvalue().splitlines()), 1 + 3 * 2)


class TestCircuitLog(unittest.TestCase):

    def circuits(self):
        report = run_matrix(default_scenarios()[:1], [StrategyKind.GUARD], seed=3, scale=0.01,
                            keep_circuits=True)
        return report.cells[0].scenario, report.cells[0].circuits

    def test_formats(self):
        scenario, circuits = self.circuits()
        for fmt in CircuitLog.FORMATS:
            stream = io.StringIO()
            log = CircuitLog(stream, fmt)
            for c in circuits:
                log(scenario, c)
            self.assertEqual(log.count, len(circuits))
            stream.seek(0)
            rows = read_circuit_log(stream, fmt)
            self.assertEqual(len(rows), len(circuits))
            self.assertIn(rows[0]['scenario_id'], (1, '1'))
            self.assertEqual([Circuit.from_row(row) for row in rows], circuits)

    def test_topology_dump(self):
        topology = generate_topology(150, seed=12)
        with tempfile.TemporaryDirectory() as directory:
            filename = dump_topology(topology, directory, default_scenarios()[2])
            self.assertTrue(filename.endswith('topology-3.json'))
            self.assertEqual(load_topology(filename), topology)


def main():
    setup_logging(logging.WARNING)
    unittest.main()


if __name__ == '__main__':
    main()
