"""Desk-scale runs of the full scenario x strategy matrix."""
import logging
import unittest

from torpath.circuit.circuit import audit_circuit
from torpath.harness.runner import rank_by_efficiency, run_matrix
from torpath.harness.scenarios import default_scenarios
from torpath.selection.kinds import STRATEGIES
from torpath.utils.logger import setup_logging

RANDOM, GUARD, CONGESTION, LATENCY, DIVERSITY = STRATEGIES

SEED = 42
SCALE = 0.05


class TestDeskScale(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.topologies = dict()
        cls.report = run_matrix(default_scenarios(), list(STRATEGIES), SEED, SCALE,
                                keep_circuits=True,
                                on_topology=lambda s, t: cls.topologies.setdefault(
                                    s.scenario_id, t))

    def metrics(self, scenario_id, strategy):
        return self.report.cell(scenario_id, strategy).metrics

    def test_matrix(self):
        self.assertEqual(len(self.report), 25)

    def test_efficiency_ordering(self):
        means = dict(rank_by_efficiency(self.report))
        self.assertEqual(rank_by_efficiency(self.report)[0][0], LATENCY)
        self.assertGreater(means[LATENCY], means[CONGESTION])
        self.assertGreater(means[CONGESTION], means[GUARD])
        self.assertGreater(means[CONGESTION], means[RANDOM])
        self.assertGreaterEqual(means[GUARD], 0.9 * means[RANDOM])
        self.assertGreater(means[RANDOM], means[DIVERSITY])
        for scenario in self.report.scenarios:
            sid = scenario.scenario_id
            self.assertGreater(self.metrics(sid, LATENCY).mean_efficiency,
                               self.metrics(sid, CONGESTION).mean_efficiency)

    def test_latency_floor(self):
        for scenario in self.report.scenarios:
            cell = self.report.cell(scenario.scenario_id, LATENCY)
            self.assertEqual(cell.metrics.mean_latency_ms, 40.0)
            self.assertEqual(cell.metrics.std_latency, 0.0)
            self.assertTrue(all(c.latency_ms == 40.0 for c in cell.circuits))

    def test_throughput_gain(self):
        for scenario in self.report.scenarios:
            sid = scenario.scenario_id
            ratio = (self.metrics(sid, CONGESTION).mean_bandwidth_kbps
                     / self.metrics(sid, RANDOM).mean_bandwidth_kbps)
            self.assertTrue(1.25 <= ratio <= 1.55, f"scenario {sid}: ratio {ratio:.3f}")

    def test_build_success(self):
        for cell in self.report:
            self.assertEqual(cell.metrics.success_rate, 1.0, str(cell))

    def test_constraints(self):
        for cell in self.report:
            topology = self.topologies[cell.scenario.scenario_id]
            threshold = topology.params.congestion_threshold if cell.strategy == CONGESTION else None
            for circuit in cell.circuits:
                self.assertEqual(audit_circuit(topology, circuit, topology.params.target_port,
                                               threshold), [])

    def test_random_throughput_stable(self):
        base = self.metrics(3, RANDOM).mean_bandwidth_kbps
        for sid in (4, 5):
            self.assertGreaterEqual(self.metrics(sid, RANDOM).mean_bandwidth_kbps, 0.9 * base)

    def test_guard_latency_growth(self):
        base = self.metrics(3, GUARD).mean_latency_ms
        self.assertGreaterEqual(self.metrics(5, GUARD).mean_latency_ms, 1.03 * base)


def main():
    setup_logging(logging.WARNING)
    unittest.main()


if __name__ == '__main__':
    main()
