"""Check the desk-scale behaviour of the model over several seeds.

For every seed the full scenario x strategy matrix is run and each
acceptance property is reported as ok/FAIL, together with the values it
was judged on.
"""
import argparse
import logging
import sys
import time

from torpath.circuit.circuit import audit_circuit
from torpath.harness.runner import RunReport, rank_by_efficiency, run_matrix
from torpath.harness.scenarios import default_scenarios
from torpath.network.params import ModelParameters
from torpath.selection.kinds import STRATEGIES
from torpath.utils.logger import setup_logging

LOGGER = logging.getLogger('calibration')

RANDOM, GUARD, CONGESTION, LATENCY, DIVERSITY = STRATEGIES


class Verdicts:
    def __init__(self, seed: int):
        self.seed = seed
        self.checks = []

    def check(self, name: str, ok: bool, detail: str):
        self.checks.append((name, ok, detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def __str__(self):
        lines = [f"seed {self.seed}:"]
        for name, ok, detail in self.checks:
            lines.append(f"  {'ok  ' if ok else 'FAIL'} {name:<22} {detail}")
        return '\n'.join(lines)


def judge(report: RunReport, topologies, seed: int) -> Verdicts:
    verdicts = Verdicts(seed)
    metrics = {(c.scenario.scenario_id, c.strategy): c.metrics for c in report.cells}
    ids = [s.scenario_id for s in report.scenarios]
    means = dict(rank_by_efficiency(report))

    order = (means[LATENCY] > means[CONGESTION] > max(means[GUARD], means[RANDOM])
             and min(means[GUARD], means[RANDOM]) > means[DIVERSITY]
             and means[GUARD] >= 0.9 * means[RANDOM]
             and all(metrics[(i, LATENCY)].mean_efficiency > metrics[(i, CONGESTION)].mean_efficiency
                     for i in ids))
    verdicts.check("efficiency ordering", order,
                   ' '.join(f"{k.value}={v:.2f}" for k, v in rank_by_efficiency(report)))

    floor = all(metrics[(i, LATENCY)].mean_latency_ms == 40.0
                and metrics[(i, LATENCY)].std_latency == 0.0 for i in ids)
    verdicts.check("latency floor", floor,
                   ' '.join(f"{metrics[(i, LATENCY)].mean_latency_ms:.1f}" for i in ids))

    ratios = [metrics[(i, CONGESTION)].mean_bandwidth_kbps / metrics[(i, RANDOM)].mean_bandwidth_kbps
              for i in ids]
    verdicts.check("throughput gain", all(1.25 <= r <= 1.55 for r in ratios),
                   ' '.join(f"{r:.3f}" for r in ratios))

    rates = [c.metrics.success_rate for c in report.cells]
    verdicts.check("build success", min(rates) == 1.0, f"min {min(rates):.4f}")

    if 3 in ids and 5 in ids:
        growth = metrics[(5, GUARD)].mean_latency_ms / metrics[(3, GUARD)].mean_latency_ms - 1
        verdicts.check("guard latency growth", growth >= 0.03, f"{growth:+.1%}")

    violations = 0
    for cell in report.cells:
        topology = topologies[cell.scenario.scenario_id]
        threshold = topology.params.congestion_threshold if cell.strategy == CONGESTION else None
        violations += sum(len(audit_circuit(topology, c, topology.params.target_port, threshold))
                          for c in cell.circuits)
    verdicts.check("constraint audit", violations == 0, f"{violations} violation(s)")
    return verdicts


def main():
    parser = argparse.ArgumentParser(description="Desk-scale calibration check")
    parser.add_argument("--seeds", type=int, nargs='+', default=[1, 2, 3, 42])
    parser.add_argument("--scale", type=float, default=0.05)
    parser.add_argument("--config", type=str, help="YAML model overrides")
    parser.add_argument("-v", "--verbose", help="activate verbose logs",
                        action='store_const', dest="loglevel",
                        const=logging.INFO, default=logging.WARNING)
    args = parser.parse_args()
    setup_logging(level=args.loglevel, without=['torpath'])

    params = ModelParameters.from_yaml(args.config) if args.config else ModelParameters()
    failed = False
    for seed in args.seeds:
        topologies = dict()
        tic = time.process_time()
        report = run_matrix(default_scenarios(), list(STRATEGIES), seed, args.scale, params,
                            keep_circuits=True,
                            on_topology=lambda s, t: topologies.setdefault(s.scenario_id, t))
        toc = time.process_time()
        LOGGER.warning("seed %d duration: %.3f", seed, toc - tic)
        verdicts = judge(report, topologies, seed)
        print(verdicts)
        failed = failed or not verdicts.ok
    sys.exit(1 if failed else 0)


if __name__ == '__main__':
    main()
