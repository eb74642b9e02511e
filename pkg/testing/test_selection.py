import collections
import itertools
import logging
import unittest
import numpy

from torpath.circuit.circuit import audit_circuit
from torpath.errors import CircuitBuildFailure, InvalidParameter, NoCandidates
from torpath.network.params import ModelParameters
from torpath.network.regions import REGIONS
from torpath.network.relay import Role, ROLES
from torpath.network.topology import generate_topology, update_congestion
from torpath.selection.base import (EXIT, MIDDLE, SelectionContext, conflicting_positions,
                                   passes_diversity, weighted_sample)
from torpath.selection.bandwidth import select_random
from torpath.selection.congestion import congestion_score, select_congestion_aware
from torpath.selection.dispatch import select
from torpath.selection.geographic import feasible_triples, select_geo_diversity, select_geo_latency
from torpath.selection.guard import GuardState, composite_scores, guard_overflow, select_guard
from torpath.selection.kinds import STRATEGIES
from torpath.utils.logger import setup_logging

from helpers import relay, topology_of, trio

NA, EU, AS, ROW = REGIONS


def context(topology, seed=1, **kwargs):
    return SelectionContext.seeded(topology, seed, **kwargs)


class TestWeightedSample(unittest.TestCase):

    def test_frequencies(self):
        rng = numpy.random.default_rng(99)
        draws = [weighted_sample([0, 1, 2], [100, 300, 600], rng) for _ in range(100000)]
        counts = numpy.bincount(draws, minlength=3) / len(draws)
        for observed, expected in zip(counts, (0.1, 0.3, 0.6)):
            self.assertAlmostEqual(float(observed), expected, delta=0.01)

    def test_uniform(self):
        rng = numpy.random.default_rng(5)
        draws = [weighted_sample(list(range(5)), [2.0] * 5, rng) for _ in range(100000)]
        for share in numpy.bincount(draws) / len(draws):
            self.assertAlmostEqual(float(share), 0.2, delta=0.01)

    def test_degenerate(self):
        rng = numpy.random.default_rng(0)
        self.assertEqual({weighted_sample([7], [0.5], rng) for _ in range(100)}, {7})
        with self.assertRaises(NoCandidates):
            weighted_sample([], [], rng)
        with self.assertRaises(InvalidParameter):
            weighted_sample([1, 2], [1.0, 0.0], rng)
        with self.assertRaises(InvalidParameter):
            weighted_sample([1, 2], [1.0], rng)


class TestDiversity(unittest.TestCase):

    def test_examples(self):
        topology = topology_of([relay(0, Role.GUARD, as_number=4),
                                relay(1, Role.MIDDLE, as_number=4),
                                relay(2, Role.EXIT, as_number=4),
                                relay(3, Role.MIDDLE, prefix=0),
                                relay(4, Role.MIDDLE)])
        self.assertFalse(passes_diversity(topology, 0, 1, 2))
        self.assertFalse(passes_diversity(topology, 0, 3, 2))
        self.assertFalse(passes_diversity(topology, 0, 0, 2))
        # guard and exit share AS4 whatever the middle
        self.assertFalse(passes_diversity(topology, 0, 4, 2))
        self.assertTrue(passes_diversity(trio(), 0, 1, 2))

    def test_brute_force(self):
        topology = generate_topology(300, seed=21)
        rng = numpy.random.default_rng(3)
        for _ in range(3000):
            triple = [int(i) for i in rng.integers(0, len(topology), size=3)]
            relays = [topology[i] for i in triple]
            expected = all(a.id != b.id and a.as_number != b.as_number
                           and (a.ipv4 >> 16) != (b.ipv4 >> 16)
                           for a, b in itertools.combinations(relays, 2))
            self.assertEqual(passes_diversity(topology, *triple), expected)


class TestRandom(unittest.TestCase):

    def test_forced(self):
        ctx = context(trio())
        for _ in range(10):
            self.assertEqual(select_random(ctx).relays, (0, 1, 2))

    def test_unsatisfiable(self):
        topology = topology_of([relay(0, Role.GUARD, prefix=7),
                                relay(1, Role.MIDDLE),
                                relay(2, Role.EXIT, prefix=7),
                                relay(3, Role.EXIT, prefix=7)])
        with self.assertRaises(CircuitBuildFailure):
            select_random(context(topology))

    def test_exit_port(self):
        topology = topology_of([relay(0, Role.GUARD), relay(1, Role.MIDDLE),
                                relay(2, Role.EXIT, bandwidth=5000.0),
                                relay(3, Role.EXIT, ports=(80, 443, 22))])
        ctx = context(topology, target_port=22)
        self.assertEqual({select_random(ctx).exit_id for _ in range(50)}, {3})
        with self.assertRaises(CircuitBuildFailure):
            select_random(context(topology, target_port=25))

    def test_middle_exit_clash(self):
        # the only middle shares its AS with the heavier exit
        topology = topology_of([relay(0, Role.GUARD),
                                relay(1, Role.MIDDLE, as_number=50),
                                relay(2, Role.EXIT, bandwidth=2000.0, as_number=50),
                                relay(3, Role.EXIT)])
        self.assertEqual(conflicting_positions(topology, (0, 1, 2)), {MIDDLE, EXIT})
        self.assertTrue(passes_diversity(topology, 0, 1, 3))
        for seed in range(200):
            self.assertEqual(select_random(context(topology, seed=seed)).relays, (0, 1, 3))

    def test_selection_law(self):
        rng = numpy.random.default_rng(17)
        roles = [Role.GUARD] * 15 + [Role.MIDDLE] * 70 + [Role.EXIT] * 15
        topology = topology_of([relay(i, role, bandwidth=float(rng.lognormal(6.0, 0.8)))
                                for i, role in enumerate(roles)])
        ctx = context(topology, seed=2)
        counts = [collections.Counter() for _ in ROLES]
        n = 100000
        for _ in range(n):
            for position, relay_id in enumerate(select_random(ctx).relays):
                counts[position][relay_id] += 1
        for position, role in enumerate(ROLES):
            ids = topology.role_index[role]
            weights = topology.bandwidths[list(ids)]
            expected = weights / weights.sum()
            observed = numpy.array([counts[position][i] / n for i in ids])
            self.assertLessEqual(0.5 * float(numpy.abs(observed - expected).sum()), 0.02)

    def test_determinism(self):
        topology = generate_topology(500, seed=31)
        update_congestion(topology, 25.0, 0)
        for kind in STRATEGIES:
            a, b = context(topology, seed=8), context(topology, seed=8)
            circuits = [select(kind, a) for _ in range(200)]
            self.assertEqual(circuits, [select(kind, b) for _ in range(200)])
            self.assertTrue(all(c.strategy == kind for c in circuits))


class TestGuard(unittest.TestCase):

    def guards(self):
        bandwidths = [100, 900, 400, 800, 200, 700, 300, 600, 500]
        stabilities = [0.9, 0.1, 0.5, 0.6, 0.95, 0.2, 0.3, 0.4, 0.7]
        relays = [relay(i, Role.GUARD, bandwidth=float(b), stability=s)
                  for i, (b, s) in enumerate(zip(bandwidths, stabilities))]
        relays += [relay(9 + k, Role.MIDDLE) for k in range(3)]
        relays += [relay(12 + k, Role.EXIT) for k in range(3)]
        return topology_of(relays), bandwidths, stabilities

    def test_top_scoring(self):
        topology, bandwidths, stabilities = self.guards()
        scores = {i: 0.5 * sum(1 for other in bandwidths if other <= b) / 9 + 0.5 * s
                  for i, (b, s) in enumerate(zip(bandwidths, stabilities))}
        expected = sorted(scores, key=lambda g: (-scores[g], g))[:3]
        computed = composite_scores(topology)
        for g, score in scores.items():
            self.assertAlmostEqual(computed[g], score)
        self.assertEqual(GuardState.top_scoring(topology).guard_ids, expected)
        # 3: 8/9 and 0.6, 8: 5/9 and 0.7, 4: 2/9 and 0.95
        self.assertEqual(expected, [3, 8, 4])

    def test_rotation(self):
        topology, _, _ = self.guards()
        ctx = context(topology)
        first = [select_guard(ctx).guard_id for _ in range(3)]
        self.assertEqual(sorted(first), sorted(ctx.state.guard_ids))
        self.assertEqual(first, sorted(first))
        for _ in range(97):
            select_guard(ctx)
        self.assertEqual(sorted(ctx.state.use_counts.values()), [33, 33, 34])

    def test_skips_blocked_guard(self):
        topology = topology_of([relay(0, Role.GUARD, bandwidth=900.0, stability=0.9, as_number=50),
                                relay(1, Role.GUARD, bandwidth=800.0, stability=0.8),
                                relay(2, Role.GUARD, bandwidth=700.0, stability=0.7),
                                relay(3, Role.MIDDLE, as_number=50),
                                relay(4, Role.EXIT)])
        ctx = context(topology)
        used = [select_guard(ctx).guard_id for _ in range(4)]
        self.assertNotIn(0, used)
        self.assertEqual(ctx.state.use_counts[0], 0)

    def test_too_few_guards(self):
        with self.assertRaises(CircuitBuildFailure):
            select_guard(context(trio()))

    def test_overflow(self):
        topology = generate_topology(1000, seed=4)
        self.assertEqual(guard_overflow(topology, 1000), 0.0)
        self.assertEqual(guard_overflow(topology, 10000), 0.0)
        # 3000 and 7500 guards, each persistent one carrying 750 guards' share
        self.assertAlmostEqual(guard_overflow(topology, 20000), 0.25)
        self.assertAlmostEqual(guard_overflow(topology, 50000), 0.70)
        self.assertEqual(context(topology).network_relays, 1000)

    def test_saturated_guards(self):
        params = ModelParameters().with_overrides({'guard_capacity': 1e-6})
        topology = generate_topology(2000, seed=12, params=params)
        saturated = context(topology, seed=3, network_relays=100000)
        circuits = [select_guard(saturated) for _ in range(300)]
        self.assertGreater(saturated.state.overflow, 0.999)
        self.assertEqual(sorted(saturated.state.use_counts.values()), [100, 100, 100])
        for circuit in circuits:
            self.assertIn(circuit.guard_id, saturated.state.guard_ids)
            self.assertEqual(len(set(circuit.regions)), 3)
            self.assertEqual(audit_circuit(topology, circuit, params.target_port), [])
        unsaturated = context(topology, seed=3)
        distinct = sum(len(set(select_guard(unsaturated).regions)) == 3 for _ in range(300))
        self.assertEqual(unsaturated.state.overflow, 0.0)
        self.assertLess(distinct, 270)


class TestCongestionAware(unittest.TestCase):

    def test_score(self):
        self.assertEqual(congestion_score(400.0, 0.5), 200.0)
        self.assertGreater(congestion_score(300.0, 0.0), congestion_score(400.0, 0.5))

    def test_threshold(self):
        topology = topology_of([relay(0, Role.GUARD, bandwidth=5000.0, congestion=0.70),
                                relay(1, Role.GUARD, bandwidth=100.0, congestion=0.69),
                                relay(2, Role.MIDDLE), relay(3, Role.EXIT)])
        ctx = context(topology)
        self.assertEqual({select_congestion_aware(ctx).guard_id for _ in range(20)}, {1})

    def test_all_congested(self):
        topology = topology_of([relay(0, Role.GUARD), relay(1, Role.MIDDLE),
                                relay(2, Role.EXIT, congestion=0.9)])
        with self.assertRaises(CircuitBuildFailure):
            select_congestion_aware(context(topology))

    def test_top_quartile(self):
        relays = [relay(i, Role.GUARD, bandwidth=100.0 * (i + 1)) for i in range(8)]
        relays += [relay(8, Role.MIDDLE), relay(9, Role.EXIT)]
        ctx = context(topology_of(relays))
        chosen = collections.Counter(select_congestion_aware(ctx).guard_id for _ in range(400))
        self.assertEqual(set(chosen), {6, 7})

    def test_generated(self):
        topology = generate_topology(1000, seed=41)
        ctx = context(topology)
        threshold = topology.params.congestion_threshold
        for step in range(4):
            update_congestion(topology, 100.0, step)
            for _ in range(100):
                circuit = select_congestion_aware(ctx)
                self.assertTrue(all(c < threshold for c in circuit.congestion))
                self.assertEqual(audit_circuit(topology, circuit, 443, threshold), [])


class TestGeographic(unittest.TestCase):

    def test_latency_floor(self):
        topology = generate_topology(1000, seed=51)
        update_congestion(topology, 50.0, 0)
        ctx = context(topology)
        floor = topology.latency.min_triple_cost()
        for _ in range(300):
            circuit = select_geo_latency(ctx)
            self.assertEqual(circuit.latency_ms, 40.0)
            self.assertEqual(circuit.latency_ms, floor)
            self.assertEqual(audit_circuit(topology, circuit, 443), [])

    def test_infeasible_region(self):
        relays = [relay(0, Role.GUARD, region=EU), relay(1, Role.GUARD, region=EU),
                  relay(2, Role.MIDDLE, region=EU), relay(3, Role.MIDDLE, region=EU),
                  relay(4, Role.EXIT, region=NA), relay(5, Role.EXIT, region=AS)]
        topology = topology_of(relays)
        ctx = context(topology)
        populated = {role: {topology[i].region for i in topology.role_index[role]}
                     for role in ROLES}
        brute = min(topology.latency(g, m) + topology.latency(m, e)
                    for g, m, e in itertools.product(REGIONS, repeat=3)
                    if g in populated[Role.GUARD] and m in populated[Role.MIDDLE]
                    and e in populated[Role.EXIT])
        self.assertEqual(brute, 65.0)
        self.assertEqual(feasible_triples(ctx)[0], (EU, EU, NA))
        for _ in range(20):
            circuit = select_geo_latency(ctx)
            self.assertEqual(circuit.latency_ms, brute)
            self.assertEqual(circuit.exit_id, 4)

    def test_fallback_triple(self):
        # the only north-american exit shares the guards' AS
        relays = [relay(0, Role.GUARD, region=EU, as_number=70),
                  relay(1, Role.MIDDLE, region=EU),
                  relay(2, Role.EXIT, region=NA, as_number=70),
                  relay(3, Role.EXIT, region=AS)]
        ctx = context(topology_of(relays))
        circuit = select_geo_latency(ctx)
        self.assertEqual(circuit.exit_id, 3)
        self.assertEqual(circuit.latency_ms, 110.0)

    def test_diversity(self):
        topology = generate_topology(1000, seed=61)
        update_congestion(topology, 25.0, 0)
        ctx = context(topology)
        for _ in range(2000):
            circuit = select_geo_diversity(ctx)
            self.assertEqual(len(set(circuit.regions)), 3)

    def test_degraded_diversity(self):
        relays = [relay(0, Role.GUARD, region=AS), relay(1, Role.MIDDLE, region=AS),
                  relay(2, Role.MIDDLE, region=AS), relay(3, Role.EXIT, region=EU),
                  relay(4, Role.EXIT, region=AS)]
        ctx = context(topology_of(relays))
        for _ in range(50):
            circuit = select_geo_diversity(ctx)
            self.assertEqual(circuit.regions[0], circuit.regions[1])
            self.assertEqual(circuit.exit_id, 3)


def main():
    setup_logging(logging.WARNING)
    unittest.main()


if __name__ == '__main__':
    main()
