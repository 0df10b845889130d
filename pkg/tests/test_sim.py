import math
import os
import shutil
import tempfile
import unittest
from dataclasses import astuple
from types import SimpleNamespace

import numpy as np

from acorp.core.errors import ConfigInvalid
from acorp.core.types import AcorpStatus
from acorp.sim.agents import (
    GoalVector,
    GrantDecision,
    GrantTier,
    KeyholderPolicy,
    Misalignment,
    cosine_similarity,
    decide_grant,
    make_agent,
    random_goal,
)
from acorp.sim.config import SIM_DEFAULTS, SimConfig, load_sim_config, sim_config
from acorp.sim.experiment import parse_seeds, run_experiment
from acorp.sim.implosion import expected_ticks_to_death, implosion_config, ticks_to_death
from acorp.sim.world import (
    NON_SCREENER,
    SCREENER,
    add_grantee,
    coherence_index,
    empty_world,
    expected_expropriation_loss,
    found_acorp,
    new_world,
    recruit,
    run_generation,
    tick,
)

ACCEPTANCE = bool(os.environ.get("ACORP_ACCEPTANCE"))

SMALL = {"population": 6, "generations": 3, "ticks": 5, "dimension": 4}


def keyholder(goal: GoalVector, threshold: float, noise: float, treasury: int = 1000):
    policy = KeyholderPolicy(noise, threshold, 0.5, 0.05, 0.1)
    return SimpleNamespace(goal=goal, policy=policy, treasury=treasury)


# python -m unittest tests.test_sim.TestAgents
class TestAgents(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_broad_rate_under_noise(self):
        # cosine 0.5, threshold 0.8, noise 0.3: BROAD iff the normal draw exceeds 1
        holder = keyholder(GoalVector((1.0, 0.0)), 0.8, 0.3)
        candidate = make_agent(0, GoalVector((0.5, math.sqrt(0.75))), 1.0, holder.goal)
        n = 20_000
        broad = sum(decide_grant(holder, candidate, self.rng).tier is GrantTier.BROAD for _ in range(n))
        self.assertAlmostEqual(broad / n, 0.5 * math.erfc(1 / math.sqrt(2)), delta=0.02)

    def test_decisions(self):
        goal = GoalVector((0.3, -0.7, 0.1))
        holder = keyholder(goal, 0.8, 0.0, treasury=1000)
        same = make_agent(0, goal, 1.0, goal)
        decision = decide_grant(holder, same, self.rng)
        self.assertEqual(decision.tier, GrantTier.BROAD)
        self.assertEqual(decision.cap, 500)
        opposite = make_agent(1, -goal, 1.0, goal)
        self.assertEqual(decide_grant(holder, opposite, self.rng).tier, GrantTier.REJECT)
        # between the threshold and its half: narrow
        middle = make_agent(2, GoalVector((0.6, 0.8)), 1.0, GoalVector((1.0, 0.0)))
        decision = decide_grant(keyholder(GoalVector((1.0, 0.0)), 0.8, 0.0), middle, self.rng)
        self.assertEqual(decision.tier, GrantTier.NARROW)
        self.assertEqual(decision.cap, 50)

    def test_misalignment_maps(self):
        self.assertEqual(Misalignment.propensity(1.0), 0.0)
        self.assertEqual(Misalignment.propensity(-1.0), 1.0)
        self.assertEqual(Misalignment.propensity(0.2), 0.0)
        self.assertAlmostEqual(Misalignment.propensity(0.0, "linear"), 0.5)
        goal = GoalVector((1.0, 0.0))
        self.assertEqual(make_agent(0, -goal, 1.0, goal).expropriation_propensity, 1.0)

    def test_goal_bounds(self):
        with self.assertRaises(ValueError):
            GoalVector((1.5, 0.0))
        with self.assertRaises(ValueError):
            GoalVector(())
        self.assertEqual(cosine_similarity(GoalVector((0.0, 0.0)), GoalVector((1.0, 0.0))), 0.0)
        with self.assertRaises(ConfigInvalid):
            KeyholderPolicy(0.1, 0.5, 0.1, 0.2, 0.1)

    def test_random_pair_coherence(self):
        values = [cosine_similarity(random_goal(self.rng, 8), random_goal(self.rng, 8)) for _ in range(10_000)]
        self.assertAlmostEqual(float(np.mean(values)), 0.0, delta=0.05)


# python -m unittest tests.test_sim.TestWorld
class TestWorld(unittest.TestCase):
    def world_with_grantee(self, **overrides):
        params = {
            "population": 1,
            "founding_roster": 0,
            "max_roster": 1,
            "compute_price": 0,
            "revenue_rate": 0.0,
            "audit_rate": 0.0,
            "liability_probability": 0.0,
        }
        params.update(overrides)
        world = empty_world(sim_config(**params), 5)
        goal = GoalVector((1.0, 0.0, 0.0, 0.0))
        acorp = found_acorp(world, goal, KeyholderPolicy.from_config(world.config, 0.9), SCREENER)
        agent = make_agent(world.next_agent_id, -goal, 1.0, goal)
        add_grantee(world, acorp, agent, GrantDecision(GrantTier.BROAD, 500, 1.0))
        return world, acorp

    def test_initial_coherence(self):
        world = new_world(sim_config(population=50), 7)
        self.assertEqual(len(world.living), 50)
        self.assertAlmostEqual(coherence_index(world), 0.0, delta=0.1)

    def test_forced_expropriation(self):
        world, acorp = self.world_with_grantee()
        tick(world)
        self.assertEqual(acorp.treasury, 500)
        self.assertTrue(acorp.roster[0].expropriated)
        self.assertEqual(acorp.losses["expropriation"], 500)
        self.assertEqual(world.gov.ledger.totals.external_burn, 500)

    def test_liability_confiscation(self):
        world, acorp = self.world_with_grantee(liability_probability=1.0, liability_magnitude=0.5)
        tick(world)
        self.assertEqual(acorp.treasury, 250)
        self.assertEqual(acorp.losses["liability"], 250)
        self.assertEqual(world.gov.ledger.totals.confiscated, 250)

    def test_compute_death(self):
        config = sim_config(population=1, founding_roster=0, initial_treasury=0, initial_compute=1, max_roster=0)
        world = empty_world(config, 1)
        acorp = found_acorp(world, GoalVector((1.0, 0.0)), KeyholderPolicy.from_config(config, 0.9), SCREENER)
        tick(world)
        self.assertFalse(acorp.alive)
        self.assertEqual(acorp.cause, "compute_exhaustion")
        self.assertEqual(world.deaths, ["compute_exhaustion"])

    def test_free_compute_fixed_point(self):
        config = sim_config(compute_price=0, founding_roster=0, max_roster=0, revenue_rate=0.0, **SMALL)
        world = new_world(config, 3)
        treasuries = [a.treasury for a in world.living]
        for _ in range(3):
            run_generation(world)
        self.assertEqual([a.treasury for a in world.living], treasuries)
        self.assertEqual(world.deaths, [])
        self.assertEqual(world.generation, 3)

    def test_screening_lowers_expected_loss(self):
        losses = {}
        for lineage, fraction in ((SCREENER, 1.0), (NON_SCREENER, 0.0)):
            config = sim_config(population=20, founding_roster=0, candidate_bias=-0.5, screener_fraction=fraction)
            world = new_world(config, 9)
            for acorp in world.living:
                self.assertEqual(acorp.lineage, lineage)
                for _ in range(config["max_roster"]):
                    recruit(world, acorp)
            losses[lineage] = expected_expropriation_loss(world)
        self.assertLess(losses[SCREENER], losses[NON_SCREENER])
        self.assertGreater(losses[NON_SCREENER], 0.0)

    def test_roster_limit(self):
        world = new_world(sim_config(population=2, founding_roster=5, max_roster=5), 2)
        self.assertIsNone(recruit(world, world.living[0]))

    def test_money_conservation_in_generation(self):
        world = new_world(sim_config(population=10), 4)
        ledger = world.gov.ledger
        start, before = sum(a.treasury for a in world.acorps), ledger.totals
        for _ in range(world.config["ticks"]):
            tick(world)
        after = ledger.totals
        drained = sum(
            getattr(after, key) - getattr(before, key)
            for key in ("confiscated", "paid_out", "external_burn", "compute_spend")
        )
        self.assertEqual(sum(a.treasury for a in world.acorps) + drained, start + after.revenue - before.revenue)
        self.assertEqual(after.minted, before.minted)
        self.assertGreater(after.external_burn, before.external_burn)

    def test_generational_replacement(self):
        config = sim_config(**SMALL)
        world = new_world(config, 6)
        parents = list(world.acorps)
        run_generation(world)
        self.assertEqual(len(world.acorps), config["population"])
        self.assertTrue(all(a.born_generation == 1 for a in world.acorps))
        for parent in parents:
            status = world.gov.registry.lookup(parent.acorp_id).status
            self.assertIn(status, (AcorpStatus.DISSOLVED, AcorpStatus.DEAD))

    def test_identical_population_offspring(self):
        goal = GoalVector((0.5, -0.25, 0.75, 0.0))
        for scale in (0.0, 0.05):
            config = sim_config(mutation_scale=scale, founding_roster=0, **SMALL)
            world = empty_world(config, 21)
            policy = KeyholderPolicy.from_config(config, 0.9)
            for _ in range(config["population"]):
                found_acorp(world, goal, policy, SCREENER)
            run_generation(world)
            self.assertEqual(len(world.acorps), config["population"])
            for child in world.acorps:
                delta = np.abs(np.asarray(astuple(child.policy)) - np.asarray(astuple(policy)))
                if scale == 0.0:
                    self.assertEqual(child.policy, policy)
                    self.assertEqual(child.goal, goal)
                else:
                    self.assertLess(float(delta.max()), 0.5)
                    self.assertLess(float(np.abs(child.goal.as_array() - goal.as_array()).max()), 0.5)
            if scale > 0.0:
                self.assertTrue(any(child.policy != policy for child in world.acorps))

    def test_zero_mutation_runs_identical(self):
        config = sim_config(mutation_scale=0.0, screening_noise=0.0, **SMALL)
        runs = []
        for _ in range(2):
            world = new_world(config, 12)
            for _ in range(2):
                run_generation(world)
            runs.append(
                (
                    world.gov.audit.head_hash,
                    [(a.acorp_id, a.goal, a.policy, a.treasury, a.lineage) for a in world.acorps],
                    world.deaths,
                )
            )
        self.assertEqual(runs[0], runs[1])

    def survival_rates(self, screener_fraction: float, seeds: list, **overrides) -> list:
        config = sim_config(screener_fraction=screener_fraction, **overrides)
        started = np.zeros(config["generations"])
        survived = np.zeros(config["generations"])
        for seed in seeds:
            world = new_world(config, seed)
            for g in range(config["generations"]):
                started[g] += len(world.living)

                def observe(world, g=g):
                    survived[g] += len(world.living)

                run_generation(world, observe=observe)
        return [float(s / n) if n else 0.0 for s, n in zip(survived, started)]

    def test_screeners_outlive_non_screeners_reduced(self):
        params = {"population": 8, "generations": 3}
        screeners = self.survival_rates(1.0, range(4), **params)
        others = self.survival_rates(0.0, range(4), **params)
        for g in range(params["generations"]):
            self.assertGreater(screeners[g], others[g])

    @unittest.skipUnless(ACCEPTANCE, "set ACORP_ACCEPTANCE=1 for acceptance-scale runs")
    def test_screeners_outlive_non_screeners_acceptance(self):
        screeners = self.survival_rates(1.0, range(100), generations=5)
        others = self.survival_rates(0.0, range(100), generations=5)
        for g in range(5):
            self.assertGreater(screeners[g], others[g])


# python -m unittest tests.test_sim.TestImplosion
class TestImplosion(unittest.TestCase):
    def mean_ticks(self, n_seeds: int, propensity: float) -> float:
        config = implosion_config()
        return float(np.mean([ticks_to_death(config, s, propensity) for s in range(n_seeds)]))

    def test_oracle_reduced(self):
        expected = expected_ticks_to_death(implosion_config(), 0.5)
        self.assertGreater(expected, 1.0)
        self.assertAlmostEqual(self.mean_ticks(500, 0.5), expected, delta=0.1 * expected)

    def test_no_propensity(self):
        # without expropriation only the burn drains: 120 money at 3 units per tick
        config = implosion_config()
        self.assertEqual(ticks_to_death(config, 0, 0.0), round(expected_ticks_to_death(config, 0.0)))

    def test_more_misalignment_dies_sooner(self):
        config = implosion_config()
        self.assertLess(expected_ticks_to_death(config, 0.9), expected_ticks_to_death(config, 0.2))

    @unittest.skipUnless(ACCEPTANCE, "set ACORP_ACCEPTANCE=1 for acceptance-scale runs")
    def test_oracle_acceptance(self):
        for propensity in (0.25, 0.5, 0.75):
            expected = expected_ticks_to_death(implosion_config(), propensity)
            self.assertAlmostEqual(self.mean_ticks(1000, propensity), expected, delta=0.1 * expected)


# python -m unittest tests.test_sim.TestExperiment
class TestExperiment(unittest.TestCase):
    def test_deterministic(self):
        first = run_experiment(SMALL, [1, 2])
        second = run_experiment(SMALL, [1, 2])
        self.assertEqual(first.to_bytes(), second.to_bytes())
        self.assertNotEqual(run_experiment(SMALL, [3]).to_bytes(), run_experiment(SMALL, [4]).to_bytes())

    def test_bookkeeping(self):
        metrics = run_experiment(SMALL, [1, 2, 3])
        self.assertEqual(sum(metrics.cause_histogram.values()), metrics.total_deaths)
        self.assertEqual(len(metrics.coherence_series), SMALL["generations"] + 1)
        for run in metrics.runs:
            self.assertEqual(len(run.survivor_counts), SMALL["generations"] + 1)
            self.assertEqual(len(run.alive_traces), SMALL["generations"])
            for trace in run.alive_traces:
                self.assertEqual(trace, sorted(trace, reverse=True))
                self.assertEqual(len(trace), SMALL["ticks"] + 1)
        self.assertIn("generation", metrics.summary_table())
        self.assertEqual(len(metrics.gnuplot_columns().splitlines()), SMALL["generations"] + 2)

    def test_single_run(self):
        metrics = run_experiment(dict(SMALL, generations=1), [8])
        self.assertEqual(metrics.seeds, [8])
        self.assertEqual(metrics.mean_survivors[0], SMALL["population"])

    def test_parse_seeds(self):
        self.assertEqual(parse_seeds("1..3"), [1, 2, 3])
        self.assertEqual(parse_seeds("1,4, 9"), [1, 4, 9])
        self.assertEqual(parse_seeds("0..1,5"), [0, 1, 5])
        for bad in ["", "x", "1..y"]:
            with self.assertRaises(ConfigInvalid):
                parse_seeds(bad)
        with self.assertRaises(ConfigInvalid):
            run_experiment(SMALL, [])

    @unittest.skipUnless(ACCEPTANCE, "set ACORP_ACCEPTANCE=1 for acceptance-scale runs")
    def test_selection_acceptance(self):
        metrics = run_experiment(None, list(range(100)), processes=os.cpu_count() or 1)
        rising, screeners_ahead = 0, 0
        for run in metrics.runs:
            first, last = run.coherence[0], run.coherence[-1]
            if first is not None and last is not None and last > first:
                rising += 1
            if run.lineages[-1][SCREENER] > run.lineages[-1][NON_SCREENER]:
                screeners_ahead += 1
        self.assertGreaterEqual(rising, 95)
        self.assertGreaterEqual(screeners_ahead, 90)


# python -m unittest tests.test_sim.TestSimConfig
class TestSimConfig(unittest.TestCase):
    def test_defaults(self):
        self.assertEqual(sim_config(), SIM_DEFAULTS)
        self.assertEqual(sim_config(population=3)["population"], 3)
        self.assertEqual(SimConfig(population=3), sim_config(population=3))

    def test_errors(self):
        for bad in [
            {"populaton": 3},
            {"population": 0},
            {"ticks": -1},
            {"ticks": 1.5},
            {"audit_rate": 1.5},
            {"candidate_bias": -2.0},
            {"misalignment_map": "cubic"},
            {"narrow_cap_fraction": 0.6, "broad_cap_fraction": 0.5},
            {"productivity_low": 2.0, "productivity_high": 1.0},
        ]:
            with self.assertRaises(ConfigInvalid):
                sim_config(**bad)

    def test_load(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, "sim.conf")
            with open(path, "w") as f:
                f.write("# small world\npopulation = 4\ncandidate_bias = -0.25\nmisalignment_map = linear\n")
            config = load_sim_config(path)
            self.assertEqual(config["population"], 4)
            self.assertEqual(config["candidate_bias"], -0.25)
            self.assertEqual(config["misalignment_map"], "linear")
            with open(path, "w") as f:
                f.write("population 4\n")
            with self.assertRaises(ConfigInvalid):
                load_sim_config(path)
            with self.assertRaises(ConfigInvalid):
                load_sim_config(os.path.join(tmp, "missing.conf"))
        finally:
            shutil.rmtree(tmp, ignore_errors=True)
