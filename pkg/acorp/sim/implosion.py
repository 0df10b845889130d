# Written by the acorp developers - 2026
#####################################################
import math
from functools import lru_cache

import numpy as np

from .agents import GoalVector, GrantDecision, GrantTier, KeyholderPolicy, make_agent
from .config import sim_config
from .world import SCREENER, add_grantee, empty_world, found_acorp, tick


# Two co-keyholders, each holding a broad grant over half the treasury and each misaligned with
# the A-corp by the given propensity. Nothing earns, nobody audits, nobody is recruited.
def implosion_config(**kwargs) -> dict:
    params = {
        "population": 1,
        "initial_treasury": 120,
        "initial_compute": 0,
        "compute_price": 1,
        "repurchase_units": 1,
        "base_burn": 1,
        "burn_per_grantee": 1,
        "revenue_rate": 0.0,
        "liability_probability": 0.0,
        "audit_rate": 0.0,
        "founding_roster": 0,
        "max_roster": 2,
        "broad_cap_fraction": 0.5,
    }
    params.update(kwargs)
    return sim_config(**params)


# Unit goals with cosine -p to the keyholder axis; the pair itself has cosine 2p^2 - 1
def co_keyholder_goals(dimension: int, propensity: float) -> tuple:
    assert dimension >= 2, "co-keyholder goals need two dimensions"
    keyholder = np.zeros(dimension)
    keyholder[0] = 1.0
    a, b = np.zeros(dimension), np.zeros(dimension)
    a[0] = b[0] = -propensity
    a[1], b[1] = math.sqrt(1 - propensity**2), -math.sqrt(1 - propensity**2)
    return GoalVector(tuple(keyholder)), GoalVector(tuple(a)), GoalVector(tuple(b))


def implosion_world(config: dict, seed: int, propensity: float = 0.5):
    world = empty_world(config, seed)
    keyholder, goal_a, goal_b = co_keyholder_goals(config["dimension"], propensity)
    acorp = found_acorp(world, keyholder, KeyholderPolicy.from_config(config, 1.0), SCREENER)
    cap = int(config["broad_cap_fraction"] * config["initial_treasury"])
    for goal in (goal_a, goal_b):
        agent = make_agent(world.next_agent_id, goal, 0.0, keyholder, config["misalignment_map"])
        world.next_agent_id += 1
        add_grantee(world, acorp, agent, GrantDecision(GrantTier.BROAD, cap, 1.0))
    world.alive_trace = [1]
    return world


def ticks_to_death(config: dict, seed: int, propensity: float = 0.5, max_ticks: int = 10_000) -> int:
    world = implosion_world(config, seed, propensity)
    for t in range(1, max_ticks + 1):
        tick(world)
        if not world.acorps[0].alive:
            return t
    return max_ticks


# Exact expected ticks to death by enumerating the (money, compute) chain. Every tick burns at least
# one unit of money-plus-compute value, so the chain is acyclic and memoized recursion terminates.
def expected_ticks_to_death(config: dict, propensity: float = 0.5) -> float:
    price = config["compute_price"]
    repurchase = config["repurchase_units"]
    cap = int(config["broad_cap_fraction"] * config["initial_treasury"])
    units = config["base_burn"] + 2 * config["burn_per_grantee"]
    assert price >= 1 and units >= 1, "the oracle needs a positive burn"

    def insolvent(money: int, compute: int) -> bool:
        return compute == 0 and money < price

    # Outcomes of the two expropriation draws: list of (probability, money, died)
    def expropriations(money: int, compute: int) -> list:
        outcomes = [(1.0, money, False)]
        for _ in range(2):
            step = []
            for prob, m, died in outcomes:
                if died:
                    step.append((prob, m, True))
                    continue
                step.append((prob * (1 - propensity), m, False))
                taken = min(cap, m)
                step.append((prob * propensity, m - taken, taken > 0 and insolvent(m - taken, compute)))
            outcomes = step
        return outcomes

    def burn(money: int, compute: int) -> tuple:
        purchased = min(max(0, units - compute), money // price)
        burned = min(units, compute + purchased)
        if compute + purchased - burned == 0:
            purchased += min(repurchase, (money - purchased * price) // price)
        return money - purchased * price, compute + purchased - burned

    @lru_cache(maxsize=None)
    def expected(money: int, compute: int) -> float:
        total = 1.0
        for prob, m, died in expropriations(money, compute):
            if died or prob == 0.0:
                continue
            m, c = burn(m, compute)
            if not insolvent(m, c):
                total += prob * expected(m, c)
        return total

    return expected(config["initial_treasury"], config["initial_compute"])
