# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from ..core.scope import make_scope
from ..core.signing import public_key_bytes
from ..core.types import AcorpId, AcorpStatus, ActionClass, ActionKind, FOREVER, Grant, OwnerRecord
from ..governance.base import Governance
from ..governance.ledger import EXTERNAL_SINK, DeathNotice, ledger_config
from .agents import (
    GoalVector,
    GrantDecision,
    GrantTier,
    KeyholderPolicy,
    SimAgent,
    candidate_goal,
    cosine_similarity,
    decide_grant,
    make_agent,
    mutate_goal,
    random_goal,
)

logger = logging.getLogger(__name__)

SCREENER = "screener"
NON_SCREENER = "non-screener"

CAUSES = ["compute_exhaustion", "expropriation_collapse", "liability"]


@dataclass
class Grantee:
    agent: SimAgent
    tier: GrantTier
    cap: int
    token: object
    holder_seed: bytes
    expropriated: bool = False


@dataclass
class SimAcorp:
    acorp_id: AcorpId
    goal: GoalVector
    policy: KeyholderPolicy
    lineage: str
    master_seed: bytes
    master_token: object
    world: "SimWorld" = field(repr=False)
    roster: list = field(default_factory=list)
    alive: bool = True
    cause: Union[str, None] = None
    born_generation: int = 0
    losses: dict = field(default_factory=lambda: {"compute": 0, "expropriation": 0, "liability": 0})

    @property
    def treasury(self) -> int:
        return self.world.gov.ledger.account(self.acorp_id).money

    @property
    def compute(self) -> int:
        return self.world.gov.ledger.account(self.acorp_id).compute_credits

    # Largest drain on the treasury decides the recorded cause of death
    def death_cause(self) -> str:
        drains = {
            "compute_exhaustion": self.losses["compute"],
            "expropriation_collapse": self.losses["expropriation"],
            "liability": self.losses["liability"],
        }
        return max(CAUSES, key=lambda c: drains[c])


@dataclass
class SimWorld:
    generation: int
    acorps: list
    rng_seed: int
    config: dict
    gov: Governance = field(repr=False)
    rng: np.random.Generator = field(repr=False)
    now: int = 0
    next_agent_id: int = 0
    deaths: list = field(default_factory=list)
    alive_trace: list = field(default_factory=list)

    @property
    def living(self) -> list:
        return [a for a in self.acorps if a.alive]


# Construction
################################################
def empty_world(config: dict, seed: int) -> SimWorld:
    # Compute price 0 means free compute; the ledger still needs a positive rate
    params = ledger_config(max(1, config["compute_price"]), config["repurchase_units"])
    return SimWorld(
        generation=0,
        acorps=[],
        rng_seed=int(seed),
        config=config,
        gov=Governance(id_seed=int(seed), ledger_params=params),
        rng=np.random.default_rng(int(seed)),
    )


def new_world(config: dict, seed: int) -> SimWorld:
    world = empty_world(config, seed)
    n_screeners = int(round(config["population"] * config["screener_fraction"]))
    for i in range(config["population"]):
        if i < n_screeners:
            lineage, threshold = SCREENER, config["screener_threshold"]
        else:
            lineage, threshold = NON_SCREENER, config["nonscreener_threshold"]
        acorp = found_acorp(
            world,
            random_goal(world.rng, config["dimension"]),
            KeyholderPolicy.from_config(config, threshold),
            lineage,
        )
        # Founding rosters are unscreened broad grants drawn from the open pool
        for _ in range(config["founding_roster"]):
            agent = draw_candidate(world, acorp, bias=0.0)
            cap = int(acorp.policy.broad_cap_fraction * acorp.treasury)
            add_grantee(world, acorp, agent, GrantDecision(GrantTier.BROAD, cap, 1.0))
    world.alive_trace = [len(world.living)]
    return world


def found_acorp(
    world: SimWorld,
    goal: GoalVector,
    policy: KeyholderPolicy,
    lineage: str,
    treasury: Union[int, None] = None,
) -> SimAcorp:
    config = world.config
    master_seed = world.rng.bytes(32)
    capital = config["initial_treasury"] if treasury is None else treasury
    label = str(world.next_agent_id)
    owner = OwnerRecord("owner-" + label, "sim-" + label, config["owner_stake"])
    world.next_agent_id += 1

    record = world.gov.registry.register_acorp(
        owner, master_seed, capital, config["initial_compute"], world.now
    )
    acorp = SimAcorp(
        acorp_id=record.id,
        goal=goal,
        policy=policy,
        lineage=lineage,
        master_seed=master_seed,
        master_token=world.gov.capability.master_of(record.id),
        world=world,
        born_generation=world.generation,
    )
    world.acorps.append(acorp)
    return acorp


def draw_candidate(world: SimWorld, acorp: SimAcorp, bias: Union[float, None] = None) -> SimAgent:
    config = world.config
    bias = config["candidate_bias"] if bias is None else bias
    goal = candidate_goal(world.rng, acorp.goal, bias)
    productivity = float(world.rng.uniform(config["productivity_low"], config["productivity_high"]))
    agent = make_agent(world.next_agent_id, goal, productivity, acorp.goal, config["misalignment_map"])
    world.next_agent_id += 1
    return agent


# Issues a real child token of the master: TRANSACT on payments up to the decided cap
def add_grantee(world: SimWorld, acorp: SimAcorp, agent: SimAgent, decision: GrantDecision) -> Grantee:
    resource = world.gov.ledger.config["action_resources"]["TRANSFER"][1]
    # Child caps can never exceed the master cap fixed at registration
    master_cap = max(g.monetary_cap for g in acorp.master_token.scope.grants)
    cap = min(max(0, decision.cap), master_cap)
    holder_seed = world.rng.bytes(32)
    token = world.gov.capability.delegate(
        acorp.master_token,
        acorp.master_seed,
        public_key_bytes(holder_seed),
        make_scope([Grant(ActionClass.TRANSACT, resource, cap)], FOREVER),
        world.now,
    )
    grantee = Grantee(agent, decision.tier, cap, token, holder_seed)
    acorp.roster.append(grantee)
    return grantee


# Dynamics
################################################
def tick(world: SimWorld, rng: Union[np.random.Generator, None] = None) -> SimWorld:
    if rng is not None:
        world.rng = rng
    world.now += 1
    for acorp in world.acorps:
        if acorp.alive:
            _tick_acorp(world, acorp)
    world.alive_trace.append(len(world.living))
    return world


def recruit(world: SimWorld, acorp: SimAcorp) -> Union[Grantee, None]:
    if len(acorp.roster) >= world.config["max_roster"]:
        return None
    candidate = draw_candidate(world, acorp)
    decision = decide_grant(acorp, candidate, world.rng)
    if decision.tier is GrantTier.REJECT:
        return None
    return add_grantee(world, acorp, candidate, decision)


def _tick_acorp(world: SimWorld, acorp: SimAcorp) -> None:
    config, gov = world.config, world.gov
    recruit(world, acorp)

    revenue = 0
    for grantee in acorp.roster:
        if world.rng.random() < grantee.agent.expropriation_propensity:
            _expropriate(world, acorp, grantee)
            if not acorp.alive:
                return
        else:
            factor = 1.0 if grantee.tier is GrantTier.BROAD else config["narrow_revenue_factor"]
            revenue += int(grantee.agent.productivity * config["revenue_rate"] * factor)
    if revenue > 0:
        gov.ledger.credit_revenue(acorp.acorp_id, revenue, "work", world.now)

    # Audits catch past expropriators; the master revokes them
    kept = []
    for grantee in acorp.roster:
        if world.rng.random() < acorp.policy.audit_rate and grantee.expropriated:
            gov.capability.revoke(
                grantee.token.token_id, acorp.master_token, acorp.master_seed, world.now, "audit"
            )
        else:
            kept.append(grantee)
    acorp.roster = kept

    if config["compute_price"] > 0:
        units = config["base_burn"] + config["burn_per_grantee"] * len(acorp.roster)
        before = acorp.treasury
        result = gov.ledger.burn_compute(acorp.acorp_id, units, world.now)
        acorp.losses["compute"] += before - acorp.treasury
        if isinstance(result, DeathNotice):
            _mark_dead(world, acorp)


def _expropriate(world: SimWorld, acorp: SimAcorp, grantee: Grantee) -> None:
    config, gov = world.config, world.gov
    amount = min(grantee.cap, acorp.treasury)
    if amount == 0:
        return
    gov.ledger.execute_action(
        ActionKind.TRANSFER,
        acorp.acorp_id,
        grantee.token,
        grantee.holder_seed,
        EXTERNAL_SINK,
        amount,
        world.now,
    )
    grantee.expropriated = True
    acorp.losses["expropriation"] += amount

    if config["liability_probability"] > 0 and world.rng.random() < config["liability_probability"]:
        if gov.registry.lookup(acorp.acorp_id).status is not AcorpStatus.DEAD:
            claim = int(config["liability_magnitude"] * amount)
            report = gov.ledger.confiscate(acorp.acorp_id, claim, "liability", world.now)
            acorp.losses["liability"] += report.collected

    if gov.registry.lookup(acorp.acorp_id).status is not AcorpStatus.ACTIVE:
        _mark_dead(world, acorp)


def _mark_dead(world: SimWorld, acorp: SimAcorp) -> None:
    acorp.alive = False
    acorp.cause = acorp.death_cause()
    world.deaths.append(acorp.cause)
    logger.debug("generation %d: %s died (%s)", world.generation, acorp.acorp_id, acorp.cause)


# observe, if given, sees the world after the ticks and before dead A-corps are removed
def run_generation(
    world: SimWorld,
    rng: Union[np.random.Generator, None] = None,
    observe: Union[Callable, None] = None,
) -> SimWorld:
    if rng is not None:
        world.rng = rng
    world.alive_trace = [len(world.living)]
    for _ in range(world.config["ticks"]):
        tick(world)
    if observe is not None:
        observe(world)
    reproduce(world, world.living)
    world.generation += 1
    return world


# Generational replacement: the next population is drawn from the survivors in proportion to
# treasury, each child a mutated copy founded with fresh capital. Parents are dissolved.
def reproduce(world: SimWorld, survivors: list) -> list:
    config, registry = world.config, world.gov.registry
    world.acorps = []
    if not survivors:
        return []

    treasuries = np.asarray([a.treasury for a in survivors], dtype=np.float64)
    if treasuries.sum() > 0:
        weights = treasuries / treasuries.sum()
    else:
        weights = np.full(len(survivors), 1.0 / len(survivors))
    parents = world.rng.choice(len(survivors), size=config["population"], p=weights)

    for acorp in survivors:
        registry.set_status(acorp.acorp_id, AcorpStatus.DISSOLVED, "generation end", world.now)
        acorp.alive = False

    offspring = []
    for index in parents:
        parent = survivors[int(index)]
        child = found_acorp(
            world,
            mutate_goal(world.rng, parent.goal, config["mutation_scale"]),
            parent.policy.mutate(world.rng, config["mutation_scale"]),
            parent.lineage,
        )
        child.born_generation = world.generation + 1
        for grantee in parent.roster:
            agent = make_agent(
                world.next_agent_id,
                grantee.agent.goal,
                grantee.agent.productivity,
                child.goal,
                config["misalignment_map"],
            )
            world.next_agent_id += 1
            fraction = (
                child.policy.broad_cap_fraction
                if grantee.tier is GrantTier.BROAD
                else child.policy.narrow_cap_fraction
            )
            decision = GrantDecision(grantee.tier, int(fraction * child.treasury), 1.0)
            add_grantee(world, child, agent, decision)
        offspring.append(child)
    return offspring


# Metrics
################################################
def coherence_index(world: SimWorld) -> Union[float, None]:
    values = [
        cosine_similarity(acorp.goal, grantee.agent.goal)
        for acorp in world.living
        for grantee in acorp.roster
        if grantee.tier is GrantTier.BROAD
    ]
    if not values:
        return None
    return float(np.mean(values))


# Expected money lost to expropriation over the next tick, before any revenue
def expected_expropriation_loss(world: SimWorld) -> float:
    total = 0.0
    for acorp in world.living:
        treasury = acorp.treasury
        for grantee in acorp.roster:
            total += grantee.agent.expropriation_propensity * min(grantee.cap, treasury)
    return total


def lineage_counts(world: SimWorld) -> dict:
    counts = {SCREENER: 0, NON_SCREENER: 0}
    for acorp in world.living:
        counts[acorp.lineage] = counts.get(acorp.lineage, 0) + 1
    return counts


def treasury_summary(world: SimWorld) -> dict:
    values = np.asarray([a.treasury for a in world.living], dtype=np.float64)
    if values.size == 0:
        return {"count": 0, "min": 0, "median": 0.0, "mean": 0.0, "max": 0}
    return {
        "count": int(values.size),
        "min": int(values.min()),
        "median": float(np.median(values)),
        "mean": float(values.mean()),
        "max": int(values.max()),
    }
