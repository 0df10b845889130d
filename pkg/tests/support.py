# Written by the acorp developers - 2026
#####################################################
import hashlib

import numpy as np

from acorp.core.scope import grant_dominates, sorted_grants
from acorp.core.types import FOREVER, ActionClass, Grant, OwnerRecord, Scope, WILDCARD
from acorp.core.utils import FixedClock
from acorp.governance.base import Governance
from acorp.governance.ledger import ledger_config

RESOURCES = ["payments", "compute", "contracts", "network"]
MARKETS = [None, "eu", "us"]
DELEGATION = Grant(ActionClass.DELEGATE, "tokens", 0)


def seed(n) -> bytes:
    return hashlib.sha256(b"acorp-test-" + str(n).encode("utf-8")).digest()


def owner(name: str = "Alice Example", owner_id: str = "owner-1", stake: int = 0) -> OwnerRecord:
    return OwnerRecord(name, owner_id, stake)


def fresh_gov(compute_price: int = 1, repurchase_units: int = 1, data_dir=None, id_seed=42):
    return Governance(
        data_dir=data_dir,
        id_seed=id_seed,
        ledger_params=ledger_config(compute_price, repurchase_units),
        clock=FixedClock(1000),
        durable=False,
    )


def open_gov(data_dir: str, compute_price: int = 1, id_seed=42):
    return Governance.open(
        data_dir,
        id_seed=id_seed,
        ledger_params=ledger_config(compute_price),
        clock=FixedClock(1000),
        durable=False,
    )


# Random grants and scopes over a small grid
################################################
def random_grant(rng: np.random.Generator, wildcard: bool = False) -> Grant:
    action = ActionClass(int(rng.integers(1, 6)))
    resources = RESOURCES + [WILDCARD] if wildcard else RESOURCES
    resource = resources[int(rng.integers(len(resources)))]
    cap = 0 if action is ActionClass.READ else int(rng.choice([0, 10, 100, 1000]))
    return Grant(action, resource, cap, MARKETS[int(rng.integers(len(MARKETS)))])


def random_scope(rng: np.random.Generator, wildcard: bool = False) -> Scope:
    grants = [random_grant(rng, wildcard) for _ in range(int(rng.integers(1, 4)))]
    return Scope(frozenset(grants), int(rng.choice([10, 20, 30])))


def attenuate_grant(rng: np.random.Generator, parent: Grant) -> Grant:
    if parent.action is ActionClass.ADMIN:
        action = ActionClass(int(rng.integers(1, 6)))
    else:
        action = parent.action
    if parent.resource_class == WILDCARD:
        resource = RESOURCES[int(rng.integers(len(RESOURCES)))]
    else:
        resource = parent.resource_class
    cap = 0 if action is ActionClass.READ else int(rng.integers(0, parent.monetary_cap + 1))
    market = parent.market_tag
    if market is None:
        market = MARKETS[int(rng.integers(len(MARKETS)))]
    return Grant(action, resource, cap, market)


# A scope dominated by the parent; keeps a DELEGATE grant when the parent can delegate
def attenuate(rng: np.random.Generator, parent: Scope, valid_until: int = FOREVER) -> Scope:
    grants = sorted_grants(parent)
    picked = [grants[int(i)] for i in rng.choice(len(grants), size=min(2, len(grants)), replace=False)]
    child = set(attenuate_grant(rng, g) for g in picked)
    if any(grant_dominates(g, DELEGATION) for g in parent.grants):
        if rng.random() < 0.8:
            child.add(DELEGATION)
    return Scope(frozenset(child), min(valid_until, parent.valid_until))


# A scope that is NOT dominated by the parent
def escalate(rng: np.random.Generator, parent: Scope) -> Scope:
    base = attenuate(rng, parent)
    grant = sorted_grants(base)[0]
    # A wildcard parent only loses on the cap
    choice = 0 if parent.has_wildcard else int(rng.integers(3))
    if choice == 0:
        top = max(g.monetary_cap for g in parent.grants)
        bumped = Grant(ActionClass.TRANSACT, grant.resource_class, top + 1)
    elif choice == 1:
        bumped = Grant(ActionClass.CONTRACT, "unlisted-resource", 0)
    else:
        bumped = Grant(ActionClass.ADMIN, "unlisted-resource", 0)
    return Scope(frozenset(set(base.grants) | {bumped}), base.valid_until)
