# Written by the acorp developers - 2026
#####################################################
from typing import Union

from .types import ActionClass, Grant, Scope, WILDCARD, FOREVER


def grant_dominates(parent: Grant, child: Grant) -> bool:
    return (
        parent.action.dominates(child.action)
        and (parent.resource_class == WILDCARD or parent.resource_class == child.resource_class)
        and parent.monetary_cap >= child.monetary_cap
        and (parent.market_tag is None or parent.market_tag == child.market_tag)
    )


# Partial order over scopes: child must expire no later and every child grant needs a dominating parent grant
def scope_dominates(parent: Scope, child: Scope) -> bool:
    if child.valid_until > parent.valid_until:
        return False
    return all(any(grant_dominates(p, g) for p in parent.grants) for g in child.grants)


def grant_covers(
    grant: Grant,
    action_class: ActionClass,
    resource_class: str,
    amount: int,
    market_tag: Union[str, None] = None,
) -> bool:
    return (
        grant.action.dominates(action_class)
        and (grant.resource_class == WILDCARD or grant.resource_class == resource_class)
        and 0 <= amount <= grant.monetary_cap
        and (grant.market_tag is None or grant.market_tag == market_tag)
    )


# Returns the first covering grant (canonical order) or None
def scope_covers(
    scope: Scope,
    action_class: ActionClass,
    resource_class: str,
    amount: int,
    market_tag: Union[str, None] = None,
) -> Union[Grant, None]:
    for grant in sorted_grants(scope):
        if grant_covers(grant, action_class, resource_class, amount, market_tag):
            return grant
    return None


def sorted_grants(scope: Scope) -> list:
    return sorted(
        scope.grants,
        key=lambda g: (int(g.action), g.resource_class, g.monetary_cap, g.market_tag or ""),
    )


def has_delegate_right(scope: Scope) -> bool:
    return any(g.action in (ActionClass.DELEGATE, ActionClass.ADMIN) for g in scope.grants)


def master_scope(monetary_cap: int, valid_until: int = FOREVER) -> Scope:
    return Scope(frozenset([Grant(ActionClass.ADMIN, WILDCARD, monetary_cap)]), valid_until)


def make_scope(grants, valid_until: int) -> Scope:
    return Scope(frozenset(grants), valid_until)


# "TRANSACT:payments:10000[:market]" -> Grant
def parse_grant(text: str) -> Grant:
    parts = text.split(":")
    if len(parts) not in (2, 3, 4):
        raise ValueError("grant must look like ACTION:resource[:cap[:market]], got " + repr(text))
    try:
        action = ActionClass[parts[0].upper()]
    except KeyError as e:
        raise ValueError("unknown action class " + repr(parts[0])) from e
    cap = int(parts[2]) if len(parts) > 2 else 0
    market = parts[3] if len(parts) > 3 else None
    return Grant(action, parts[1], cap, market)


# "TRANSACT:payments:9900[:market]" -> (action_class, resource_class, amount, market_tag)
def parse_action(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) not in (2, 3, 4) or not parts[1]:
        raise ValueError("action must look like ACTION:resource[:amount[:market]], got " + repr(text))
    try:
        action = ActionClass[parts[0].upper()]
    except KeyError as e:
        raise ValueError("unknown action class " + repr(parts[0])) from e
    amount = int(parts[2]) if len(parts) > 2 else 0
    market = parts[3] if len(parts) > 3 else None
    return action, parts[1], amount, market
