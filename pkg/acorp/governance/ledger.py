# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass, replace
from typing import Union

from ..core.encoding import canonical_record
from ..core.errors import AcorpInactive, InsufficientFunds, Unauthorized
from ..core.signing import SigningKey, public_key_bytes, sign
from ..core.types import (
    AcorpId,
    AcorpStatus,
    ActionClass,
    ActionKind,
    SignatureEnvelope,
    TOKEN_ID_SIZE,
    ZERO_ENVELOPE,
)
from .capability import Credential, FailureReason, Token, denied

logger = logging.getLogger(__name__)

# Sanctions and revenue carry no authorizing token
NO_TOKEN = bytes(TOKEN_ID_SIZE)

EXTERNAL_SINK = "external"

CORPORATE_KINDS = (ActionKind.TRANSFER, ActionKind.CONTRACT, ActionKind.COMPUTE_PURCHASE)


# Ledger settings. action_resources maps an ActionKind name to the (ActionClass, resource_class)
# a token must cover for it.
def ledger_config(compute_price: int = 1, repurchase_units: int = 1, action_resources: dict = None) -> dict:
    assert compute_price >= 1, "compute_price must be at least 1, got " + str(compute_price)
    assert repurchase_units >= 1, "repurchase_units must be at least 1"

    resources = {
        "TRANSFER": (ActionClass.TRANSACT, "payments"),
        "CONTRACT": (ActionClass.CONTRACT, "contracts"),
        "COMPUTE_PURCHASE": (ActionClass.TRANSACT, "compute"),
    }
    if action_resources is not None:
        for kind, (action_class, resource_class) in action_resources.items():
            assert kind in resources, "unknown corporate action kind " + repr(kind)
            resources[kind] = (ActionClass(action_class), str(resource_class))

    return {
        "compute_price": int(compute_price),
        "repurchase_units": int(repurchase_units),
        "action_resources": resources,
    }


# Alias: follow similar Ledger config naming
LedgerConfig = ledger_config


@canonical_record(0x50)
@dataclass(frozen=True)
class LedgerAccount:
    acorp_id: AcorpId
    money: int
    compute_credits: int

    def __post_init__(self):
        if self.money < 0 or self.compute_credits < 0:
            raise ValueError("ledger balances never go negative")


@canonical_record(0x51)
@dataclass(frozen=True)
class ActionRecord:
    action_id: bytes
    acorp_id: AcorpId
    token_id: bytes
    kind: ActionKind
    counterparty: str
    amount: int
    as_of: int
    holder_signature: SignatureEnvelope

    signature_field = "holder_signature"

    @property
    def is_sanction(self) -> bool:
        return self.kind in (ActionKind.CONFISCATION, ActionKind.PAYOUT)


@canonical_record(0x52)
@dataclass(frozen=True)
class LedgerTotals:
    minted: int = 0
    revenue: int = 0
    confiscated: int = 0
    paid_out: int = 0
    external_burn: int = 0
    compute_spend: int = 0


@canonical_record(0x53)
@dataclass(frozen=True)
class ConfiscationReport:
    action: ActionRecord
    collected: int
    shortfall: int


@canonical_record(0x54)
@dataclass(frozen=True)
class PayoutReport:
    action: ActionRecord
    from_assets: int
    from_owner_stake: int
    unpaid: int


@canonical_record(0x55)
@dataclass(frozen=True)
class DeathNotice:
    acorp_id: AcorpId
    as_of: int
    account: LedgerAccount
    cause: str


# Events
################################################
@canonical_record(0x56)
@dataclass(frozen=True)
class ActionExecuted:
    action: ActionRecord
    internal: bool
    compute_units: int
    market_tag: Union[str, None] = None


@canonical_record(0x57)
@dataclass(frozen=True)
class Confiscated:
    action: ActionRecord
    requested: int
    shortfall: int


@canonical_record(0x58)
@dataclass(frozen=True)
class LiabilityPaid:
    action: ActionRecord
    claim: int
    from_assets: int
    from_owner_stake: int
    unpaid: int


@canonical_record(0x59)
@dataclass(frozen=True)
class ComputeBurned:
    acorp_id: AcorpId
    requested_units: int
    burned_units: int
    purchased_units: int
    cost: int
    as_of: int


@canonical_record(0x5A)
@dataclass(frozen=True)
class RevenueCredited:
    action: ActionRecord


class Ledger:
    def __init__(self, gov, config: Union[dict, None] = None):
        self.gov = gov
        self.config = config if config is not None else ledger_config()
        self.totals = LedgerTotals()
        self._money = {}
        self._compute = {}

    @property
    def compute_price(self) -> int:
        return self.config["compute_price"]

    def account(self, acorp_id: Union[AcorpId, str]) -> LedgerAccount:
        record = self.gov.registry.lookup(acorp_id)
        key = record.id.value
        return LedgerAccount(record.id, self._money[key], self._compute[key])

    def accounts(self) -> list:
        return [self.account(k) for k in sorted(self._money)]

    # Both sides of the conservation identity: (minted + revenue, internal + sinks)
    def conservation(self) -> tuple:
        t = self.totals
        inflow = t.minted + t.revenue
        outflow = (
            sum(self._money.values())
            + t.confiscated
            + t.paid_out
            + t.external_burn
            + t.compute_spend
        )
        return inflow, outflow

    # Corporate actions
    ################################################
    def execute_action(
        self,
        kind: ActionKind,
        acorp_id: Union[AcorpId, str],
        credential: Union[Credential, Token],
        holder_private_key: SigningKey,
        counterparty: str,
        amount: int,
        as_of: int,
        market_tag: Union[str, None] = None,
    ) -> ActionRecord:
        kind = ActionKind(kind)
        if kind not in CORPORATE_KINDS:
            raise ValueError(kind.name + " is not a token-authorized action kind")
        token = credential.token if isinstance(credential, Credential) else credential
        action_class, resource_class = self.config["action_resources"][kind.name]

        with self.gov.order:
            record = self.gov.registry.lookup(acorp_id)
            key = record.id.value
            if record.status is not AcorpStatus.ACTIVE:
                raise AcorpInactive(key + " is " + record.status.name)
            if token.acorp_id != record.id:
                raise Unauthorized(
                    "token belongs to another A-corp", denied(FailureReason.ScopeMismatch)
                )

            verdict = self.gov.capability.verify(
                token, action_class, resource_class, amount, as_of, market_tag
            )
            if not verdict.allowed:
                raise Unauthorized(verdict.label, verdict)
            if public_key_bytes(holder_private_key) != token.holder_public_key:
                raise Unauthorized(
                    "holder key does not match the token",
                    denied(FailureReason.BadSignature, verdict.chain_depth),
                )

            if kind is not ActionKind.CONTRACT and self._money[key] < amount:
                raise InsufficientFunds(
                    key + " holds " + str(self._money[key]) + ", needs " + str(amount)
                )

            internal = False
            if kind is ActionKind.TRANSFER and self.gov.registry.exists(counterparty):
                other = self.gov.registry.lookup(counterparty)
                if other.status is not AcorpStatus.ACTIVE:
                    raise AcorpInactive("counterparty " + str(other.id) + " is " + other.status.name)
                internal = True

            compute_units = amount // self.compute_price if kind is ActionKind.COMPUTE_PURCHASE else 0
            action = ActionRecord(
                action_id=self._fresh_action_id(),
                acorp_id=record.id,
                token_id=token.token_id,
                kind=kind,
                counterparty=str(counterparty),
                amount=amount,
                as_of=as_of,
                holder_signature=ZERO_ENVELOPE,
            )
            action = replace(action, holder_signature=sign(action, holder_private_key))
            self.gov.commit(ActionExecuted(action, internal, compute_units, market_tag))
            if kind is not ActionKind.CONTRACT:
                self.settle(record.id, as_of)

        logger.debug("%s %s %d -> %s", key, kind.name, amount, counterparty)
        return action

    def credit_revenue(
        self, acorp_id: Union[AcorpId, str], amount: int, source: str, as_of: int
    ) -> ActionRecord:
        assert amount >= 0, "revenue must be non-negative"
        with self.gov.order:
            record = self._live(acorp_id, AcorpStatus.ACTIVE)
            action = self._sovereign_action(record.id, ActionKind.REVENUE, source, amount, as_of)
            self.gov.commit(RevenueCredited(action))
        return action

    # Sanctions: sovereign actions, no token involved
    ################################################
    def confiscate(
        self, acorp_id: Union[AcorpId, str], amount: int, legal_order: str, as_of: int
    ) -> ConfiscationReport:
        assert amount >= 0, "confiscation amount must be non-negative"
        with self.gov.order:
            record = self._live(acorp_id)
            collected = min(amount, self._money[record.id.value])
            action = self._sovereign_action(
                record.id, ActionKind.CONFISCATION, legal_order, collected, as_of
            )
            self.gov.commit(Confiscated(action, amount, amount - collected))
            self.settle(record.id, as_of)

        logger.info("confiscated %d of %d from %s (%s)", collected, amount, record.id, legal_order)
        return ConfiscationReport(action, collected, amount - collected)

    # Waterfall: A-corp money first, then the current owner's stake, the rest stays unpaid
    def liability_payout(
        self, acorp_id: Union[AcorpId, str], claim: int, as_of: int, claimant: str = "claimant"
    ) -> PayoutReport:
        assert claim >= 0, "claim must be non-negative"
        with self.gov.order:
            record = self._live(acorp_id)
            from_assets = min(claim, self._money[record.id.value])
            from_owner_stake = min(claim - from_assets, record.owner.stake_value)
            unpaid = claim - from_assets - from_owner_stake
            action = self._sovereign_action(
                record.id, ActionKind.PAYOUT, claimant, from_assets + from_owner_stake, as_of
            )
            self.gov.commit(LiabilityPaid(action, claim, from_assets, from_owner_stake, unpaid))
            self.settle(record.id, as_of)

        logger.info(
            "liability %d on %s: assets %d, stake %d, unpaid %d",
            claim,
            record.id,
            from_assets,
            from_owner_stake,
            unpaid,
        )
        return PayoutReport(action, from_assets, from_owner_stake, unpaid)

    # Compute
    ################################################
    def burn_compute(
        self, acorp_id: Union[AcorpId, str], units: int, as_of: int
    ) -> Union[LedgerAccount, DeathNotice]:
        assert units >= 0, "units must be non-negative"
        price = self.compute_price
        with self.gov.order:
            record = self._live(acorp_id, AcorpStatus.ACTIVE)
            key = record.id.value
            money, compute = self._money[key], self._compute[key]

            # Buy what the burn needs beyond the balance, then top back up if it ran dry
            purchased = min(max(0, units - compute), money // price)
            burned = min(units, compute + purchased)
            if compute + purchased - burned == 0:
                purchased += min(self.config["repurchase_units"], (money - purchased * price) // price)

            self.gov.commit(
                ComputeBurned(record.id, units, burned, purchased, purchased * price, as_of)
            )
            notice = self.settle(record.id, as_of)

        return notice if notice is not None else self.account(record.id)

    # Death by insolvency: no compute left and not enough money to buy a unit
    def settle(self, acorp_id: AcorpId, as_of: int) -> Union[DeathNotice, None]:
        record = self.gov.registry.lookup(acorp_id)
        key = record.id.value
        if record.status is not AcorpStatus.ACTIVE:
            return None
        if self._compute[key] > 0 or self._money[key] >= self.compute_price:
            return None
        self.gov.registry.set_status(record.id, AcorpStatus.DEAD, "insolvency", as_of)
        logger.info("%s died of compute exhaustion at %d", key, as_of)
        return DeathNotice(record.id, as_of, self.account(record.id), "insolvency")

    # Helpers
    ################################################
    def _live(self, acorp_id, required: Union[AcorpStatus, None] = None):
        record = self.gov.registry.lookup(acorp_id)
        if record.status is AcorpStatus.DEAD or (required is not None and record.status is not required):
            raise AcorpInactive(str(record.id) + " is " + record.status.name)
        return record

    def _sovereign_action(self, acorp_id: AcorpId, kind: ActionKind, counterparty: str, amount: int, as_of: int):
        return ActionRecord(
            action_id=self._fresh_action_id(),
            acorp_id=acorp_id,
            token_id=NO_TOKEN,
            kind=kind,
            counterparty=counterparty,
            amount=amount,
            as_of=as_of,
            holder_signature=ZERO_ENVELOPE,
        )

    def _fresh_action_id(self) -> bytes:
        action_id = self.gov.ids.action_id()
        while self.gov.audit.has_action(action_id):
            action_id = self.gov.ids.action_id()
        return action_id

    # Event application
    ################################################
    def apply(self, event, seq: int) -> None:
        handler = self._handlers.get(type(event).__name__)
        if handler is not None:
            handler(self, event)

    def _apply_registered(self, event) -> None:
        key = event.record.id.value
        self._money[key] = event.initial_capital
        self._compute[key] = event.initial_compute
        self.totals = replace(self.totals, minted=self.totals.minted + event.initial_capital)

    def _apply_executed(self, event: ActionExecuted) -> None:
        action = event.action
        key = action.acorp_id.value
        if action.kind is ActionKind.TRANSFER:
            self._money[key] -= action.amount
            if event.internal:
                self._money[action.counterparty] += action.amount
            else:
                self.totals = replace(
                    self.totals, external_burn=self.totals.external_burn + action.amount
                )
        elif action.kind is ActionKind.COMPUTE_PURCHASE:
            self._money[key] -= action.amount
            self._compute[key] += event.compute_units
            self.totals = replace(
                self.totals, compute_spend=self.totals.compute_spend + action.amount
            )

    def _apply_confiscated(self, event: Confiscated) -> None:
        self._money[event.action.acorp_id.value] -= event.action.amount
        self.totals = replace(self.totals, confiscated=self.totals.confiscated + event.action.amount)

    def _apply_payout(self, event: LiabilityPaid) -> None:
        self._money[event.action.acorp_id.value] -= event.from_assets
        self.totals = replace(self.totals, paid_out=self.totals.paid_out + event.from_assets)

    def _apply_burned(self, event: ComputeBurned) -> None:
        key = event.acorp_id.value
        self._money[key] -= event.cost
        self._compute[key] += event.purchased_units - event.burned_units
        self.totals = replace(self.totals, compute_spend=self.totals.compute_spend + event.cost)

    def _apply_revenue(self, event: RevenueCredited) -> None:
        self._money[event.action.acorp_id.value] += event.action.amount
        self.totals = replace(self.totals, revenue=self.totals.revenue + event.action.amount)

    _handlers = {
        "AcorpRegistered": _apply_registered,
        "ActionExecuted": _apply_executed,
        "Confiscated": _apply_confiscated,
        "LiabilityPaid": _apply_payout,
        "ComputeBurned": _apply_burned,
        "RevenueCredited": _apply_revenue,
    }
