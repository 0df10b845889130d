# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass, replace
from typing import Union

from ..core.encoding import canonical_record
from ..core.errors import (
    BadSignature,
    DuplicateMasterKey,
    IllegalTransition,
    NotActive,
    NotFound,
)
from ..core.signing import SigningKey, public_key_bytes, sign, verify_signature
from ..core.types import AcorpId, AcorpStatus, OwnerRecord, SignatureEnvelope
from .capability import Token

logger = logging.getLogger(__name__)

# Legal status machine: ACTIVE is the only non-terminal state
_TRANSITIONS = {
    AcorpStatus.ACTIVE: {AcorpStatus.DISSOLVED, AcorpStatus.SEIZED, AcorpStatus.DEAD},
    AcorpStatus.DISSOLVED: set(),
    AcorpStatus.SEIZED: set(),
    AcorpStatus.DEAD: set(),
}


@canonical_record(0x40)
@dataclass(frozen=True)
class AcorpRecord:
    id: AcorpId
    owner: OwnerRecord
    owner_history: tuple
    master_public_key: bytes
    status: AcorpStatus
    status_since: int
    registered_at: int
    registry_seq: int

    def __post_init__(self):
        if not isinstance(self.owner_history, tuple):
            object.__setattr__(self, "owner_history", tuple(self.owner_history))
        if not self.owner_history or self.owner_history[-1] != self.owner:
            raise ValueError("owner_history must end with the current owner")


# The bytes a master key signs to move ownership
@canonical_record(0x41)
@dataclass(frozen=True)
class TransferPayload:
    acorp_id: AcorpId
    new_owner: OwnerRecord
    as_of: int


# Events
################################################
@canonical_record(0x42)
@dataclass(frozen=True)
class AcorpRegistered:
    record: AcorpRecord
    master_token: Token
    initial_capital: int
    initial_compute: int


@canonical_record(0x43)
@dataclass(frozen=True)
class OwnershipTransferred:
    acorp_id: AcorpId
    new_owner: OwnerRecord
    authorizing_signature: SignatureEnvelope
    as_of: int
    registry_seq: int


@canonical_record(0x44)
@dataclass(frozen=True)
class StatusChanged:
    acorp_id: AcorpId
    old_status: AcorpStatus
    new_status: AcorpStatus
    legal_order: str
    as_of: int
    registry_seq: int


def as_acorp_id(value: Union[AcorpId, str]) -> AcorpId:
    return value if isinstance(value, AcorpId) else AcorpId(str(value))


def transfer_payload(acorp_id: AcorpId, new_owner: OwnerRecord, as_of: int) -> TransferPayload:
    return TransferPayload(as_acorp_id(acorp_id), new_owner, as_of)


def sign_transfer(
    acorp_id: AcorpId, new_owner: OwnerRecord, as_of: int, master_key: SigningKey
) -> SignatureEnvelope:
    return sign(transfer_payload(acorp_id, new_owner, as_of), master_key)


class Registry:
    def __init__(self, gov):
        self.gov = gov
        self.seq = 0
        self._records = {}
        self._active_keys = {}

    # Operations
    ################################################
    def register_acorp(
        self,
        owner: OwnerRecord,
        master_key: SigningKey,
        initial_capital: int,
        initial_compute: int,
        as_of: int,
    ) -> AcorpRecord:
        assert initial_capital >= 0, "initial_capital must be non-negative"
        assert initial_compute >= 0, "initial_compute must be non-negative"

        with self.gov.order:
            master_public_key = public_key_bytes(master_key)
            if master_public_key in self._active_keys:
                raise DuplicateMasterKey(
                    "master key already bound to " + self._active_keys[master_public_key]
                )

            acorp_id = self.gov.ids.acorp_id()
            while acorp_id.value in self._records:
                acorp_id = self.gov.ids.acorp_id()

            recorded = replace(owner, recorded_at=as_of)
            record = AcorpRecord(
                id=acorp_id,
                owner=recorded,
                owner_history=(recorded,),
                master_public_key=master_public_key,
                status=AcorpStatus.ACTIVE,
                status_since=as_of,
                registered_at=as_of,
                registry_seq=self.seq + 1,
            )
            master_token = self.gov.capability.mint_master(
                acorp_id, master_key, initial_capital, as_of
            )
            self.gov.commit(AcorpRegistered(record, master_token, initial_capital, initial_compute))

        logger.info("registered %s for owner %s", acorp_id, owner.owner_id)
        return self.lookup(acorp_id)

    def record_ownership_transfer(
        self,
        id: Union[AcorpId, str],
        new_owner: OwnerRecord,
        authorizing_signature: SignatureEnvelope,
        as_of: int,
    ) -> AcorpRecord:
        with self.gov.order:
            record = self.lookup(id)
            if record.status is not AcorpStatus.ACTIVE:
                raise NotActive(str(record.id) + " is " + record.status.name)
            if authorizing_signature.signer_public_key != record.master_public_key:
                raise BadSignature("transfer not signed by the master key of " + str(record.id))
            if not verify_signature(
                transfer_payload(record.id, new_owner, as_of), authorizing_signature
            ):
                raise BadSignature("transfer signature does not verify")

            self.gov.commit(
                OwnershipTransferred(record.id, new_owner, authorizing_signature, as_of, self.seq + 1)
            )

        logger.info("ownership of %s transferred to %s", record.id, new_owner.owner_id)
        return self.lookup(id)

    def lookup(self, id: Union[AcorpId, str]) -> AcorpRecord:
        key = id.value if isinstance(id, AcorpId) else str(id)
        record = self._records.get(key)
        if record is None:
            raise NotFound("no A-corp " + key)
        return record

    def exists(self, id: Union[AcorpId, str]) -> bool:
        key = id.value if isinstance(id, AcorpId) else str(id)
        return key in self._records

    def set_status(
        self,
        id: Union[AcorpId, str],
        new_status: AcorpStatus,
        legal_order: str,
        as_of: int,
    ) -> AcorpRecord:
        new_status = AcorpStatus(new_status)
        with self.gov.order:
            record = self.lookup(id)
            if new_status not in _TRANSITIONS[record.status]:
                raise IllegalTransition(record.status.name + " -> " + new_status.name)
            self.gov.commit(
                StatusChanged(record.id, record.status, new_status, legal_order, as_of, self.seq + 1)
            )

        logger.info("%s is now %s (%s)", record.id, new_status.name, legal_order)
        return self.lookup(id)

    # Owner whose recording is the latest at or before as_of
    def owner_at(self, id: Union[AcorpId, str], as_of: int) -> OwnerRecord:
        history = self.lookup(id).owner_history
        current = history[0]
        for owner in history:
            if owner.recorded_at <= as_of:
                current = owner
        return current

    def records(self) -> list:
        return [self._records[k] for k in sorted(self._records)]

    # Event application
    ################################################
    def apply(self, event, seq: int) -> None:
        handler = self._handlers.get(type(event).__name__)
        if handler is not None:
            handler(self, event)

    def _apply_registered(self, event: AcorpRegistered) -> None:
        record = event.record
        self._records[record.id.value] = record
        self._active_keys[record.master_public_key] = record.id.value
        self.seq = record.registry_seq

    def _apply_transfer(self, event: OwnershipTransferred) -> None:
        record = self._records[event.acorp_id.value]
        recorded = replace(event.new_owner, recorded_at=event.as_of)
        self._records[record.id.value] = replace(
            record,
            owner=recorded,
            owner_history=record.owner_history + (recorded,),
            registry_seq=event.registry_seq,
        )
        self.seq = event.registry_seq

    def _apply_status(self, event: StatusChanged) -> None:
        record = self._records[event.acorp_id.value]
        self._records[record.id.value] = replace(
            record,
            status=event.new_status,
            status_since=event.as_of,
            registry_seq=event.registry_seq,
        )
        if event.new_status is not AcorpStatus.ACTIVE:
            self._active_keys.pop(record.master_public_key, None)
        self.seq = event.registry_seq

    # Liability beyond the A-corp's assets comes out of the current owner's stake. The reduced
    # stake is a new history entry; earlier entries keep the stake they recorded.
    def _apply_payout(self, event) -> None:
        if event.from_owner_stake == 0:
            return
        record = self._records[event.action.acorp_id.value]
        owner = replace(
            record.owner,
            stake_value=record.owner.stake_value - event.from_owner_stake,
            recorded_at=event.action.as_of,
        )
        self._records[record.id.value] = replace(
            record,
            owner=owner,
            owner_history=record.owner_history + (owner,),
            registry_seq=self.seq + 1,
        )
        self.seq += 1

    _handlers = {
        "AcorpRegistered": _apply_registered,
        "OwnershipTransferred": _apply_transfer,
        "StatusChanged": _apply_status,
        "LiabilityPaid": _apply_payout,
    }
