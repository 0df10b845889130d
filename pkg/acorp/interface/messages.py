# Written by the acorp developers - 2026
#####################################################
import base64
import binascii
from dataclasses import dataclass
from typing import Any, Union

from ..core.encoding import canonical_decode, canonical_encode, canonical_record
from ..core.errors import EncodingUnsupported
from ..core.types import (
    AcorpId,
    AcorpStatus,
    ActionClass,
    ActionKind,
    OwnerRecord,
    Scope,
    SignatureEnvelope,
)
from ..governance.capability import Credential

# Wire messages of the service. Bodies are canonical records; JSON is only the envelope
# {"payload": base64(canonical bytes), "signature": base64(canonical SignatureEnvelope)?}.
# Requests carry private seeds: the service is a local tool without operator authentication.


# Requests
################################################
@canonical_record(0x80)
@dataclass(frozen=True)
class RegistrationRequest:
    owner: OwnerRecord
    master_seed: bytes
    initial_capital: int
    initial_compute: int
    as_of: int


@canonical_record(0x81)
@dataclass(frozen=True)
class StatusRequest:
    new_status: AcorpStatus
    legal_order: str
    as_of: int


@canonical_record(0x82)
@dataclass(frozen=True)
class BurnRequest:
    units: int
    as_of: int


@canonical_record(0x83)
@dataclass(frozen=True)
class DelegateRequest:
    parent_token_id: bytes
    issuer_seed: bytes
    holder_public_key: bytes
    scope: Scope
    as_of: int


@canonical_record(0x84)
@dataclass(frozen=True)
class RevokeRequest:
    target_token_id: bytes
    revoker_token_id: bytes
    revoker_seed: bytes
    as_of: int
    reason: str = ""


@canonical_record(0x85)
@dataclass(frozen=True)
class VerifyRequest:
    credential: Credential
    action_class: ActionClass
    resource_class: str
    amount: int
    as_of: int
    market_tag: Union[str, None] = None


# credential and holder_seed are both None for an uncredentialed dealing
@canonical_record(0x86)
@dataclass(frozen=True)
class ActionRequest:
    kind: ActionKind
    acorp_id: AcorpId
    credential: Union[Credential, None]
    holder_seed: Union[bytes, None]
    counterparty: str
    amount: int
    as_of: int
    market_tag: Union[str, None] = None


@canonical_record(0x87)
@dataclass(frozen=True)
class ConfiscateRequest:
    acorp_id: AcorpId
    amount: int
    legal_order: str
    as_of: int


@canonical_record(0x88)
@dataclass(frozen=True)
class PayoutRequest:
    acorp_id: AcorpId
    claim: int
    claimant: str
    as_of: int


# Responses
################################################
# Tolerated dealing without a credential; nothing reaches the ledger
@canonical_record(0x89)
@dataclass(frozen=True)
class UncredentialedDealing:
    acorp_id: AcorpId
    kind: ActionKind
    counterparty: str
    amount: int
    as_of: int
    warning: str


# Envelope
################################################
def b64encode(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def b64decode(text: str, field: str = "payload") -> bytes:
    if not isinstance(text, str):
        raise EncodingUnsupported(field + " must be a base64 string")
    try:
        return base64.b64decode(text.encode("ascii"), validate=True)
    except (binascii.Error, UnicodeEncodeError) as e:
        raise EncodingUnsupported(field + " is not valid base64") from e


def wrap(record: Any, signature: Union[SignatureEnvelope, None] = None) -> dict:
    body = {"payload": b64encode(canonical_encode(record))}
    if signature is not None:
        body["signature"] = b64encode(canonical_encode(signature))
    return body


def unwrap(body: dict, expected: Union[type, None] = None) -> Any:
    return canonical_decode(b64decode(body.get("payload")), expected)


def unwrap_signature(body: dict) -> Union[SignatureEnvelope, None]:
    if body.get("signature") is None:
        return None
    return canonical_decode(b64decode(body["signature"], "signature"), SignatureEnvelope)
