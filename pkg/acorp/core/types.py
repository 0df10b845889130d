# Written by the acorp developers - 2026
#####################################################
import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

from .encoding import canonical_record, canonical_enum

ACORP_ID_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
ACORP_ID_LENGTH = 20
_ACORP_ID_RE = re.compile("^[A-Z0-9]{" + str(ACORP_ID_LENGTH) + "}$")

# Resource wildcard, only ever present in master scopes
WILDCARD = "*"

# Largest timestamp the wire format carries; used for open-ended master scopes
FOREVER = 2**63 - 1

PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64
TOKEN_ID_SIZE = 16


@canonical_enum(1)
class ActionClass(IntEnum):
    READ = 1
    TRANSACT = 2
    CONTRACT = 3
    DELEGATE = 4
    ADMIN = 5

    # ADMIN dominates everything, every other class only itself
    def dominates(self, other: "ActionClass") -> bool:
        return self is ActionClass.ADMIN or self is other


@canonical_enum(2)
class AcorpStatus(IntEnum):
    ACTIVE = 1
    DISSOLVED = 2
    SEIZED = 3
    DEAD = 4


@canonical_enum(3)
class ActionKind(IntEnum):
    TRANSFER = 1
    CONTRACT = 2
    COMPUTE_PURCHASE = 3
    CONFISCATION = 4
    PAYOUT = 5
    REVENUE = 6


@canonical_record(0x20)
@dataclass(frozen=True)
class AcorpId:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not _ACORP_ID_RE.match(self.value):
            raise ValueError("AcorpId must be 20 characters of A-Z0-9: " + repr(self.value))

    def __str__(self) -> str:
        return self.value


@canonical_record(0x21)
@dataclass(frozen=True)
class OwnerRecord:
    owner_name: str
    owner_id: str
    stake_value: int
    recorded_at: int = 0

    def __post_init__(self):
        if self.stake_value < 0:
            raise ValueError("stake_value must be non-negative")
        if self.recorded_at < 0:
            raise ValueError("recorded_at must be non-negative")


@canonical_record(0x22)
@dataclass(frozen=True)
class Grant:
    action: ActionClass
    resource_class: str
    monetary_cap: int = 0
    market_tag: Union[str, None] = None

    def __post_init__(self):
        if not isinstance(self.action, ActionClass):
            object.__setattr__(self, "action", ActionClass(self.action))
        if not self.resource_class:
            raise ValueError("resource_class must be a non-empty tag")
        if self.monetary_cap < 0:
            raise ValueError("monetary_cap must be non-negative")
        if self.action is ActionClass.READ and self.monetary_cap != 0:
            raise ValueError("READ grants carry no monetary cap")


@canonical_record(0x23)
@dataclass(frozen=True)
class Scope:
    grants: frozenset
    valid_until: int

    def __post_init__(self):
        if not isinstance(self.grants, frozenset):
            object.__setattr__(self, "grants", frozenset(self.grants))
        if self.valid_until < 0:
            raise ValueError("valid_until must be non-negative")
        # Only the distinguished EMPTY scope may have no grants
        if len(self.grants) == 0 and self.valid_until != 0:
            raise ValueError("a scope without grants must be the EMPTY scope")

    @property
    def is_empty(self) -> bool:
        return len(self.grants) == 0

    @property
    def has_wildcard(self) -> bool:
        return any(g.resource_class == WILDCARD for g in self.grants)


EMPTY_SCOPE = Scope(frozenset(), 0)


@canonical_record(0x24)
@dataclass(frozen=True)
class SignatureEnvelope:
    signer_public_key: bytes
    signature_bytes: bytes

    def __post_init__(self):
        if len(self.signer_public_key) != PUBLIC_KEY_SIZE:
            raise ValueError("signer_public_key must be 32 bytes")
        if len(self.signature_bytes) != SIGNATURE_SIZE:
            raise ValueError("signature_bytes must be 64 bytes")


# Placeholder used while computing the bytes a signature covers
ZERO_ENVELOPE = SignatureEnvelope(bytes(PUBLIC_KEY_SIZE), bytes(SIGNATURE_SIZE))
