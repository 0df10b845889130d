# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Mapping, Union

from ..core.encoding import canonical_enum, canonical_record
from ..core.errors import (
    BadSignature,
    ChainTooDeep,
    NoDelegateRight,
    NotAncestor,
    NotFound,
    ParentInvalid,
    ScopeEscalation,
    UnknownToken,
)
from ..core.scope import has_delegate_right, master_scope, scope_covers, scope_dominates
from ..core.signing import (
    SigningKey,
    load_public_key,
    load_signing_key,
    public_key_bytes,
    sign,
    verify_signature,
)
from ..core.types import (
    AcorpId,
    AcorpStatus,
    ActionClass,
    Scope,
    SignatureEnvelope,
    TOKEN_ID_SIZE,
    ZERO_ENVELOPE,
)

logger = logging.getLogger(__name__)

# A master token sits at depth 0; the deepest leaf sits at MAX_CHAIN_DEPTH
MAX_CHAIN_DEPTH = 32


@canonical_enum(4)
class FailureReason(IntEnum):
    BadSignature = 1
    ScopeMismatch = 2
    Expired = 3
    Revoked = 4
    AncestorRevoked = 5
    AcorpInactive = 6
    UnknownToken = 7


@canonical_record(0x30)
@dataclass(frozen=True)
class Token:
    token_id: bytes
    acorp_id: AcorpId
    holder_public_key: bytes
    scope: Scope
    parent_token_id: Union[bytes, None]
    issued_at: int
    issuer_signature: SignatureEnvelope

    signature_field = "issuer_signature"

    def __post_init__(self):
        if len(self.token_id) != TOKEN_ID_SIZE:
            raise ValueError("token_id must be 16 bytes")
        if self.parent_token_id is not None and len(self.parent_token_id) != TOKEN_ID_SIZE:
            raise ValueError("parent_token_id must be 16 bytes")

    @property
    def is_master(self) -> bool:
        return self.parent_token_id is None


@canonical_record(0x31)
@dataclass(frozen=True)
class RevocationRecord:
    token_id: bytes
    revoked_at: int
    revoked_by: bytes
    reason: str = ""


@canonical_record(0x32)
@dataclass(frozen=True)
class Verdict:
    allowed: bool
    failure_reason: Union[FailureReason, None]
    chain_depth: int

    def __post_init__(self):
        if self.allowed != (self.failure_reason is None):
            raise ValueError("a verdict is allowed iff it carries no failure reason")

    @property
    def label(self) -> str:
        return "ALLOWED" if self.allowed else self.failure_reason.name


# Presented credential: the acting token followed by every ancestor up to the master
@canonical_record(0x33)
@dataclass(frozen=True)
class Credential:
    tokens: tuple

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("a credential holds at least one token")

    @property
    def token(self) -> Token:
        return self.tokens[0]

    @property
    def master(self) -> Token:
        return self.tokens[-1]


@canonical_record(0x34)
@dataclass(frozen=True)
class TokenNode:
    token_id: bytes
    holder_public_key: bytes
    scope: Scope
    parent_token_id: Union[bytes, None]
    issued_at: int
    revoked: bool
    children: tuple


# Events
################################################
@canonical_record(0x35)
@dataclass(frozen=True)
class TokenIssued:
    token: Token


@canonical_record(0x36)
@dataclass(frozen=True)
class TokenRevoked:
    revocation: RevocationRecord


def allowed(depth: int) -> Verdict:
    return Verdict(True, None, depth)


def denied(reason: FailureReason, depth: int = 0) -> Verdict:
    return Verdict(False, reason, depth)


# Chain checks shared by the online store and offline verifiers. Order: structure and signatures,
# link attenuation, revocation, A-corp status, expiry. Coverage of the request is checked by the caller.
def check_chain(
    chain: tuple,
    master_public_key: bytes,
    status: AcorpStatus,
    status_since: int,
    revocations: Mapping[bytes, RevocationRecord],
    as_of: int,
) -> Verdict:
    depth = len(chain) - 1
    if depth < 0 or depth > MAX_CHAIN_DEPTH:
        return denied(FailureReason.BadSignature, max(depth, 0))

    master = chain[-1]
    if not master.is_master or master.holder_public_key != master_public_key:
        return denied(FailureReason.BadSignature, depth)

    for i, token in enumerate(chain):
        if token.acorp_id != master.acorp_id:
            return denied(FailureReason.BadSignature, depth)
        if token.is_master:
            if i != depth:
                return denied(FailureReason.BadSignature, depth)
            signer = master_public_key
        else:
            if i == depth or token.parent_token_id != chain[i + 1].token_id:
                return denied(FailureReason.BadSignature, depth)
            signer = chain[i + 1].holder_public_key
        if token.issuer_signature.signer_public_key != signer:
            return denied(FailureReason.BadSignature, depth)
        if not verify_signature(token, token.issuer_signature):
            return denied(FailureReason.BadSignature, depth)

    for child, parent in zip(chain[:-1], chain[1:]):
        if child.scope.has_wildcard or not scope_dominates(parent.scope, child.scope):
            return denied(FailureReason.ScopeMismatch, depth)

    # The revocation that took effect first decides the reason; the leaf wins ties
    earliest = None
    for i, token in enumerate(chain):
        revocation = revocations.get(token.token_id)
        if revocation is None or revocation.revoked_at > as_of:
            continue
        if earliest is None or revocation.revoked_at < earliest[0]:
            earliest = (revocation.revoked_at, i)
    if earliest is not None:
        reason = FailureReason.Revoked if earliest[1] == 0 else FailureReason.AncestorRevoked
        return denied(reason, depth)

    # Terminal statuses bind from the time of the change forward
    if status is not AcorpStatus.ACTIVE and as_of >= status_since:
        return denied(FailureReason.AcorpInactive, depth)

    if any(token.scope.valid_until < as_of for token in chain):
        return denied(FailureReason.Expired, depth)

    return allowed(depth)


def check_request(
    chain: tuple,
    master_public_key: bytes,
    status: AcorpStatus,
    status_since: int,
    revocations: Mapping[bytes, RevocationRecord],
    action_class: ActionClass,
    resource_class: str,
    amount: int,
    as_of: int,
    market_tag: Union[str, None] = None,
) -> Verdict:
    verdict = check_chain(chain, master_public_key, status, status_since, revocations, as_of)
    if not verdict.allowed:
        return verdict
    if scope_covers(chain[0].scope, ActionClass(action_class), resource_class, amount, market_tag) is None:
        return denied(FailureReason.ScopeMismatch, verdict.chain_depth)
    return verdict


# Offline verification: only the registry's master-key record and the revocation list are needed.
# master_record is an AcorpRecord or a raw 32-byte master public key (assumed ACTIVE).
def verify_credential(
    credential: Credential,
    master_record,
    revocations,
    action_class: ActionClass,
    resource_class: str,
    amount: int,
    as_of: int,
    market_tag: Union[str, None] = None,
) -> Verdict:
    if isinstance(master_record, (bytes, bytearray)):
        master_public_key, status, since = bytes(master_record), AcorpStatus.ACTIVE, 0
    else:
        master_public_key, status = master_record.master_public_key, master_record.status
        since = master_record.status_since
        if credential.master.acorp_id != master_record.id:
            return denied(FailureReason.BadSignature, len(credential.tokens) - 1)
    if not isinstance(revocations, Mapping):
        revocations = {r.token_id: r for r in revocations}
    return check_request(
        credential.tokens,
        master_public_key,
        status,
        since,
        revocations,
        action_class,
        resource_class,
        amount,
        as_of,
        market_tag,
    )


class CapabilityStore:
    def __init__(self, gov):
        self.gov = gov
        self._tokens = {}
        self._children = {}
        self._masters = {}
        self._revocations = {}

    # Master token: self-signed by the master key at registration
    def mint_master(
        self, acorp_id: AcorpId, master_key: SigningKey, monetary_cap: int, as_of: int
    ) -> Token:
        key = load_signing_key(master_key)
        token = Token(
            token_id=self._fresh_token_id(),
            acorp_id=acorp_id,
            holder_public_key=public_key_bytes(key),
            scope=master_scope(monetary_cap),
            parent_token_id=None,
            issued_at=as_of,
            issuer_signature=ZERO_ENVELOPE,
        )
        return replace(token, issuer_signature=sign(token, key))

    # Operations
    ################################################
    def delegate(
        self,
        parent: Token,
        issuer_private_key: SigningKey,
        holder_public_key: bytes,
        requested_scope: Scope,
        as_of: int,
    ) -> Token:
        with self.gov.order:
            parent_check = self.check(parent, as_of)
            if not parent_check.allowed:
                raise ParentInvalid("parent token fails verification: " + parent_check.label)

            key = load_signing_key(issuer_private_key)
            if public_key_bytes(key) != parent.holder_public_key:
                raise BadSignature("issuer key does not match the parent token holder")
            if not has_delegate_right(parent.scope):
                raise NoDelegateRight("parent scope holds no DELEGATE or ADMIN grant")
            if requested_scope.has_wildcard or not scope_dominates(parent.scope, requested_scope):
                raise ScopeEscalation("requested scope is not dominated by the parent scope")
            if parent_check.chain_depth + 1 > MAX_CHAIN_DEPTH:
                raise ChainTooDeep("delegation chains stop at depth " + str(MAX_CHAIN_DEPTH))
            load_public_key(holder_public_key)

            child = Token(
                token_id=self._fresh_token_id(),
                acorp_id=parent.acorp_id,
                holder_public_key=bytes(holder_public_key),
                scope=requested_scope,
                parent_token_id=parent.token_id,
                issued_at=as_of,
                issuer_signature=ZERO_ENVELOPE,
            )
            child = replace(child, issuer_signature=sign(child, key))
            self.gov.commit(TokenIssued(child))

        logger.info(
            "delegated %s -> %s on %s (depth %d)",
            parent.token_id.hex(),
            child.token_id.hex(),
            child.acorp_id,
            parent_check.chain_depth + 1,
        )
        return child

    def revoke(
        self,
        target_token_id: bytes,
        revoker: Token,
        revoker_private_key: SigningKey,
        as_of: int,
        reason: str = "",
    ) -> RevocationRecord:
        with self.gov.order:
            target = self._tokens.get(bytes(target_token_id))
            if target is None:
                raise UnknownToken("no token " + bytes(target_token_id).hex())
            if self._tokens.get(revoker.token_id) != revoker:
                raise UnknownToken("revoker token was never issued")
            if public_key_bytes(revoker_private_key) != revoker.holder_public_key:
                raise BadSignature("revoker key does not match the revoker token holder")
            if revoker.acorp_id != target.acorp_id or (
                not revoker.is_master
                and revoker.token_id not in [t.token_id for t in self.chain_of(target.token_id)[1:]]
            ):
                raise NotAncestor("revoker is not an ancestor of the target token")

            existing = self._revocations.get(target.token_id)
            if existing is not None:
                return existing

            revoker_check = self.check(revoker, as_of)
            if not revoker_check.allowed:
                raise ParentInvalid("revoker token fails verification: " + revoker_check.label)

            record = RevocationRecord(target.token_id, as_of, revoker.token_id, reason)
            self.gov.commit(TokenRevoked(record))

        logger.info("revoked %s by %s", target.token_id.hex(), revoker.token_id.hex())
        return record

    def verify(
        self,
        token: Token,
        action_class: ActionClass,
        resource_class: str,
        amount: int,
        as_of: int,
        market_tag: Union[str, None] = None,
    ) -> Verdict:
        stored = self._tokens.get(token.token_id)
        if stored is None:
            return denied(FailureReason.UnknownToken)
        chain = self.chain_of(token.token_id)
        if stored != token:
            return denied(FailureReason.BadSignature, len(chain) - 1)
        record = self.gov.registry.lookup(token.acorp_id)
        return check_request(
            chain,
            record.master_public_key,
            record.status,
            record.status_since,
            self._revocations,
            action_class,
            resource_class,
            amount,
            as_of,
            market_tag,
        )

    # Chain validity without a concrete request
    def check(self, token: Token, as_of: int) -> Verdict:
        stored = self._tokens.get(token.token_id)
        if stored is None:
            return denied(FailureReason.UnknownToken)
        chain = self.chain_of(token.token_id)
        if stored != token:
            return denied(FailureReason.BadSignature, len(chain) - 1)
        record = self.gov.registry.lookup(token.acorp_id)
        return check_chain(
            chain, record.master_public_key, record.status, record.status_since, self._revocations, as_of
        )

    def delegation_tree(self, acorp_id: Union[AcorpId, str]) -> TokenNode:
        record = self.gov.registry.lookup(acorp_id)
        master_id = self._masters.get(record.id.value)
        if master_id is None:
            raise NotFound("no master token for " + str(record.id))
        return self._node(master_id)

    def _node(self, token_id: bytes) -> TokenNode:
        token = self._tokens[token_id]
        return TokenNode(
            token_id=token.token_id,
            holder_public_key=token.holder_public_key,
            scope=token.scope,
            parent_token_id=token.parent_token_id,
            issued_at=token.issued_at,
            revoked=token.token_id in self._revocations,
            children=tuple(self._node(c) for c in self._children.get(token_id, [])),
        )

    # Lookups
    ################################################
    def get(self, token_id: bytes) -> Token:
        token = self._tokens.get(bytes(token_id))
        if token is None:
            raise UnknownToken("no token " + bytes(token_id).hex())
        return token

    def master_of(self, acorp_id: Union[AcorpId, str]) -> Token:
        record = self.gov.registry.lookup(acorp_id)
        return self._tokens[self._masters[record.id.value]]

    # Leaf first, master last
    def chain_of(self, token_id: bytes) -> tuple:
        chain = [self.get(token_id)]
        while chain[-1].parent_token_id is not None:
            chain.append(self._tokens[chain[-1].parent_token_id])
        return tuple(chain)

    def credential(self, token_id: bytes) -> Credential:
        return Credential(self.chain_of(token_id))

    def revocation_list(self) -> tuple:
        return tuple(sorted(self._revocations.values(), key=lambda r: (r.revoked_at, r.token_id)))

    def tokens(self) -> list:
        return [self._tokens[k] for k in sorted(self._tokens)]

    def _fresh_token_id(self) -> bytes:
        token_id = self.gov.ids.token_id()
        while token_id in self._tokens:
            token_id = self.gov.ids.token_id()
        return token_id

    # Event application
    ################################################
    def apply(self, event, seq: int) -> None:
        name = type(event).__name__
        if name == "AcorpRegistered":
            token = event.master_token
            self._masters[token.acorp_id.value] = token.token_id
            self._add(token)
        elif name == "TokenIssued":
            self._add(event.token)
        elif name == "TokenRevoked":
            self._revocations[event.revocation.token_id] = event.revocation

    def _add(self, token: Token) -> None:
        self._tokens[token.token_id] = token
        if token.parent_token_id is not None:
            self._children.setdefault(token.parent_token_id, []).append(token.token_id)
