# Written by the acorp developers - 2026
#####################################################
import dataclasses
from typing import Any, Union

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .encoding import canonical_encode
from .errors import MalformedKey, EncodingUnsupported
from .types import SignatureEnvelope, ZERO_ENVELOPE, PUBLIC_KEY_SIZE

# One fixed EdDSA scheme (Ed25519). Seeds and public keys travel as raw 32 bytes.
SEED_SIZE = 32

SigningKey = Union[Ed25519PrivateKey, bytes]


def generate_signing_key() -> Ed25519PrivateKey:
    return Ed25519PrivateKey.generate()


def load_signing_key(key: SigningKey) -> Ed25519PrivateKey:
    if isinstance(key, Ed25519PrivateKey):
        return key
    if isinstance(key, (bytes, bytearray)) and len(key) == SEED_SIZE:
        return Ed25519PrivateKey.from_private_bytes(bytes(key))
    raise MalformedKey("expected an Ed25519 private key or a 32-byte seed")


def load_public_key(key: bytes) -> Ed25519PublicKey:
    if not isinstance(key, (bytes, bytearray)) or len(key) != PUBLIC_KEY_SIZE:
        raise MalformedKey("expected a 32-byte Ed25519 public key")
    try:
        return Ed25519PublicKey.from_public_bytes(bytes(key))
    except ValueError as e:
        raise MalformedKey(str(e)) from e


def seed_bytes(key: SigningKey) -> bytes:
    return load_signing_key(key).private_bytes(
        encoding=serialization.Encoding.Raw,
        format=serialization.PrivateFormat.Raw,
        encryption_algorithm=serialization.NoEncryption(),
    )


def public_key_bytes(key: Union[SigningKey, Ed25519PublicKey]) -> bytes:
    if isinstance(key, Ed25519PublicKey):
        return key.public_bytes_raw()
    return load_signing_key(key).public_key().public_bytes_raw()


# Bytes covered by a signature: the canonical encoding with the record's own signature field zeroed
def signing_payload(record: Any) -> bytes:
    field = getattr(type(record), "signature_field", None)
    if field is not None:
        record = dataclasses.replace(record, **{field: ZERO_ENVELOPE})
    return canonical_encode(record)


def sign(record: Any, signing_key: SigningKey) -> SignatureEnvelope:
    key = load_signing_key(signing_key)
    signature = key.sign(signing_payload(record))
    return SignatureEnvelope(public_key_bytes(key), signature)


def verify_signature(record: Any, envelope: SignatureEnvelope) -> bool:
    try:
        public_key = load_public_key(envelope.signer_public_key)
        public_key.verify(envelope.signature_bytes, signing_payload(record))
    except (InvalidSignature, MalformedKey, EncodingUnsupported):
        return False
    return True
