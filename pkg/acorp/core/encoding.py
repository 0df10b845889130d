# Written by the acorp developers - 2026
#####################################################
import dataclasses
import struct
from enum import Enum
from typing import Any, Callable, Union

from .errors import EncodingUnsupported

# Wire layout of every value: 1-byte tag | 4-byte big-endian length | payload
TAG_INT = 0x01
TAG_STR = 0x02
TAG_BYTES = 0x03
TAG_BOOL = 0x04
TAG_NONE = 0x05
TAG_LIST = 0x06
TAG_SET = 0x07
TAG_ENUM = 0x08

# Record tags start here; 0x09-0x1F are reserved for future primitives
FIRST_RECORD_TAG = 0x20

INT_MAX = 2**64 - 1
HEADER = struct.Struct(">BI")

# tag -> record class / enum kind -> enum class
_RECORD_REGISTRY = {}
_ENUM_REGISTRY = {}


def canonical_record(tag: int) -> Callable:
    # Class decorator: registers a dataclass as an encodable record kind
    assert FIRST_RECORD_TAG <= tag <= 0xFF, "record tag out of range: " + str(tag)

    def _register(cls):
        assert dataclasses.is_dataclass(cls), cls.__name__ + " is not a dataclass"
        assert tag not in _RECORD_REGISTRY, (
            "record tag " + hex(tag) + " already used by " + _RECORD_REGISTRY.get(tag, cls).__name__
        )
        cls._record_tag = tag
        _RECORD_REGISTRY[tag] = cls
        return cls

    return _register


def canonical_enum(kind: int) -> Callable:
    assert 0 < kind <= 0xFF, "enum kind out of range: " + str(kind)

    def _register(cls):
        assert kind not in _ENUM_REGISTRY, "enum kind " + str(kind) + " already registered"
        cls._enum_kind = kind
        _ENUM_REGISTRY[kind] = cls
        return cls

    return _register


# Canonical TLV codec. format: pack_<kind> / unpack_<kind>
class Canonical:
    @staticmethod
    def frame(tag: int, payload: bytes) -> bytes:
        return HEADER.pack(tag, len(payload)) + payload

    # Primitives
    ################################################
    @staticmethod
    def pack_int(value: int) -> bytes:
        if value < 0 or value > INT_MAX:
            raise EncodingUnsupported("integer out of the unsigned 64-bit range: " + str(value))
        return Canonical.frame(TAG_INT, value.to_bytes(8, "big"))

    @staticmethod
    def unpack_int(payload: bytes) -> int:
        if len(payload) != 8:
            raise EncodingUnsupported("integer payload must be 8 bytes")
        return int.from_bytes(payload, "big")

    @staticmethod
    def pack_str(value: str) -> bytes:
        return Canonical.frame(TAG_STR, value.encode("utf-8"))

    @staticmethod
    def unpack_str(payload: bytes) -> str:
        try:
            return payload.decode("utf-8")
        except UnicodeDecodeError as e:
            raise EncodingUnsupported("invalid utf-8 string") from e

    @staticmethod
    def pack_bytes(value: bytes) -> bytes:
        return Canonical.frame(TAG_BYTES, bytes(value))

    @staticmethod
    def pack_bool(value: bool) -> bytes:
        return Canonical.frame(TAG_BOOL, b"\x01" if value else b"\x00")

    @staticmethod
    def unpack_bool(payload: bytes) -> bool:
        if payload not in (b"\x00", b"\x01"):
            raise EncodingUnsupported("invalid bool payload")
        return payload == b"\x01"

    @staticmethod
    def pack_enum(value: Enum) -> bytes:
        kind = getattr(type(value), "_enum_kind", None)
        if kind is None:
            raise EncodingUnsupported("enum " + type(value).__name__ + " is not registered")
        return Canonical.frame(TAG_ENUM, bytes([kind]) + int(value.value).to_bytes(8, "big"))

    @staticmethod
    def unpack_enum(payload: bytes) -> Enum:
        if len(payload) != 9 or payload[0] not in _ENUM_REGISTRY:
            raise EncodingUnsupported("unknown enum payload")
        try:
            return _ENUM_REGISTRY[payload[0]](int.from_bytes(payload[1:], "big"))
        except ValueError as e:
            raise EncodingUnsupported(str(e)) from e

    # Containers
    ################################################
    @staticmethod
    def pack_list(values) -> bytes:
        return Canonical.frame(TAG_LIST, b"".join(Canonical.pack(v) for v in values))

    # Sets are order-independent: members are sorted by their own encodings
    @staticmethod
    def pack_set(values) -> bytes:
        members = sorted(set(Canonical.pack(v) for v in values))
        return Canonical.frame(TAG_SET, b"".join(members))

    @staticmethod
    def pack_record(record) -> bytes:
        payload = b"".join(
            Canonical.pack(getattr(record, f.name)) for f in dataclasses.fields(record)
        )
        return Canonical.frame(record._record_tag, payload)

    # Dispatch
    ################################################
    @staticmethod
    def pack(value: Any) -> bytes:
        # Order matters: bool and IntEnum are both int subclasses
        if value is None:
            return Canonical.frame(TAG_NONE, b"")
        if isinstance(value, bool):
            return Canonical.pack_bool(value)
        if isinstance(value, Enum):
            return Canonical.pack_enum(value)
        if isinstance(value, int):
            return Canonical.pack_int(value)
        if isinstance(value, str):
            return Canonical.pack_str(value)
        if isinstance(value, (bytes, bytearray)):
            return Canonical.pack_bytes(value)
        if isinstance(value, (frozenset, set)):
            return Canonical.pack_set(value)
        if isinstance(value, (list, tuple)):
            return Canonical.pack_list(value)
        if dataclasses.is_dataclass(value) and hasattr(type(value), "_record_tag"):
            return Canonical.pack_record(value)
        raise EncodingUnsupported("cannot encode " + type(value).__name__)

    @staticmethod
    def read_frame(data: bytes, offset: int) -> tuple:
        if offset + HEADER.size > len(data):
            raise EncodingUnsupported("truncated header at offset " + str(offset))
        tag, length = HEADER.unpack_from(data, offset)
        start = offset + HEADER.size
        end = start + length
        if end > len(data):
            raise EncodingUnsupported("truncated payload at offset " + str(offset))
        return tag, data[start:end], end

    @staticmethod
    def unpack_sequence(payload: bytes) -> list:
        values, offset = [], 0
        while offset < len(payload):
            value, offset = Canonical.unpack_from(payload, offset)
            values.append(value)
        return values

    @staticmethod
    def unpack_from(data: bytes, offset: int = 0) -> tuple:
        tag, payload, end = Canonical.read_frame(data, offset)

        if tag in Canonical.unpack_primitive:
            return Canonical.unpack_primitive[tag](payload), end
        if tag == TAG_NONE:
            if payload:
                raise EncodingUnsupported("none carries no payload")
            return None, end
        if tag == TAG_LIST:
            return tuple(Canonical.unpack_sequence(payload)), end
        if tag == TAG_SET:
            return frozenset(Canonical.unpack_sequence(payload)), end
        if tag in _RECORD_REGISTRY:
            cls = _RECORD_REGISTRY[tag]
            values = Canonical.unpack_sequence(payload)
            if len(values) != len(dataclasses.fields(cls)):
                raise EncodingUnsupported("field count mismatch for " + cls.__name__)
            try:
                return cls(*values), end
            except (TypeError, ValueError) as e:
                raise EncodingUnsupported(cls.__name__ + ": " + str(e)) from e
        raise EncodingUnsupported("unknown tag " + hex(tag))


Canonical.unpack_primitive = {
    TAG_INT: Canonical.unpack_int,
    TAG_STR: Canonical.unpack_str,
    TAG_BYTES: bytes,
    TAG_BOOL: Canonical.unpack_bool,
    TAG_ENUM: Canonical.unpack_enum,
}


def canonical_encode(record: Any) -> bytes:
    return Canonical.pack(record)


# Strict decode: trailing bytes and non-canonical encodings are rejected
def canonical_decode(data: Union[bytes, bytearray], expected: Union[type, None] = None) -> Any:
    data = bytes(data)
    value, end = Canonical.unpack_from(data, 0)
    if end != len(data):
        raise EncodingUnsupported("trailing bytes after record")
    if Canonical.pack(value) != data:
        raise EncodingUnsupported("non-canonical encoding")
    if expected is not None and not isinstance(value, expected):
        raise EncodingUnsupported(
            "expected " + expected.__name__ + ", got " + type(value).__name__
        )
    return value
