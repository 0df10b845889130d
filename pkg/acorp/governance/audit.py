# Written by the acorp developers - 2026
#####################################################
import logging
import os
import struct
from dataclasses import dataclass
from typing import Union

from ..core.encoding import Canonical, canonical_decode, canonical_encode, canonical_record
from ..core.errors import EncodingUnsupported, StorageFailure, UnknownAction
from ..core.types import AcorpId, OwnerRecord
from ..core.utils import sha256
from .ledger import NO_TOKEN, ActionRecord
from .registry import AcorpRecord

logger = logging.getLogger(__name__)

GENESIS_HASH = bytes(32)

# Log file layout: repeated [4-byte big-endian length | canonical LogEntry]
FRAME = struct.Struct(">I")


@canonical_record(0x60)
@dataclass(frozen=True)
class LogEntry:
    seq: int
    payload: bytes
    prev_hash: bytes
    entry_hash: bytes

    def __post_init__(self):
        if not isinstance(self.seq, int) or isinstance(self.seq, bool):
            raise ValueError("seq must be an integer")
        for name in ("payload", "prev_hash", "entry_hash"):
            if not isinstance(getattr(self, name), bytes):
                raise ValueError(name + " must be bytes")
        if len(self.prev_hash) != 32 or len(self.entry_hash) != 32:
            raise ValueError("hashes are 32 bytes")

    @staticmethod
    def digest(seq: int, payload: bytes, prev_hash: bytes) -> bytes:
        return sha256(
            Canonical.pack_int(seq) + Canonical.pack_bytes(payload) + Canonical.pack_bytes(prev_hash)
        )

    @classmethod
    def chain(cls, seq: int, payload: bytes, prev_hash: bytes) -> "LogEntry":
        return cls(seq, payload, prev_hash, cls.digest(seq, payload, prev_hash))

    @property
    def event(self):
        return canonical_decode(self.payload)


@canonical_record(0x61)
@dataclass(frozen=True)
class ProvenanceChain:
    action: ActionRecord
    tokens: tuple
    acorp: AcorpRecord
    owner: OwnerRecord


@canonical_record(0x62)
@dataclass(frozen=True)
class IntegrityReport:
    intact: bool
    first_break: Union[int, None]
    last_seq: int


# Walks entries in order and returns the seq of the first entry that does not chain, or None
def first_break(entries) -> Union[int, None]:
    prev_hash = GENESIS_HASH
    for expected_seq, entry in enumerate(entries, start=1):
        if (
            entry.seq != expected_seq
            or entry.prev_hash != prev_hash
            or entry.entry_hash != LogEntry.digest(entry.seq, entry.payload, entry.prev_hash)
        ):
            return expected_seq
        prev_hash = entry.entry_hash
    return None


# Reads a log file. Returns the entries that chain correctly and the integrity report.
def scan_log_file(path: str) -> tuple:
    with open(path, "rb") as f:
        data = f.read()

    entries, offset, broken = [], 0, None
    while offset < len(data):
        seq = len(entries) + 1
        if offset + FRAME.size > len(data):
            broken = seq
            break
        (length,) = FRAME.unpack_from(data, offset)
        frame = data[offset + FRAME.size : offset + FRAME.size + length]
        offset += FRAME.size + length
        try:
            entry = canonical_decode(frame, LogEntry)
        except EncodingUnsupported:
            broken = seq
            break
        if (
            entry.seq != seq
            or entry.prev_hash != (entries[-1].entry_hash if entries else GENESIS_HASH)
            or entry.entry_hash != LogEntry.digest(entry.seq, entry.payload, entry.prev_hash)
        ):
            broken = seq
            break
        entries.append(entry)

    return entries, IntegrityReport(broken is None, broken, len(entries))


class AuditLog:
    def __init__(self, gov, path: Union[str, None] = None, durable: bool = True):
        self.gov = gov
        self.path = path
        self.durable = durable
        self.entries = []
        self._actions = {}
        self._by_acorp = {}
        self._file = None

    @property
    def last_seq(self) -> int:
        return len(self.entries)

    @property
    def head_hash(self) -> bytes:
        return self.entries[-1].entry_hash if self.entries else GENESIS_HASH

    def open_file(self) -> None:
        if self.path is None or self._file is not None:
            return
        try:
            self._file = open(self.path, "ab")
        except OSError as e:
            raise StorageFailure(str(e)) from e

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    # Operations
    ################################################
    def append(self, event) -> LogEntry:
        entry = LogEntry.chain(self.last_seq + 1, canonical_encode(event), self.head_hash)
        if self.path is not None:
            self.open_file()
            encoded = canonical_encode(entry)
            start = self._file.seek(0, os.SEEK_END)
            try:
                self._file.write(FRAME.pack(len(encoded)) + encoded)
                self._file.flush()
                if self.durable:
                    os.fsync(self._file.fileno())
            except OSError as e:
                self._rollback(start)
                raise StorageFailure(str(e)) from e
        self.entries.append(entry)
        return entry

    # Cut a torn frame so the file ends on the last whole entry; the next append reopens it
    def _rollback(self, size: int) -> None:
        try:
            self._file.close()
        except OSError:
            pass
        self._file = None
        try:
            os.truncate(self.path, size)
        except OSError as e:
            logger.error("could not cut torn frame from %s: %s", self.path, e)

    # Used on replay: the entry is already on disk
    def adopt(self, entry: LogEntry) -> None:
        self.entries.append(entry)

    def verify_log_integrity(self) -> IntegrityReport:
        if self.path is not None and os.path.exists(self.path):
            if self._file is not None:
                self._file.flush()
            return scan_log_file(self.path)[1]
        broken = first_break(self.entries)
        return IntegrityReport(broken is None, broken, self.last_seq)

    def trace(self, action_id: bytes) -> ProvenanceChain:
        found = self._actions.get(bytes(action_id))
        if found is None:
            raise UnknownAction("no action " + bytes(action_id).hex())
        action = found[1]
        tokens = () if action.token_id == NO_TOKEN else self.gov.capability.chain_of(action.token_id)
        return ProvenanceChain(
            action=action,
            tokens=tokens,
            acorp=self.gov.registry.lookup(action.acorp_id),
            owner=self.gov.registry.owner_at(action.acorp_id, action.as_of),
        )

    def list_actions(self, acorp_id: Union[AcorpId, str], start: int, end: int) -> list:
        key = acorp_id.value if isinstance(acorp_id, AcorpId) else str(acorp_id)
        return [a for _, a in self._by_acorp.get(key, []) if start <= a.as_of <= end]

    def get_action(self, action_id: bytes) -> ActionRecord:
        found = self._actions.get(bytes(action_id))
        if found is None:
            raise UnknownAction("no action " + bytes(action_id).hex())
        return found[1]

    def has_action(self, action_id: bytes) -> bool:
        return bytes(action_id) in self._actions

    # Event application: index every event that carries an ActionRecord
    ################################################
    def apply(self, event, seq: int) -> None:
        action = getattr(event, "action", None)
        if not isinstance(action, ActionRecord):
            return
        self._actions[action.action_id] = (seq, action)
        self._by_acorp.setdefault(action.acorp_id.value, []).append((seq, action))
