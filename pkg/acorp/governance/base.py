# Written by the acorp developers - 2026
#####################################################
import logging
import os
import threading
from dataclasses import dataclass
from typing import Union

from ..core.encoding import canonical_decode, canonical_encode, canonical_record
from ..core.errors import CorruptDataDir, EncodingUnsupported, StorageFailure
from ..core.utils import FixedClock, IdSource, WallClock
from .audit import AuditLog, scan_log_file
from .capability import CapabilityStore
from .ledger import ActionExecuted, Ledger, LedgerTotals, ledger_config
from .registry import Registry

logger = logging.getLogger(__name__)

LOG_FILE = "audit.log"
SNAPSHOT_FILE = "snapshot.bin"


# Full derived state at a log position; written next to the log and cross-checked on reopen
@canonical_record(0x70)
@dataclass(frozen=True)
class StateSnapshot:
    seq: int
    entry_hash: bytes
    registry_seq: int
    acorps: tuple
    accounts: tuple
    totals: LedgerTotals
    tokens: tuple
    revocations: tuple


class Governance:
    """
    Registry, capability store, ledger and audit log behind one total order.

    Every mutation validates, appends its event to the audit log and then applies the event to
    each module. Replaying the log through the same apply path rebuilds the live state.
    """

    def __init__(
        self,
        data_dir: Union[str, None] = None,
        id_seed: Union[bytes, int, None] = None,
        ledger_params: Union[dict, None] = None,
        clock: Union[WallClock, FixedClock, None] = None,
        durable: bool = True,
    ):
        self.order = threading.RLock()
        self.data_dir = data_dir
        self.ids = IdSource(id_seed)
        self.clock = clock if clock is not None else WallClock()

        log_path = os.path.join(data_dir, LOG_FILE) if data_dir is not None else None
        self.registry = Registry(self)
        self.capability = CapabilityStore(self)
        self.ledger = Ledger(self, ledger_params if ledger_params is not None else ledger_config())
        self.audit = AuditLog(self, log_path, durable)
        self._modules = (self.registry, self.capability, self.ledger, self.audit)

    @classmethod
    def open(
        cls,
        data_dir: str,
        id_seed: Union[bytes, int, None] = None,
        ledger_params: Union[dict, None] = None,
        clock: Union[WallClock, FixedClock, None] = None,
        durable: bool = True,
    ) -> "Governance":
        try:
            os.makedirs(data_dir, exist_ok=True)
        except OSError as e:
            raise StorageFailure(str(e)) from e

        gov = cls(data_dir, id_seed, ledger_params, clock, durable)
        snapshot = gov._read_snapshot()

        if os.path.exists(gov.audit.path):
            entries, report = scan_log_file(gov.audit.path)
            if not report.intact:
                raise CorruptDataDir(
                    "audit log breaks at seq " + str(report.first_break) + " in " + data_dir
                )
            if snapshot is not None and snapshot.seq > len(entries):
                raise CorruptDataDir("snapshot is ahead of the audit log: log was truncated")
            expected = canonical_encode(snapshot) if snapshot is not None else None
            for entry in entries:
                gov.audit.adopt(entry)
                gov.apply(entry.event, entry.seq)
                if expected is not None and entry.seq == snapshot.seq:
                    if canonical_encode(gov.snapshot()) != expected:
                        raise CorruptDataDir(
                            "replayed state differs from snapshot at seq " + str(entry.seq)
                        )
            logger.info("replayed %d log entries from %s", len(entries), data_dir)
        elif snapshot is not None and snapshot.seq > 0:
            raise CorruptDataDir("snapshot present without an audit log")

        gov.audit.open_file()
        return gov

    # Replays entries into a fresh in-memory instance. With reverify, every token-authorized action
    # is verified again at its recorded as_of against the state just before it; failing action ids are
    # collected on the returned instance as .reverify_failures.
    @classmethod
    def replay(
        cls, entries, ledger_params: Union[dict, None] = None, reverify: bool = False
    ) -> "Governance":
        gov = cls(ledger_params=ledger_params)
        gov.reverify_failures = []
        for entry in entries:
            event = entry.event
            if reverify and isinstance(event, ActionExecuted):
                action = event.action
                action_class, resource_class = gov.ledger.config["action_resources"][action.kind.name]
                verdict = gov.capability.verify(
                    gov.capability.get(action.token_id),
                    action_class,
                    resource_class,
                    action.amount,
                    action.as_of,
                    event.market_tag,
                )
                if not verdict.allowed:
                    gov.reverify_failures.append(action.action_id)
            gov.audit.adopt(entry)
            gov.apply(event, entry.seq)
        return gov

    # Called by modules while holding self.order
    def commit(self, event):
        with self.order:
            entry = self.audit.append(event)
            self.apply(event, entry.seq)
            return entry

    def apply(self, event, seq: int) -> None:
        for module in self._modules:
            module.apply(event, seq)

    def now(self) -> int:
        return self.clock.now()

    def close(self) -> None:
        self.audit.close()

    # Snapshots
    ################################################
    def snapshot(self) -> StateSnapshot:
        with self.order:
            return StateSnapshot(
                seq=self.audit.last_seq,
                entry_hash=self.audit.head_hash,
                registry_seq=self.registry.seq,
                acorps=tuple(self.registry.records()),
                accounts=tuple(self.ledger.accounts()),
                totals=self.ledger.totals,
                tokens=tuple(self.capability.tokens()),
                revocations=self.capability.revocation_list(),
            )

    def save_snapshot(self) -> StateSnapshot:
        snapshot = self.snapshot()
        if self.data_dir is None:
            logger.warning("no data_dir: snapshot at seq %d kept in memory only", snapshot.seq)
            return snapshot
        path = os.path.join(self.data_dir, SNAPSHOT_FILE)
        try:
            with open(path + ".tmp", "wb") as f:
                f.write(canonical_encode(snapshot))
                f.flush()
                os.fsync(f.fileno())
            os.replace(path + ".tmp", path)
        except OSError as e:
            raise StorageFailure(str(e)) from e
        return snapshot

    def _read_snapshot(self) -> Union[StateSnapshot, None]:
        path = os.path.join(self.data_dir, SNAPSHOT_FILE)
        if not os.path.exists(path):
            return None
        with open(path, "rb") as f:
            data = f.read()
        try:
            return canonical_decode(data, StateSnapshot)
        except EncodingUnsupported as e:
            raise CorruptDataDir("unreadable snapshot: " + str(e)) from e
