import dataclasses
import unittest

import numpy as np

from acorp.core.errors import MalformedKey
from acorp.core.scope import (
    grant_covers,
    grant_dominates,
    master_scope,
    parse_action,
    parse_grant,
    scope_covers,
    scope_dominates,
)
from acorp.core.signing import (
    load_public_key,
    load_signing_key,
    public_key_bytes,
    seed_bytes,
    sign,
    verify_signature,
)
from acorp.core.types import (
    EMPTY_SCOPE,
    FOREVER,
    AcorpId,
    ActionClass,
    Grant,
    OwnerRecord,
    Scope,
    WILDCARD,
)
from acorp.core.utils import FixedClock, IdSource, WallClock, make_clock
from tests.support import attenuate, owner, random_scope, seed

PAY_10K = Grant(ActionClass.TRANSACT, "payments", 10_000)
PAY_20K = Grant(ActionClass.TRANSACT, "payments", 20_000)
READ_REPORTS = Grant(ActionClass.READ, "reports", 0)


# python -m unittest tests.test_core.TestTypes
class TestTypes(unittest.TestCase):
    def test_acorp_id(self):
        self.assertEqual(str(AcorpId("ACORP000000000000001")), "ACORP000000000000001")
        bad_ids = ["", "acorp000000000000001", "ACORP00000000000001", "ACORP0000000000000001"]
        for bad in bad_ids + ["ACORP00000000000000-"]:
            with self.assertRaises(ValueError):
                AcorpId(bad)

    def test_read_carries_no_cap(self):
        with self.assertRaises(ValueError):
            Grant(ActionClass.READ, "reports", 1)
        with self.assertRaises(ValueError):
            Grant(ActionClass.TRANSACT, "", 10)
        with self.assertRaises(ValueError):
            Grant(ActionClass.TRANSACT, "payments", -1)

    def test_empty_scope(self):
        self.assertTrue(EMPTY_SCOPE.is_empty)
        with self.assertRaises(ValueError):
            Scope(frozenset(), 10)
        self.assertTrue(master_scope(100).has_wildcard)
        self.assertFalse(Scope(frozenset([PAY_10K]), 10).has_wildcard)

    def test_action_dominance(self):
        for a in ActionClass:
            self.assertTrue(ActionClass.ADMIN.dominates(a))
            self.assertTrue(a.dominates(a))
            for b in ActionClass:
                if a is not b and a is not ActionClass.ADMIN:
                    self.assertFalse(a.dominates(b))


# python -m unittest tests.test_core.TestScope.test_transitivity
class TestScope(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(100)

    def test_grant_dominance(self):
        self.assertTrue(grant_dominates(PAY_20K, PAY_10K))
        self.assertFalse(grant_dominates(PAY_10K, PAY_20K))
        admin = Grant(ActionClass.ADMIN, WILDCARD, 1_000_000)
        self.assertTrue(grant_dominates(admin, PAY_20K))
        self.assertTrue(grant_dominates(admin, READ_REPORTS))
        # market tags only narrow
        eu = Grant(ActionClass.TRANSACT, "payments", 10_000, "eu")
        self.assertTrue(grant_dominates(PAY_10K, eu))
        self.assertFalse(grant_dominates(eu, PAY_10K))
        self.assertFalse(grant_dominates(eu, Grant(ActionClass.TRANSACT, "payments", 10, "us")))
        self.assertFalse(grant_dominates(PAY_10K, Grant(ActionClass.TRANSACT, "compute", 10)))

    def test_scope_dominance(self):
        parent = Scope(frozenset([PAY_10K, READ_REPORTS]), 2000)
        self.assertTrue(scope_dominates(parent, Scope(frozenset([PAY_10K]), 2000)))
        self.assertTrue(scope_dominates(parent, Scope(frozenset([READ_REPORTS]), 1500)))
        self.assertFalse(scope_dominates(parent, Scope(frozenset([PAY_10K]), 2001)))
        self.assertFalse(scope_dominates(parent, Scope(frozenset([PAY_20K]), 2000)))
        # the empty scope sits under everything
        self.assertTrue(scope_dominates(parent, EMPTY_SCOPE))

    def test_reflexivity(self):
        for _ in range(200):
            scope = random_scope(self.rng, wildcard=True)
            self.assertTrue(scope_dominates(scope, scope))

    def test_transitivity(self):
        # random triples rarely chain, so half the triples are built by attenuation
        for i in range(1000):
            a = random_scope(self.rng, wildcard=True)
            if i % 2 == 0:
                b, c = random_scope(self.rng, wildcard=True), random_scope(self.rng, wildcard=True)
            else:
                b = attenuate(self.rng, a)
                c = attenuate(self.rng, b)
                self.assertTrue(scope_dominates(a, b))
                self.assertTrue(scope_dominates(b, c))
            if scope_dominates(a, b) and scope_dominates(b, c):
                self.assertTrue(scope_dominates(a, c))

    def test_antisymmetry_on_distinct_caps(self):
        a = Scope(frozenset([PAY_10K]), 10)
        b = Scope(frozenset([PAY_20K]), 10)
        self.assertTrue(scope_dominates(b, a))
        self.assertFalse(scope_dominates(a, b))

    def test_covers(self):
        scope = Scope(frozenset([PAY_10K, READ_REPORTS]), 2000)
        self.assertEqual(scope_covers(scope, ActionClass.TRANSACT, "payments", 9900), PAY_10K)
        self.assertEqual(scope_covers(scope, ActionClass.TRANSACT, "payments", 10_000), PAY_10K)
        self.assertIsNone(scope_covers(scope, ActionClass.TRANSACT, "payments", 10_001))
        self.assertIsNone(scope_covers(scope, ActionClass.CONTRACT, "payments", 1))
        self.assertEqual(scope_covers(scope, ActionClass.READ, "reports", 0), READ_REPORTS)
        eu = Grant(ActionClass.TRANSACT, "payments", 100, "eu")
        self.assertTrue(grant_covers(eu, ActionClass.TRANSACT, "payments", 100, "eu"))
        self.assertFalse(grant_covers(eu, ActionClass.TRANSACT, "payments", 100, None))

    def test_parse(self):
        self.assertEqual(parse_grant("TRANSACT:payments:10000"), PAY_10K)
        self.assertEqual(parse_grant("read:reports"), READ_REPORTS)
        self.assertEqual(
            parse_grant("TRANSACT:payments:500:eu"),
            Grant(ActionClass.TRANSACT, "payments", 500, "eu"),
        )
        self.assertEqual(
            parse_action("TRANSACT:payments:9900"), (ActionClass.TRANSACT, "payments", 9900, None)
        )
        for bad in ["TRANSACT", "FLY:payments:1", "TRANSACT:payments:x", "READ:reports:5"]:
            with self.assertRaises(ValueError):
                parse_grant(bad)
        with self.assertRaises(ValueError):
            parse_action("TRANSACT::10")


# python -m unittest tests.test_core.TestSigning
class TestSigning(unittest.TestCase):
    def test_keys(self):
        key = load_signing_key(seed(1))
        self.assertEqual(seed_bytes(key), seed(1))
        self.assertEqual(len(public_key_bytes(seed(1))), 32)
        self.assertEqual(public_key_bytes(key), public_key_bytes(seed(1)))
        with self.assertRaises(MalformedKey):
            load_signing_key(b"short")
        with self.assertRaises(MalformedKey):
            load_public_key(b"\x00" * 31)

    def test_sign_verify(self):
        rng = np.random.default_rng(7)
        for i in range(100):
            record = OwnerRecord("owner " + str(i), "id-" + str(i), int(rng.integers(0, 10**9)))
            envelope = sign(record, seed(i))
            self.assertTrue(verify_signature(record, envelope))
            # any field change breaks the signature
            tampered = dataclasses.replace(record, stake_value=record.stake_value + 1)
            self.assertFalse(verify_signature(tampered, envelope))
            # a signature under another key does not verify as this one
            forged = dataclasses.replace(envelope, signer_public_key=public_key_bytes(seed(i + 1)))
            self.assertFalse(verify_signature(record, forged))

    def test_flipped_signature(self):
        record = owner()
        envelope = sign(record, seed(3))
        flipped = bytes([envelope.signature_bytes[0] ^ 1]) + envelope.signature_bytes[1:]
        self.assertFalse(verify_signature(record, dataclasses.replace(envelope, signature_bytes=flipped)))


# python -m unittest tests.test_core.TestUtils
class TestUtils(unittest.TestCase):
    def test_id_source_deterministic(self):
        a, b = IdSource(42), IdSource(42)
        self.assertEqual([a.acorp_id() for _ in range(5)], [b.acorp_id() for _ in range(5)])
        self.assertEqual(a.token_id(), b.token_id())
        self.assertNotEqual(IdSource(1).token_id(), IdSource(2).token_id())
        self.assertEqual(len(IdSource(3).action_id()), 16)

    def test_id_source_distinct(self):
        ids = IdSource(5)
        drawn = set(ids.acorp_id().value for _ in range(500))
        self.assertEqual(len(drawn), 500)

    def test_clocks(self):
        clock = FixedClock(1000)
        self.assertEqual(clock.now(), 1000)
        self.assertEqual(clock.advance(5), 1005)
        self.assertIsInstance(make_clock("WALL"), WallClock)
        self.assertIsInstance(make_clock("wall"), WallClock)
        self.assertEqual(make_clock(77).now(), 77)
        self.assertGreater(WallClock().now(), 0)
        self.assertLess(FOREVER, 2**64)
