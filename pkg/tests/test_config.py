import io
import logging
import os
import shutil
import tempfile
import unittest

from acorp.core.errors import ConfigInvalid
from acorp.core.utils import FixedClock, WallClock
from acorp.governance.mandate import MandatePolicy
from acorp.interface.config import (
    SERVICE_DEFAULTS,
    ServiceConfig,
    load_service_config,
    parse_clock_mode,
    parse_listen_address,
    service_clock,
    service_config,
    service_ledger,
    service_mandate,
)
from acorp.utils.config import parse_kv, parse_value
from acorp.utils.logging import ColoredFormatter, setup_logging


# python -m unittest tests.test_config.TestKeyValue
class TestKeyValue(unittest.TestCase):
    def test_values(self):
        self.assertEqual(parse_value("12"), 12)
        self.assertEqual(parse_value("-0.25"), -0.25)
        self.assertIs(parse_value("Yes"), True)
        self.assertIs(parse_value("off"), False)
        self.assertIsNone(parse_value("none"))
        self.assertEqual(parse_value("127.0.0.1:8080"), "127.0.0.1:8080")

    def test_parse(self):
        text = "# service\nlisten_address = 0.0.0.0:9000  # all interfaces\n\ncompute_price=3\n"
        self.assertEqual(parse_kv(text), {"listen_address": "0.0.0.0:9000", "compute_price": 3})

    def test_errors(self):
        for text in ["just a line", " = 3", "a = 1\na = 2"]:
            with self.assertRaises(ConfigInvalid):
                parse_kv(text, "test.conf")
        with self.assertRaises(ConfigInvalid) as ctx:
            parse_kv("a = 1\n\nb 2", "test.conf")
        self.assertIn("test.conf:3", str(ctx.exception))


# python -m unittest tests.test_config.TestServiceConfig
class TestServiceConfig(unittest.TestCase):
    def test_defaults(self):
        config = service_config()
        self.assertEqual(config["clock_mode"], "WALL")
        self.assertEqual(set(config), set(SERVICE_DEFAULTS))
        self.assertEqual(ServiceConfig(), config)
        self.assertIsInstance(service_clock(config), WallClock)
        self.assertEqual(service_mandate(config), MandatePolicy(True, None))
        self.assertEqual(service_ledger(config)["compute_price"], 1)

    def test_values(self):
        config = service_config(clock_mode="fixed(1500)", mandate_domains="compute, payments", compute_price=2)
        self.assertEqual(config["clock_mode"], 1500)
        clock = service_clock(config)
        self.assertIsInstance(clock, FixedClock)
        self.assertEqual(clock.now(), 1500)
        self.assertEqual(config["mandate_domains"], frozenset(["compute", "payments"]))
        self.assertFalse(service_mandate(config).applies_to("contracts"))
        self.assertEqual(service_ledger(config)["compute_price"], 2)

    def test_listen_address(self):
        self.assertEqual(parse_listen_address("localhost:80"), ("localhost", 80))
        self.assertEqual(parse_listen_address("::1:8080"), ("::1", 8080))
        for bad in ["8080", ":8080", "host:", "host:0", "host:70000", "host:http"]:
            with self.assertRaises(ConfigInvalid):
                parse_listen_address(bad)

    def test_clock_modes(self):
        self.assertEqual(parse_clock_mode(" wall "), "WALL")
        self.assertEqual(parse_clock_mode(42), 42)
        for bad in [True, -1, "FIXED()", "FIXED(-3)", "monotonic"]:
            with self.assertRaises(ConfigInvalid):
                parse_clock_mode(bad)

    def test_errors(self):
        for bad in [
            {"listen": "x:1"},
            {"compute_price": 0},
            {"repurchase_units": True},
            {"data_dir": ""},
            {"mandate": "yes"},
            {"id_seed": -1},
            {"mandate_domains": ","},
        ]:
            with self.assertRaises(ConfigInvalid):
                service_config(**bad)

    def test_load(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, "service.conf")
            with open(path, "w") as f:
                f.write("listen_address = 127.0.0.1:9090\nclock_mode = FIXED(7)\nmandate = off\nid_seed = 3\n")
            config = load_service_config(path)
            self.assertEqual(config["listen_address"], "127.0.0.1:9090")
            self.assertEqual(config["clock_mode"], 7)
            self.assertFalse(config["mandate"])
            self.assertEqual(config["id_seed"], 3)
            with self.assertRaises(ConfigInvalid):
                load_service_config(os.path.join(tmp, "missing.conf"))
        finally:
            shutil.rmtree(tmp, ignore_errors=True)


# python -m unittest tests.test_config.TestLogging
class TestLogging(unittest.TestCase):
    def drop_handlers(self):
        logger = logging.getLogger("acorp")
        logger.handlers = [h for h in logger.handlers if not getattr(h, "_acorp_handler", False)]

    setUp = tearDown = drop_handlers

    def test_setup_once(self):
        stream = io.StringIO()
        logger = setup_logging(False, stream)
        setup_logging(True, stream)
        self.assertEqual(sum(getattr(h, "_acorp_handler", False) for h in logger.handlers), 1)
        self.assertEqual(logger.level, logging.DEBUG)
        logging.getLogger("acorp.sim.world").debug("generation %d", 3)
        self.assertIn("acorp.sim.world: generation 3", stream.getvalue())

    def test_quiet_by_default(self):
        stream = io.StringIO()
        setup_logging(False, stream)
        logging.getLogger("acorp.governance.registry").info("registered")
        self.assertEqual(stream.getvalue(), "")
        logging.getLogger("acorp.governance.mandate").warning("willful blindness")
        self.assertIn("willful blindness", stream.getvalue())

    def test_formatter(self):
        record = logging.LogRecord("acorp", logging.WARNING, __file__, 1, "hello %s", ("there",), None)
        text = ColoredFormatter("%(message)s").format(record)
        self.assertIn("WARNING", text)
        self.assertTrue(text.endswith("hello there"))
