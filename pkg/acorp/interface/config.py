# Written by the acorp developers - 2026
#####################################################
import re
from typing import Union

from ..core.errors import ConfigInvalid
from ..core.utils import FixedClock, WallClock, make_clock
from ..governance.ledger import ledger_config
from ..governance.mandate import MandatePolicy
from ..utils.config import load_kv_file

SERVICE_DEFAULTS = {
    "listen_address": "127.0.0.1:8080",
    "data_dir": "./acorp-data",
    "compute_price": 1,
    "repurchase_units": 1,
    "clock_mode": "WALL",
    "mandate": True,
    "mandate_domains": None,
    "id_seed": None,
    "durable": True,
}

_FIXED_RE = re.compile(r"^FIXED\((\d+)\)$", re.IGNORECASE)


def parse_listen_address(text: str) -> tuple:
    host, sep, port = str(text).rpartition(":")
    if not sep or not host or not port.isdigit() or not 0 < int(port) < 65536:
        raise ConfigInvalid("listen_address must look like host:port, got " + repr(text))
    return host, int(port)


# "WALL" | "FIXED(n)" | n -> canonical form "WALL" or the fixed timestamp
def parse_clock_mode(value: Union[str, int]) -> Union[str, int]:
    if isinstance(value, bool):
        raise ConfigInvalid("clock_mode must be WALL or FIXED(timestamp)")
    if isinstance(value, int):
        if value < 0:
            raise ConfigInvalid("a fixed clock needs a non-negative timestamp")
        return value
    text = str(value).strip()
    if text.upper() == "WALL":
        return "WALL"
    match = _FIXED_RE.match(text)
    if match is None:
        raise ConfigInvalid("clock_mode must be WALL or FIXED(timestamp), got " + repr(value))
    return int(match.group(1))


def _domains(value) -> Union[frozenset, None]:
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p.strip() for p in value.split(",") if p.strip()]
    else:
        parts = [str(p) for p in value]
    if not parts:
        raise ConfigInvalid("mandate_domains lists at least one resource class, or is none")
    return frozenset(parts)


def service_config(**kwargs) -> dict:
    unknown = sorted(set(kwargs) - set(SERVICE_DEFAULTS))
    if unknown:
        raise ConfigInvalid("unknown service keys: " + ", ".join(unknown))

    config = dict(SERVICE_DEFAULTS)
    config.update(kwargs)

    parse_listen_address(config["listen_address"])
    for key in ("compute_price", "repurchase_units"):
        value = config[key]
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigInvalid(key + " must be an integer >= 1, got " + repr(value))
    if not config["data_dir"]:
        raise ConfigInvalid("data_dir must be set")
    if not isinstance(config["mandate"], bool):
        raise ConfigInvalid("mandate must be true or false")
    seed = config["id_seed"]
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise ConfigInvalid("id_seed must be a non-negative integer or none")

    config["listen_address"] = str(config["listen_address"])
    config["data_dir"] = str(config["data_dir"])
    config["clock_mode"] = parse_clock_mode(config["clock_mode"])
    config["mandate_domains"] = _domains(config["mandate_domains"])
    config["durable"] = bool(config["durable"])
    return config


# Alias: follow similar naming to the simulator config
ServiceConfig = service_config


def load_service_config(path: str) -> dict:
    return service_config(**load_kv_file(path))


# Helpers turning a service config into the pieces Governance and the service need
def service_ledger(config: dict) -> dict:
    return ledger_config(config["compute_price"], config["repurchase_units"])


def service_clock(config: dict) -> Union[WallClock, FixedClock]:
    return make_clock(config["clock_mode"])


def service_mandate(config: dict) -> MandatePolicy:
    return MandatePolicy(config["mandate"], config["mandate_domains"])
