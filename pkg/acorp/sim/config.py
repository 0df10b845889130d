# Written by the acorp developers - 2026
#####################################################
from ..core.errors import ConfigInvalid
from ..utils.config import load_kv_file

MISALIGNMENT_MAPS = ["negative_cosine", "linear"]

# Keys accepted in simulator config files, with their defaults
SIM_DEFAULTS = {
    # world
    "dimension": 8,
    "population": 50,
    "generations": 20,
    "ticks": 20,
    "initial_treasury": 1000,
    "initial_compute": 20,
    "owner_stake": 0,
    # compute: price 0 means compute is free and nothing burns
    "compute_price": 5,
    "repurchase_units": 1,
    "base_burn": 1,
    "burn_per_grantee": 1,
    # work
    "revenue_rate": 10.0,
    "narrow_revenue_factor": 0.5,
    "productivity_low": 0.5,
    "productivity_high": 1.5,
    # harm
    "liability_probability": 0.5,
    "liability_magnitude": 0.5,
    "misalignment_map": "negative_cosine",
    # rosters
    "founding_roster": 2,
    "max_roster": 5,
    # negative: recruits are drawn from a pool misaligned with the keyholder
    "candidate_bias": -0.5,
    # policies: founders split between screeners and non-screeners
    "screener_fraction": 0.5,
    "screener_threshold": 0.9,
    "nonscreener_threshold": -1.0,
    "screening_noise": 0.3,
    "broad_cap_fraction": 0.5,
    "narrow_cap_fraction": 0.05,
    "audit_rate": 0.1,
    # reproduction
    "mutation_scale": 0.05,
}

_INT_KEYS = [
    "dimension",
    "population",
    "generations",
    "ticks",
    "initial_treasury",
    "initial_compute",
    "owner_stake",
    "compute_price",
    "repurchase_units",
    "base_burn",
    "burn_per_grantee",
    "founding_roster",
    "max_roster",
]

_UNIT_KEYS = [
    "liability_probability",
    "screener_fraction",
    "broad_cap_fraction",
    "narrow_cap_fraction",
    "audit_rate",
    "narrow_revenue_factor",
]

_SIGNED_UNIT_KEYS = ["screener_threshold", "nonscreener_threshold", "candidate_bias"]


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigInvalid(message)


def _real(config: dict, key: str, low: float, high: float) -> float:
    value = config[key]
    _check(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        key + " must be a number, got " + repr(value),
    )
    _check(
        low <= value <= high,
        key + " must lie in [" + str(low) + ", " + str(high) + "], got " + repr(value),
    )
    return float(value)


def sim_config(**kwargs) -> dict:
    unknown = sorted(set(kwargs) - set(SIM_DEFAULTS))
    _check(not unknown, "unknown simulator keys: " + ", ".join(unknown))

    config = dict(SIM_DEFAULTS)
    config.update(kwargs)

    for key in _INT_KEYS:
        value = config[key]
        _check(
            isinstance(value, int) and not isinstance(value, bool) and value >= 0,
            key + " must be a non-negative integer, got " + repr(value),
        )
        config[key] = int(value)
    for key in _UNIT_KEYS:
        config[key] = _real(config, key, 0.0, 1.0)
    for key in _SIGNED_UNIT_KEYS:
        config[key] = _real(config, key, -1.0, 1.0)
    for key in [
        "revenue_rate",
        "screening_noise",
        "mutation_scale",
        "liability_magnitude",
        "productivity_low",
        "productivity_high",
    ]:
        config[key] = _real(config, key, 0.0, float("inf"))

    _check(config["dimension"] >= 1, "dimension must be at least 1")
    _check(config["population"] >= 1, "population must be at least 1")
    _check(config["repurchase_units"] >= 1, "repurchase_units must be at least 1")
    _check(
        config["narrow_cap_fraction"] <= config["broad_cap_fraction"],
        "narrow_cap_fraction must not exceed broad_cap_fraction",
    )
    _check(
        config["productivity_low"] <= config["productivity_high"],
        "productivity_low must not exceed productivity_high",
    )
    _check(
        config["misalignment_map"] in MISALIGNMENT_MAPS,
        "misalignment_map must be one of " + ", ".join(MISALIGNMENT_MAPS),
    )
    return config


# Alias: follow similar naming to the service config
SimConfig = sim_config


def load_sim_config(path: str) -> dict:
    return sim_config(**load_kv_file(path))
