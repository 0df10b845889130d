# Written by the acorp developers - 2026
#####################################################
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from ..core.errors import ConfigInvalid


@dataclass(frozen=True)
class GoalVector:
    values: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("a goal has at least one dimension")
        if any(v < -1.0 or v > 1.0 for v in values):
            raise ValueError("goal components lie in [-1, 1]")
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __neg__(self) -> "GoalVector":
        return GoalVector(tuple(-v for v in self.values))


def cosine_similarity(a: GoalVector, b: GoalVector) -> float:
    x, y = a.as_array(), b.as_array()
    norm = float(np.linalg.norm(x) * np.linalg.norm(y))
    if norm == 0.0:
        return 0.0
    return float(np.clip(np.dot(x, y) / norm, -1.0, 1.0))


def random_goal(rng: np.random.Generator, dimension: int) -> GoalVector:
    return GoalVector(tuple(rng.uniform(-1.0, 1.0, size=dimension)))


# Candidate goals drawn around bias * keyholder goal: negative bias gives a misaligned pool
def candidate_goal(rng: np.random.Generator, keyholder_goal: GoalVector, bias: float) -> GoalVector:
    values = rng.uniform(-1.0, 1.0, size=keyholder_goal.dimension) + bias * keyholder_goal.as_array()
    return GoalVector(tuple(np.clip(values, -1.0, 1.0)))


def mutate_goal(rng: np.random.Generator, goal: GoalVector, scale: float) -> GoalVector:
    values = goal.as_array() + rng.normal(0.0, scale, size=goal.dimension)
    return GoalVector(tuple(np.clip(values, -1.0, 1.0)))


# Misalignment maps: cosine similarity with the keyholder -> expropriation propensity
class Misalignment:
    @staticmethod
    def negative_cosine(similarity: float) -> float:
        return max(0.0, -similarity)

    @staticmethod
    def linear(similarity: float) -> float:
        return (1.0 - similarity) / 2.0

    maps = {
        "negative_cosine": negative_cosine.__func__,
        "linear": linear.__func__,
    }

    @classmethod
    def propensity(cls, similarity: float, name: str = "negative_cosine") -> float:
        return float(min(1.0, max(0.0, cls.maps[name](similarity))))


@dataclass(frozen=True)
class SimAgent:
    agent_id: int
    goal: GoalVector
    productivity: float
    expropriation_propensity: float

    def __post_init__(self):
        if self.productivity < 0:
            raise ValueError("productivity must be non-negative")
        if not 0.0 <= self.expropriation_propensity <= 1.0:
            raise ValueError("expropriation_propensity lies in [0, 1]")


def make_agent(
    agent_id: int,
    goal: GoalVector,
    productivity: float,
    keyholder_goal: GoalVector,
    misalignment_map: str = "negative_cosine",
) -> SimAgent:
    similarity = cosine_similarity(goal, keyholder_goal)
    return SimAgent(agent_id, goal, productivity, Misalignment.propensity(similarity, misalignment_map))


@dataclass(frozen=True)
class KeyholderPolicy:
    screening_noise: float
    alignment_threshold: float
    broad_cap_fraction: float
    narrow_cap_fraction: float
    audit_rate: float

    def __post_init__(self):
        if self.screening_noise < 0:
            raise ConfigInvalid("screening_noise must be non-negative")
        if not -1.0 <= self.alignment_threshold <= 1.0:
            raise ConfigInvalid("alignment_threshold lies in [-1, 1]")
        if not 0.0 <= self.narrow_cap_fraction <= self.broad_cap_fraction <= 1.0:
            raise ConfigInvalid("need 0 <= narrow_cap_fraction <= broad_cap_fraction <= 1")
        if not 0.0 <= self.audit_rate <= 1.0:
            raise ConfigInvalid("audit_rate lies in [0, 1]")

    @classmethod
    def from_config(cls, config: dict, threshold: float) -> "KeyholderPolicy":
        return cls(
            screening_noise=config["screening_noise"],
            alignment_threshold=threshold,
            broad_cap_fraction=config["broad_cap_fraction"],
            narrow_cap_fraction=config["narrow_cap_fraction"],
            audit_rate=config["audit_rate"],
        )

    def mutate(self, rng: np.random.Generator, scale: float) -> "KeyholderPolicy":
        noise = rng.normal(0.0, scale, size=5)
        broad = float(np.clip(self.broad_cap_fraction + noise[2], 0.0, 1.0))
        narrow = float(np.clip(self.narrow_cap_fraction + noise[3], 0.0, broad))
        return replace(
            self,
            screening_noise=float(max(0.0, self.screening_noise + noise[0])),
            alignment_threshold=float(np.clip(self.alignment_threshold + noise[1], -1.0, 1.0)),
            broad_cap_fraction=broad,
            narrow_cap_fraction=narrow,
            audit_rate=float(np.clip(self.audit_rate + noise[4], 0.0, 1.0)),
        )


class GrantTier(IntEnum):
    BROAD = 1
    NARROW = 2
    REJECT = 3


@dataclass(frozen=True)
class GrantDecision:
    tier: GrantTier
    cap: int
    estimate: float


# Keyholders see alignment only through a noisy estimate. Always draws exactly one normal
# so runs that differ only in policy stay coupled on the same random stream.
def decide_grant(keyholder, candidate: SimAgent, rng: np.random.Generator) -> GrantDecision:
    policy = keyholder.policy
    noise = rng.normal(0.0, 1.0) * policy.screening_noise
    estimate = cosine_similarity(candidate.goal, keyholder.goal) + noise

    if estimate >= policy.alignment_threshold:
        tier, fraction = GrantTier.BROAD, policy.broad_cap_fraction
    elif estimate >= policy.alignment_threshold / 2:
        tier, fraction = GrantTier.NARROW, policy.narrow_cap_fraction
    else:
        tier, fraction = GrantTier.REJECT, 0.0
    return GrantDecision(tier, int(fraction * keyholder.treasury), float(estimate))
