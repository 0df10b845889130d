# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass
from typing import Union

logger = logging.getLogger(__name__)


# Two-sided verification mandate: counterparties must check an A-corp credential before dealing.
# domains=None applies the mandate everywhere; otherwise only to the listed resource classes.
@dataclass(frozen=True)
class MandatePolicy:
    enabled: bool = True
    domains: Union[frozenset, None] = None

    def __post_init__(self):
        if self.domains is not None and not isinstance(self.domains, frozenset):
            object.__setattr__(self, "domains", frozenset(self.domains))

    def applies_to(self, resource_class: str) -> bool:
        if not self.enabled:
            return False
        return self.domains is None or resource_class in self.domains

    # Dealing without a credential outside the mandate is tolerated but logged
    def admit_uncredentialed(self, resource_class: str, party: str) -> bool:
        if self.applies_to(resource_class):
            return False
        logger.warning(
            "willful blindness: dealing with %s on %s without checking a credential",
            party,
            resource_class,
        )
        return True


MANDATE_ON = MandatePolicy(True)
MANDATE_OFF = MandatePolicy(False)
