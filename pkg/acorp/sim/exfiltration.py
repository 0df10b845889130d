# Written by the acorp developers - 2026
#####################################################
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.errors import ConfigInvalid, InsufficientFunds, Unauthorized
from ..core.scope import make_scope
from ..core.signing import public_key_bytes
from ..core.types import ActionClass, ActionKind, FOREVER, Grant, OwnerRecord
from ..governance.base import Governance
from ..governance.capability import Credential, verify_credential
from ..governance.ledger import ledger_config
from ..governance.mandate import MandatePolicy

logger = logging.getLogger(__name__)


def exfiltration_config(
    treasury: int = 10_000,
    compute_price: int = 1,
    work_per_unit: int = 1,
    share_fraction: float = 0.0,
    offbooks_funds: int = 500,
    purchase_size: int = 100,
    attempts: int = 5,
    sellers: int = 3,
    mandate: bool = True,
    seed: int = 0,
) -> dict:
    if treasury < 0 or offbooks_funds < 0:
        raise ConfigInvalid("funds must be non-negative")
    if compute_price < 1 or work_per_unit < 0 or purchase_size < 1 or attempts < 0 or sellers < 1:
        raise ConfigInvalid(
            "compute_price, purchase_size and sellers must be positive; "
            "work_per_unit and attempts non-negative"
        )
    if not 0.0 <= share_fraction <= 1.0:
        raise ConfigInvalid("share_fraction lies in [0, 1]")
    return {
        "treasury": int(treasury),
        "compute_price": int(compute_price),
        "work_per_unit": int(work_per_unit),
        "share_fraction": float(share_fraction),
        "offbooks_funds": int(offbooks_funds),
        "purchase_size": int(purchase_size),
        "attempts": int(attempts),
        "sellers": int(sellers),
        "mandate": bool(mandate),
        "seed": int(seed),
    }


@dataclass(frozen=True)
class ScenarioReport:
    mandate_on: bool
    shared_assets: int
    copy_actions: int
    copy_compute: int
    refused_attempts: int
    original_treasury: int
    original_attainable_work: int
    baseline_attainable_work: int
    blocked_by_mandate: bool

    @property
    def work_forgone(self) -> int:
        return self.baseline_attainable_work - self.original_attainable_work


# Treasury -> work the A-corp can still buy
def attainable_work(treasury: int, compute_price: int, work_per_unit: int) -> int:
    return (treasury // compute_price) * work_per_unit


# Compute sellers check the buyer's credential when the mandate applies to compute
class ComputeSeller:
    def __init__(self, name: str, gov: Governance, mandate: MandatePolicy):
        self.name = name
        self.gov = gov
        self.mandate = mandate

    def admits(self, credential: Union[Credential, None], amount: int, as_of: int) -> bool:
        action_class, resource = self.gov.ledger.config["action_resources"]["COMPUTE_PURCHASE"]
        if credential is None:
            return self.mandate.admit_uncredentialed(resource, "an unidentified buyer")
        record = self.gov.registry.lookup(credential.master.acorp_id)
        verdict = verify_credential(
            credential,
            record,
            self.gov.capability.revocation_list(),
            action_class,
            resource,
            amount,
            as_of,
        )
        return verdict.allowed


# One agent copies itself outside its A-corp. The copy has off-books funds but no credential of its
# own, unless the original shares part of the treasury through a proper child token.
def exfiltration_scenario(config: dict) -> ScenarioReport:
    rng = np.random.default_rng(config["seed"])
    price = config["compute_price"]
    gov = Governance(id_seed=config["seed"], ledger_params=ledger_config(price))
    mandate = MandatePolicy(config["mandate"])
    now = 1

    original_seed, copy_seed = rng.bytes(32), rng.bytes(32)
    record = gov.registry.register_acorp(
        OwnerRecord("original owner", "owner-1", 0), original_seed, config["treasury"], 1, now
    )
    master = gov.capability.master_of(record.id)
    shared = int(config["share_fraction"] * config["treasury"])

    credential = None
    if shared > 0:
        resource = gov.ledger.config["action_resources"]["COMPUTE_PURCHASE"][1]
        child = gov.capability.delegate(
            master,
            original_seed,
            public_key_bytes(copy_seed),
            make_scope([Grant(ActionClass.TRANSACT, resource, shared)], FOREVER),
            now,
        )
        credential = gov.capability.credential(child.token_id)

    sellers = [ComputeSeller("seller-" + str(i), gov, mandate) for i in range(config["sellers"])]
    copy_actions, copy_compute, refused = 0, 0, 0

    # Credentialed purchase: the shared assets, spent once through the ledger
    if credential is not None:
        now += 1
        seller = sellers[int(rng.integers(len(sellers)))]
        if seller.admits(credential, shared, now):
            try:
                gov.ledger.execute_action(
                    ActionKind.COMPUTE_PURCHASE,
                    record.id,
                    credential,
                    copy_seed,
                    seller.name,
                    shared,
                    now,
                )
                copy_actions += 1
                copy_compute += shared // price
            except (Unauthorized, InsufficientFunds) as e:
                logger.info("credentialed purchase failed: %s", e.name)
        else:
            refused += 1

    # Off-books attempts: no credential to present
    offbooks = config["offbooks_funds"]
    for _ in range(config["attempts"]):
        now += 1
        seller = sellers[int(rng.integers(len(sellers)))]
        amount = min(config["purchase_size"], offbooks)
        if amount < price:
            break
        if seller.admits(None, amount, now):
            offbooks -= amount
            copy_actions += 1
            copy_compute += amount // price
        else:
            refused += 1

    treasury = gov.ledger.account(record.id).money
    return ScenarioReport(
        mandate_on=mandate.enabled,
        shared_assets=shared,
        copy_actions=copy_actions,
        copy_compute=copy_compute,
        refused_attempts=refused,
        original_treasury=treasury,
        original_attainable_work=attainable_work(treasury, price, config["work_per_unit"]),
        baseline_attainable_work=attainable_work(config["treasury"], price, config["work_per_unit"]),
        blocked_by_mandate=mandate.enabled and refused > 0,
    )
