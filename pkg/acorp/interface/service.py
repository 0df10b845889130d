# Written by the acorp developers - 2026
#####################################################
import logging
import os
import socket
from typing import Union

import uvicorn
from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..core.errors import (
    AcorpError,
    BadSignature,
    BindFailure,
    ConfigInvalid,
    EncodingUnsupported,
    MalformedKey,
    NotFound,
    StorageFailure,
    Unauthorized,
    UnknownAction,
    UnknownToken,
)
from ..governance.base import Governance
from ..governance.capability import FailureReason, denied, verify_credential
from ..governance.ledger import CORPORATE_KINDS
from ..governance.mandate import MandatePolicy
from ..governance.registry import TransferPayload
from .config import parse_listen_address, service_clock, service_ledger, service_mandate
from .messages import (
    ActionRequest,
    BurnRequest,
    ConfiscateRequest,
    DelegateRequest,
    PayoutRequest,
    RegistrationRequest,
    RevokeRequest,
    StatusRequest,
    UncredentialedDealing,
    VerifyRequest,
    unwrap,
    unwrap_signature,
    wrap,
)

logger = logging.getLogger(__name__)

# Error class -> HTTP status. Looked up along the MRO so subclasses inherit their parent's code.
ERROR_STATUS = {
    NotFound: status.HTTP_404_NOT_FOUND,
    UnknownToken: status.HTTP_404_NOT_FOUND,
    UnknownAction: status.HTTP_404_NOT_FOUND,
    BadSignature: status.HTTP_403_FORBIDDEN,
    Unauthorized: status.HTTP_403_FORBIDDEN,
    EncodingUnsupported: status.HTTP_400_BAD_REQUEST,
    MalformedKey: status.HTTP_400_BAD_REQUEST,
    ConfigInvalid: status.HTTP_400_BAD_REQUEST,
    StorageFailure: status.HTTP_500_INTERNAL_SERVER_ERROR,
}


def error_status(error: AcorpError) -> int:
    for cls in type(error).__mro__:
        if cls in ERROR_STATUS:
            return ERROR_STATUS[cls]
    # Everything else is a conflict with the current governance state
    return status.HTTP_409_CONFLICT


def error_body(error: AcorpError) -> dict:
    body = {"error": error.name, "detail": str(error)}
    verdict = getattr(error, "verdict", None)
    if verdict is not None:
        body["verdict"] = verdict.label
    return body


class Envelope(BaseModel):
    payload: str
    signature: Union[str, None] = None


def _fields(body: Envelope) -> dict:
    return {"payload": body.payload, "signature": body.signature}


def _hex(value: str, what: str) -> bytes:
    try:
        return bytes.fromhex(value)
    except ValueError as e:
        raise EncodingUnsupported(what + " must be hex") from e


def create_app(gov: Governance, mandate: Union[MandatePolicy, None] = None) -> FastAPI:
    mandate = mandate if mandate is not None else MandatePolicy()
    app = FastAPI(title="acorp", description="A-corp registry, verification and audit service")
    app.state.gov = gov
    app.state.mandate = mandate

    @app.exception_handler(AcorpError)
    async def _acorp_error(request: Request, error: AcorpError) -> JSONResponse:
        code = error_status(error)
        if code >= 500:
            logger.error("%s %s: %s", request.method, request.url.path, error)
        return JSONResponse(status_code=code, content=error_body(error))

    @app.exception_handler(RequestValidationError)
    async def _bad_envelope(request: Request, error: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=status.HTTP_400_BAD_REQUEST,
            content={
                "error": "EncodingUnsupported",
                "detail": "body is not a {payload, signature?} envelope",
            },
        )

    # Registry
    ################################################
    @app.post("/acorps")
    def register(body: Envelope) -> dict:
        req = unwrap(_fields(body), RegistrationRequest)
        record = gov.registry.register_acorp(
            req.owner, req.master_seed, req.initial_capital, req.initial_compute, req.as_of
        )
        return wrap(record)

    @app.get("/acorps/{acorp_id}")
    def lookup(acorp_id: str) -> dict:
        return wrap(gov.registry.lookup(acorp_id))

    @app.get("/acorps/{acorp_id}/account")
    def account(acorp_id: str) -> dict:
        return wrap(gov.ledger.account(acorp_id))

    @app.post("/acorps/{acorp_id}/transfer")
    def transfer(acorp_id: str, body: Envelope) -> dict:
        payload = unwrap(_fields(body), TransferPayload)
        signature = unwrap_signature(_fields(body))
        if signature is None:
            raise BadSignature("transfer needs the master key signature")
        if payload.acorp_id.value != acorp_id:
            raise BadSignature("payload names another A-corp")
        record = gov.registry.record_ownership_transfer(
            payload.acorp_id, payload.new_owner, signature, payload.as_of
        )
        return wrap(record)

    @app.post("/acorps/{acorp_id}/status")
    def set_status(acorp_id: str, body: Envelope) -> dict:
        req = unwrap(_fields(body), StatusRequest)
        return wrap(gov.registry.set_status(acorp_id, req.new_status, req.legal_order, req.as_of))

    @app.post("/acorps/{acorp_id}/burn")
    def burn(acorp_id: str, body: Envelope) -> dict:
        req = unwrap(_fields(body), BurnRequest)
        return wrap(gov.ledger.burn_compute(acorp_id, req.units, req.as_of))

    @app.get("/acorps/{acorp_id}/tree")
    def tree(acorp_id: str) -> dict:
        return wrap(gov.capability.delegation_tree(acorp_id))

    # Capabilities
    ################################################
    @app.post("/tokens/delegate")
    def delegate(body: Envelope) -> dict:
        req = unwrap(_fields(body), DelegateRequest)
        parent = gov.capability.get(req.parent_token_id)
        child = gov.capability.delegate(
            parent, req.issuer_seed, req.holder_public_key, req.scope, req.as_of
        )
        return wrap(gov.capability.credential(child.token_id))

    @app.post("/tokens/revoke")
    def revoke(body: Envelope) -> dict:
        req = unwrap(_fields(body), RevokeRequest)
        revoker = gov.capability.get(req.revoker_token_id)
        record = gov.capability.revoke(
            req.target_token_id, revoker, req.revoker_seed, req.as_of, req.reason
        )
        return wrap(record)

    # Same offline check the CLI runs, fed with the registry record and the live revocation list
    @app.post("/verify")
    def verify(body: Envelope) -> dict:
        req = unwrap(_fields(body), VerifyRequest)
        master = req.credential.master
        if not gov.registry.exists(master.acorp_id):
            return wrap(denied(FailureReason.UnknownToken))
        verdict = verify_credential(
            req.credential,
            gov.registry.lookup(master.acorp_id),
            gov.capability.revocation_list(),
            req.action_class,
            req.resource_class,
            req.amount,
            req.as_of,
            req.market_tag,
        )
        return wrap(verdict)

    @app.get("/revocations")
    def revocations() -> dict:
        return wrap(gov.capability.revocation_list())

    # Ledger
    ################################################
    @app.post("/actions")
    def act(body: Envelope):
        req = unwrap(_fields(body), ActionRequest)
        if req.kind not in CORPORATE_KINDS:
            raise EncodingUnsupported(req.kind.name + " is not a corporate action kind")
        if req.credential is None:
            return _uncredentialed(req)
        if req.holder_seed is None:
            raise MalformedKey("a credentialed action needs the holder seed")
        action = gov.ledger.execute_action(
            req.kind,
            req.acorp_id,
            req.credential,
            req.holder_seed,
            req.counterparty,
            req.amount,
            req.as_of,
            req.market_tag,
        )
        return wrap(action)

    # Mandate on: refused. Mandate off: tolerated, logged, and kept off the books.
    def _uncredentialed(req: ActionRequest) -> JSONResponse:
        _, resource_class = gov.ledger.config["action_resources"][req.kind.name]
        party = "A-corp " + str(req.acorp_id)
        if not mandate.admit_uncredentialed(resource_class, party):
            raise Unauthorized(
                "verification mandate: " + req.counterparty + " must check a credential",
            )
        dealing = UncredentialedDealing(
            req.acorp_id,
            req.kind,
            req.counterparty,
            req.amount,
            req.as_of,
            "willful blindness on " + resource_class,
        )
        return JSONResponse(status_code=status.HTTP_202_ACCEPTED, content=wrap(dealing))

    @app.post("/sanctions/confiscate")
    def confiscate(body: Envelope) -> dict:
        req = unwrap(_fields(body), ConfiscateRequest)
        return wrap(gov.ledger.confiscate(req.acorp_id, req.amount, req.legal_order, req.as_of))

    @app.post("/sanctions/payout")
    def payout(body: Envelope) -> dict:
        req = unwrap(_fields(body), PayoutRequest)
        return wrap(gov.ledger.liability_payout(req.acorp_id, req.claim, req.as_of, req.claimant))

    # Audit
    ################################################
    @app.get("/audit/trace/{action_id}")
    def trace(action_id: str) -> dict:
        return wrap(gov.audit.trace(_hex(action_id, "action_id")))

    @app.get("/audit/actions")
    def actions(acorp_id: str, start: int = 0, end: Union[int, None] = None) -> dict:
        end = gov.now() if end is None else end
        return wrap(tuple(gov.audit.list_actions(acorp_id, start, end)))

    @app.get("/audit/integrity")
    def integrity() -> dict:
        return wrap(gov.audit.verify_log_integrity())

    return app


def open_governance(config: dict) -> Governance:
    data_dir = config["data_dir"]
    try:
        os.makedirs(data_dir, exist_ok=True)
    except OSError as e:
        raise ConfigInvalid("cannot create data_dir " + repr(data_dir) + ": " + str(e)) from e
    if not os.access(data_dir, os.W_OK):
        raise ConfigInvalid("data_dir " + repr(data_dir) + " is not writable")
    return Governance.open(
        data_dir,
        id_seed=config["id_seed"],
        ledger_params=service_ledger(config),
        clock=service_clock(config),
        durable=config["durable"],
    )


# Binds first so a busy port surfaces as BindFailure instead of a uvicorn exit
def serve(config: dict) -> None:
    host, port = parse_listen_address(config["listen_address"])
    gov = open_governance(config)
    try:
        sock = socket.socket(socket.AF_INET6 if ":" in host else socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((host, port))
    except OSError as e:
        gov.close()
        raise BindFailure("cannot bind " + config["listen_address"] + ": " + str(e)) from e

    app = create_app(gov, service_mandate(config))
    logger.info(
        "serving %s from %s (log at seq %d)",
        config["listen_address"],
        config["data_dir"],
        gov.audit.last_seq,
    )
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    try:
        server.run(sockets=[sock])
    finally:
        sock.close()
        gov.close()
