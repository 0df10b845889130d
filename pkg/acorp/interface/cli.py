# Written by the acorp developers - 2026
#####################################################
import argparse
import logging
import os
import sys
from typing import Union

import numpy as np
from termcolor import colored

from .. import __version__
from ..core.encoding import canonical_decode, canonical_encode
from ..core.errors import AcorpError, EncodingUnsupported
from ..core.scope import make_scope, parse_action, parse_grant
from ..core.signing import generate_signing_key, public_key_bytes, seed_bytes
from ..core.types import FOREVER, PUBLIC_KEY_SIZE, AcorpStatus, ActionKind, OwnerRecord
from ..governance.audit import scan_log_file
from ..governance.base import LOG_FILE, Governance
from ..governance.capability import Credential, RevocationRecord, verify_credential
from ..governance.ledger import CORPORATE_KINDS, ledger_config
from ..governance.registry import AcorpRecord, sign_transfer
from ..sim.exfiltration import exfiltration_config, exfiltration_scenario
from ..sim.experiment import parse_seeds, run_experiment
from ..sim.implosion import expected_ticks_to_death, implosion_config, ticks_to_death
from ..utils.config import load_kv_file
from ..utils.logging import setup_logging
from .config import load_service_config, service_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(flag + ": " + message)
        self.flag = flag


# Argument types: argparse reports failures as usage errors naming the flag
################################################
def _grant(text: str):
    try:
        return parse_grant(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _action(text: str) -> tuple:
    try:
        return parse_action(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _hex_id(text: str) -> bytes:
    try:
        return bytes.fromhex(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError("expected hex, got " + repr(text)) from e


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError("expected an integer, got " + repr(text)) from e
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative, got " + text)
    return value


def _positive(text: str) -> int:
    value = _count(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1, got " + text)
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError("expected a number, got " + repr(text)) from e
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1], got " + text)
    return value


def _status(text: str) -> AcorpStatus:
    try:
        return AcorpStatus[text.upper()]
    except KeyError as e:
        raise argparse.ArgumentTypeError("unknown status " + repr(text)) from e


def _kind(text: str) -> ActionKind:
    kind = ActionKind.__members__.get(text.upper())
    if kind not in CORPORATE_KINDS:
        raise argparse.ArgumentTypeError("not a corporate action kind: " + repr(text))
    return kind


# Files
################################################
def read_file(path: str, flag: str) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise UsageError(flag, "cannot read " + repr(path) + ": " + e.strerror)


def write_file(path: str, data: bytes, flag: str) -> None:
    try:
        with open(path, "wb") as f:
            f.write(data)
    except OSError as e:
        raise UsageError(flag, "cannot write " + repr(path) + ": " + e.strerror)


def read_record(path: str, flag: str, expected: type):
    try:
        return canonical_decode(read_file(path, flag), expected)
    except EncodingUnsupported as e:
        raise UsageError(flag, str(e))


# A master file is either the raw 32-byte public key or a canonical registry record
def read_master(path: str, flag: str) -> Union[bytes, AcorpRecord]:
    data = read_file(path, flag)
    if len(data) == PUBLIC_KEY_SIZE:
        return data
    try:
        return canonical_decode(data, AcorpRecord)
    except EncodingUnsupported as e:
        raise UsageError(flag, "neither a raw public key nor a registry record: " + str(e))


def read_revocations(path: Union[str, None], flag: str) -> tuple:
    if path is None:
        return ()
    records = read_record(path, flag, tuple)
    if not all(isinstance(r, RevocationRecord) for r in records):
        raise UsageError(flag, "not a revocation list")
    return records


def open_gov(args) -> Governance:
    return Governance.open(
        args.data_dir, ledger_params=ledger_config(args.compute_price, args.repurchase_units)
    )


def show_verdict(verdict) -> int:
    print(colored(verdict.label, "green" if verdict.allowed else "red"))
    return EXIT_OK if verdict.allowed else EXIT_DOMAIN


# Commands: one per module operation. Each returns an exit code.
################################################
def cmd_keygen(args) -> int:
    key = generate_signing_key()
    write_file(args.out, seed_bytes(key), "--out")
    if args.public_out is not None:
        write_file(args.public_out, public_key_bytes(key), "--public-out")
    print(public_key_bytes(key).hex())
    return EXIT_OK


def cmd_register(args) -> int:
    seed = read_file(args.master_key, "--master-key")
    gov = open_gov(args)
    try:
        owner = OwnerRecord(args.owner_name, args.owner_id, args.stake)
        record = gov.registry.register_acorp(owner, seed, args.capital, args.compute, args.as_of)
        master = gov.capability.master_of(record.id)
    finally:
        gov.close()
    if args.out is not None:
        write_file(args.out, canonical_encode(record), "--out")
    print(record.id.value)
    print("master token " + master.token_id.hex())
    return EXIT_OK


def cmd_transfer(args) -> int:
    seed = read_file(args.master_key, "--master-key")
    gov = open_gov(args)
    try:
        acorp_id = gov.registry.lookup(args.acorp).id
        owner = OwnerRecord(args.owner_name, args.owner_id, args.stake)
        signature = sign_transfer(acorp_id, owner, args.as_of, seed)
        record = gov.registry.record_ownership_transfer(acorp_id, owner, signature, args.as_of)
    finally:
        gov.close()
    print(record.id.value + " owned by " + record.owner.owner_id)
    return EXIT_OK


def cmd_status(args) -> int:
    gov = open_gov(args)
    try:
        record = gov.registry.set_status(args.acorp, args.set, args.order, args.as_of)
    finally:
        gov.close()
    print(record.id.value + " " + record.status.name)
    return EXIT_OK


def cmd_lookup(args) -> int:
    gov = open_gov(args)
    try:
        record = gov.registry.lookup(args.acorp)
        account = gov.ledger.account(args.acorp)
    finally:
        gov.close()
    if args.out is not None:
        write_file(args.out, canonical_encode(record), "--out")
    print("id       " + record.id.value)
    print("status   " + record.status.name)
    print("owner    " + record.owner.owner_name + " (" + record.owner.owner_id + ")")
    print("master   " + record.master_public_key.hex())
    print("money    " + str(account.money))
    print("compute  " + str(account.compute_credits))
    return EXIT_OK


def cmd_delegate(args) -> int:
    issuer_seed = read_file(args.issuer_key, "--issuer-key")
    holder = read_file(args.holder, "--holder")
    gov = open_gov(args)
    try:
        parent = gov.capability.get(args.parent)
        scope = make_scope(args.grant, args.valid_until)
        child = gov.capability.delegate(parent, issuer_seed, holder, scope, args.as_of)
        credential = gov.capability.credential(child.token_id)
    finally:
        gov.close()
    if args.out is not None:
        write_file(args.out, canonical_encode(credential), "--out")
    print(child.token_id.hex())
    return EXIT_OK


def cmd_revoke(args) -> int:
    seed = read_file(args.revoker_key, "--revoker-key")
    gov = open_gov(args)
    try:
        revoker = gov.capability.get(args.revoker)
        record = gov.capability.revoke(args.target, revoker, seed, args.as_of, args.reason)
    finally:
        gov.close()
    print("revoked " + record.token_id.hex() + " at " + str(record.revoked_at))
    return EXIT_OK


def cmd_revocations(args) -> int:
    gov = open_gov(args)
    try:
        records = gov.capability.revocation_list()
    finally:
        gov.close()
    if args.out is not None:
        write_file(args.out, canonical_encode(records), "--out")
    for record in records:
        print(record.token_id.hex() + " " + str(record.revoked_at))
    return EXIT_OK


# Offline: reads only the credential, the master record and the revocation list
def cmd_verify(args) -> int:
    credential = read_record(args.credential, "--credential", Credential)
    master = read_master(args.master, "--master")
    revocations = read_revocations(args.revocations, "--revocations")
    action_class, resource_class, amount, market_tag = args.action
    verdict = verify_credential(
        credential,
        master,
        revocations,
        action_class,
        resource_class,
        amount,
        args.as_of,
        market_tag,
    )
    return show_verdict(verdict)


def cmd_act(args) -> int:
    seed = read_file(args.holder_key, "--holder-key")
    gov = open_gov(args)
    try:
        if args.credential is not None:
            credential = read_record(args.credential, "--credential", Credential)
        else:
            credential = gov.capability.credential(args.token)
        action = gov.ledger.execute_action(
            args.kind,
            args.acorp,
            credential,
            seed,
            args.counterparty,
            args.amount,
            args.as_of,
            args.market,
        )
    finally:
        gov.close()
    print(action.action_id.hex())
    return EXIT_OK


def cmd_confiscate(args) -> int:
    gov = open_gov(args)
    try:
        report = gov.ledger.confiscate(args.acorp, args.amount, args.order, args.as_of)
    finally:
        gov.close()
    print("collected " + str(report.collected) + ", shortfall " + str(report.shortfall))
    return EXIT_OK


def cmd_payout(args) -> int:
    gov = open_gov(args)
    try:
        report = gov.ledger.liability_payout(args.acorp, args.claim, args.as_of, args.claimant)
    finally:
        gov.close()
    print(
        "assets "
        + str(report.from_assets)
        + ", owner stake "
        + str(report.from_owner_stake)
        + ", unpaid "
        + str(report.unpaid)
    )
    return EXIT_OK


def cmd_trace(args) -> int:
    gov = open_gov(args)
    try:
        chain = gov.audit.trace(args.action)
    finally:
        gov.close()
    action = chain.action
    print("action   " + action.action_id.hex() + " " + action.kind.name + " " + str(action.amount))
    print("acorp    " + chain.acorp.id.value)
    for depth, token in enumerate(reversed(chain.tokens)):
        print("token    " + "  " * depth + token.token_id.hex())
    print("master   " + chain.acorp.master_public_key.hex())
    print("owner    " + chain.owner.owner_name + " (" + chain.owner.owner_id + ")")
    return EXIT_OK


# Reads the log file directly: a broken log would stop Governance.open
def cmd_integrity(args) -> int:
    path = os.path.join(args.data_dir, LOG_FILE)
    if not os.path.exists(path):
        print(colored("intact", "green") + " (0 entries)")
        return EXIT_OK
    _, report = scan_log_file(path)
    if report.intact:
        print(colored("intact", "green") + " (" + str(report.last_seq) + " entries)")
        return EXIT_OK
    print(colored("broken", "red") + " at seq " + str(report.first_break))
    return EXIT_DOMAIN


def cmd_simulate(args) -> int:
    seeds = parse_seeds(args.seeds)
    overrides = load_kv_file(args.config) if args.config is not None else {}

    if args.scenario == "exfiltration":
        text = _exfiltration_table(seeds, args.share_fraction)
    elif args.scenario == "implosion":
        text = _implosion_table(seeds, overrides, args.propensity)
    else:
        metrics = run_experiment(
            overrides, seeds, verbose=args.verbose, processes=args.processes
        )
        text = {
            "table": metrics.summary_table,
            "json": metrics.to_json_lines,
            "gnuplot": metrics.gnuplot_columns,
        }[args.format]()

    if args.out is not None:
        write_file(args.out, text.encode("utf-8"), "--out")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _exfiltration_table(seeds: list, share_fraction: float) -> str:
    row = "{:>6} {:>8} {:>8} {:>10} {:>10}"
    rows = [row.format("seed", "mandate", "actions", "refused", "forgone")]
    for seed in seeds:
        for mandate in (True, False):
            report = exfiltration_scenario(
                exfiltration_config(share_fraction=share_fraction, mandate=mandate, seed=seed)
            )
            rows.append(
                row.format(
                    seed,
                    "on" if mandate else "off",
                    report.copy_actions,
                    report.refused_attempts,
                    report.work_forgone,
                )
            )
    return "\n".join(rows) + "\n"


def _implosion_table(seeds: list, overrides: dict, propensity: float) -> str:
    config = implosion_config(**overrides)
    observed = [ticks_to_death(config, seed, propensity) for seed in seeds]
    return (
        "propensity      " + str(propensity) + "\n"
        + "mean ticks      " + "{:.4f}".format(float(np.mean(observed))) + "\n"
        + "expected ticks  " + "{:.4f}".format(expected_ticks_to_death(config, propensity)) + "\n"
    )


def cmd_serve(args) -> int:
    from .service import serve

    if args.config is not None:
        config = load_service_config(args.config)
    else:
        config = service_config(
            listen_address=args.listen,
            data_dir=args.data_dir,
            compute_price=args.compute_price,
            repurchase_units=args.repurchase_units,
            clock_mode=args.clock,
            mandate=not args.no_mandate,
            mandate_domains=args.mandate_domains,
        )
    serve(config)
    return EXIT_OK


# Parser
################################################
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="acorp", description="A-corp governance tools")
    parser.add_argument("--version", action="version", version="acorp " + __version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--data-dir", default="./acorp-data", help="directory holding the audit log")
    state.add_argument("--compute-price", type=_positive, default=1)
    state.add_argument("--repurchase-units", type=_positive, default=1)

    def command(name: str, func, help: str, stateful: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[state] if stateful else [], help=help)
        sub.set_defaults(func=func)
        return sub

    sub = command("keygen", cmd_keygen, "write a fresh Ed25519 seed", stateful=False)
    sub.add_argument("--out", required=True, help="32-byte seed file")
    sub.add_argument("--public-out", help="32-byte public key file")

    sub = command("register", cmd_register, "register an A-corp")
    sub.add_argument("--owner-name", required=True)
    sub.add_argument("--owner-id", required=True)
    sub.add_argument("--stake", type=_count, default=0)
    sub.add_argument("--master-key", required=True, help="master seed file")
    sub.add_argument("--capital", type=_count, default=0)
    sub.add_argument("--compute", type=_count, default=0)
    sub.add_argument("--as-of", type=_count, required=True)
    sub.add_argument("--out", help="write the canonical registry record here")

    sub = command("transfer", cmd_transfer, "record an ownership transfer")
    sub.add_argument("--acorp", required=True)
    sub.add_argument("--master-key", required=True)
    sub.add_argument("--owner-name", required=True)
    sub.add_argument("--owner-id", required=True)
    sub.add_argument("--stake", type=_count, default=0)
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("status", cmd_status, "change the legal status of an A-corp")
    sub.add_argument("--acorp", required=True)
    sub.add_argument("--set", type=_status, required=True, help="DISSOLVED, SEIZED or DEAD")
    sub.add_argument("--order", required=True, help="legal order reference")
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("lookup", cmd_lookup, "show a registry record")
    sub.add_argument("--acorp", required=True)
    sub.add_argument("--out", help="write the canonical record, usable as a --master file")

    sub = command("delegate", cmd_delegate, "issue a child token")
    sub.add_argument("--parent", type=_hex_id, required=True, help="parent token id (hex)")
    sub.add_argument("--issuer-key", required=True, help="seed of the parent holder")
    sub.add_argument("--holder", required=True, help="32-byte public key file of the new holder")
    sub.add_argument(
        "--grant", type=_grant, action="append", required=True, help="ACTION:resource[:cap[:market]]"
    )
    sub.add_argument("--valid-until", type=_count, default=FOREVER)
    sub.add_argument("--as-of", type=_count, required=True)
    sub.add_argument("--out", help="write the canonical credential here")

    sub = command("revoke", cmd_revoke, "revoke a token and its subtree")
    sub.add_argument("--target", type=_hex_id, required=True)
    sub.add_argument("--revoker", type=_hex_id, required=True, help="revoking token id (hex)")
    sub.add_argument("--revoker-key", required=True)
    sub.add_argument("--reason", default="")
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("revocations", cmd_revocations, "list revocations")
    sub.add_argument("--out", help="write the canonical revocation list here")

    sub = command("verify", cmd_verify, "verify a credential offline", stateful=False)
    sub.add_argument("--credential", required=True)
    sub.add_argument("--master", required=True, help="raw public key or registry record")
    sub.add_argument("--revocations", help="canonical revocation list")
    sub.add_argument(
        "--action", type=_action, required=True, help="ACTION:resource[:amount[:market]]"
    )
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("act", cmd_act, "execute a corporate action")
    sub.add_argument(
        "--kind", type=_kind, required=True, help="TRANSFER, CONTRACT or COMPUTE_PURCHASE"
    )
    sub.add_argument("--acorp", required=True)
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--credential", help="credential file")
    source.add_argument("--token", type=_hex_id, help="token id (hex)")
    sub.add_argument("--holder-key", required=True)
    sub.add_argument("--counterparty", required=True)
    sub.add_argument("--amount", type=_count, required=True)
    sub.add_argument("--market")
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("confiscate", cmd_confiscate, "confiscate A-corp money")
    sub.add_argument("--acorp", required=True)
    sub.add_argument("--amount", type=_count, required=True)
    sub.add_argument("--order", required=True)
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("payout", cmd_payout, "pay a liability claim")
    sub.add_argument("--acorp", required=True)
    sub.add_argument("--claim", type=_count, required=True)
    sub.add_argument("--claimant", default="claimant")
    sub.add_argument("--as-of", type=_count, required=True)

    sub = command("trace", cmd_trace, "trace an action to its owner")
    sub.add_argument("--action", type=_hex_id, required=True, help="action id (hex)")

    command("integrity", cmd_integrity, "check the audit log hash chain")

    sub = command("simulate", cmd_simulate, "run the selection simulator", stateful=False)
    sub.add_argument("--config", help="simulator key = value file")
    sub.add_argument("--seeds", required=True, help="1..10 or 1,4,9")
    sub.add_argument(
        "--scenario", choices=["selection", "exfiltration", "implosion"], default="selection"
    )
    sub.add_argument("--format", choices=["table", "json", "gnuplot"], default="table")
    sub.add_argument("--processes", type=_positive, default=1)
    sub.add_argument("--share-fraction", type=_fraction, default=0.0)
    sub.add_argument("--propensity", type=_fraction, default=0.5)
    sub.add_argument("--out")

    sub = command("serve", cmd_serve, "run the HTTP service")
    sub.add_argument("--config", help="service key = value file")
    sub.add_argument("--listen", default="127.0.0.1:8080")
    sub.add_argument("--clock", default="WALL", help="WALL or FIXED(timestamp)")
    sub.add_argument("--no-mandate", action="store_true")
    sub.add_argument("--mandate-domains", help="comma-separated resource classes")

    return parser


def main(argv: Union[list, None] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as e:
        print("acorp " + args.command + ": error: " + str(e), file=sys.stderr)
        return EXIT_USAGE
    except AcorpError as e:
        print(colored(e.name, "red") + ": " + str(e))
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
