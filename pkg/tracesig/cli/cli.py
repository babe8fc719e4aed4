#!/usr/bin/env python3
"""
Command-line interface for tracesig.
Parameter setup, key ceremonies, the file-based join exchange, signing,
verification, opening, revealing, tracing, claiming and a demo run.

Exit codes: 0 success, 1 cryptographic rejection, 2 usage/IO/integrity error.
"""

import argparse
import logging
import os
import sys
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv

from ..main import TraceSig

logger = logging.getLogger("tracesig_cli")

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_ERROR = 2


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else os.environ.get("TRACESIG_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', force=True)


def _read_message(path: str) -> bytes:
    with open(os.path.expanduser(path), "rb") as f:
        return f.read()


def _fail(message: str, payload) -> int:
    print(message, file=sys.stderr)
    if isinstance(payload, dict) and payload.get("rejected"):
        return EXIT_REJECTED
    return EXIT_ERROR


def cmd_setup(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, pp = app.setup(lambda_desk=args.lambda_desk, group_size=args.group_size, preset_name=args.preset)
    if not ok:
        return _fail(message, pp)
    print(f"N={pp.N} n={pp.n} q={pp.q} q'={pp.q_prime} kappa={pp.kappa}")
    return EXIT_OK


def cmd_keygen(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, payload = app.keygen()
    if not ok:
        return _fail(message, payload)
    print(f"keystore={app.keystore.root}")
    return EXIT_OK


def cmd_join_request(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, payload = app.join_request(args.name, args.out)
    if not ok:
        return _fail(message, payload)
    print(f"request={args.out}")
    return EXIT_OK


def cmd_join_approve(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, ident = app.join_approve(args.request, args.out)
    if not ok:
        return _fail(message, ident)
    print(f"id={ident}")
    return EXIT_OK


def cmd_join_finish(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, ident = app.join_finish(args.name, args.response)
    if not ok:
        return _fail(message, ident)
    print(f"id={ident}")
    return EXIT_OK


def cmd_sign(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, payload = app.sign(args.signer, _read_message(args.msg), args.out)
    if not ok:
        return _fail(message, payload)
    print(f"signature={args.out}")
    return EXIT_OK


def cmd_verify(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, valid = app.verify(_read_message(args.msg), args.sig)
    if not ok:
        return _fail(message, valid)
    print(f"valid={'true' if valid else 'false'}")
    return EXIT_OK if valid else EXIT_REJECTED


def cmd_open(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, ident = app.open(_read_message(args.msg), args.sig)
    if not ok:
        return _fail(message, ident)
    if ident is None:
        print("id=none")
        return EXIT_REJECTED
    print(f"id={ident}")
    return EXIT_OK


def cmd_audit(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, result = app.audit(_read_message(args.msg), args.sig)
    if not ok:
        return _fail(message, result)
    if result.ident is None:
        print("id=none")
        return EXIT_REJECTED
    print(f"id={result.ident} registered={'true' if result.registered else 'false'}")
    return EXIT_OK if result.registered else EXIT_REJECTED


def cmd_reveal(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, trapdoor = app.reveal(args.id, args.out)
    if not ok:
        return _fail(message, trapdoor)
    if trapdoor is None:
        print("trapdoor=none")
        return EXIT_REJECTED
    print(f"trapdoor={args.out}")
    return EXIT_OK


def cmd_trace(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, matched = app.trace(args.trapdoor, args.sig)
    if not ok:
        return _fail(message, matched)
    print(f"trace={'match' if matched else 'no match'}")
    return EXIT_OK if matched else EXIT_REJECTED


def cmd_claim(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, proof = app.claim(args.signer, _read_message(args.msg), args.sig, args.out)
    if not ok:
        return _fail(message, proof)
    if proof is None:
        print("claim=none")
        return EXIT_REJECTED
    print(f"claim={args.out}")
    return EXIT_OK


def cmd_claim_verify(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, valid = app.claim_verify(_read_message(args.msg), args.sig, args.claim)
    if not ok:
        return _fail(message, valid)
    print(f"claim={'valid' if valid else 'invalid'}")
    return EXIT_OK if valid else EXIT_REJECTED


def cmd_report(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, payload = app.report()
    if not ok:
        return _fail(message, payload)
    print(payload["constraints"].format())
    print()
    for key, value in payload["sizes"].items():
        print(f"{key}: {value}")
    for row in payload["artifacts"]:
        print(f"artifact {row['file']}: {row['magic']} v{row['version']} "
              f"{row['payload_bytes']} bytes ({row['role']})")
    return EXIT_OK if payload["constraints"].passed else EXIT_REJECTED


def cmd_demo(app: TraceSig, args: argparse.Namespace) -> int:
    ok, message, steps = app.demo(members=args.members)
    if steps is None or isinstance(steps, dict):
        return _fail(message, steps)
    for step in steps:
        status = "ok" if step.ok else "FAILED"
        print(f"{step.op}{tuple(step.args) if step.args else ''}: {status}")
    print(message)
    return EXIT_OK if ok else EXIT_REJECTED


COMMANDS: Dict[str, Callable[[TraceSig, argparse.Namespace], int]] = {
    "setup": cmd_setup,
    "keygen": cmd_keygen,
    "join-request": cmd_join_request,
    "join-approve": cmd_join_approve,
    "join-finish": cmd_join_finish,
    "sign": cmd_sign,
    "verify": cmd_verify,
    "open": cmd_open,
    "audit": cmd_audit,
    "reveal": cmd_reveal,
    "trace": cmd_trace,
    "claim": cmd_claim,
    "claim-verify": cmd_claim_verify,
    "report": cmd_report,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracesig", description="Traceable lattice group signatures")
    parser.add_argument("--keystore", help="Keystore directory (default: $TRACESIG_KEYSTORE or ~/.tracesig)")
    parser.add_argument("--seed", type=int, help="Seed for reproducible runs")
    parser.add_argument("--config", help="Path to a json/yaml/toml config file")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    # Parameters and keys
    setup_parser = subparsers.add_parser("setup", help="Derive and store parameters")
    setup_parser.add_argument("--lambda", dest="lambda_desk", type=int, help="Desk security parameter")
    setup_parser.add_argument("--group-size", type=int, help="Maximum group size N = 2^ell - 1")
    setup_parser.add_argument("--preset", choices=["desk", "toy"], help="Start from a named preset")
    subparsers.add_parser("keygen", help="Generate group keys and an empty registry")

    # Join exchange
    request_parser = subparsers.add_parser("join-request", help="User: create a join request")
    request_parser.add_argument("--name", required=True, help="Local name for the pending join")
    request_parser.add_argument("--out", required=True, help="Request file to write")
    approve_parser = subparsers.add_parser("join-approve", help="Group manager: certify a join request")
    approve_parser.add_argument("--request", required=True, help="Request file")
    approve_parser.add_argument("--out", required=True, help="Response file to write")
    finish_parser = subparsers.add_parser("join-finish", help="User: check the certificate and store member keys")
    finish_parser.add_argument("--name", required=True, help="Name given at join-request")
    finish_parser.add_argument("--response", required=True, help="Response file")

    # Signatures
    sign_parser = subparsers.add_parser("sign", help="Sign a message as a member")
    sign_parser.add_argument("--as", dest="signer", type=int, required=True, help="Member id")
    sign_parser.add_argument("--msg", required=True, help="Message file")
    sign_parser.add_argument("--out", required=True, help="Signature file to write")
    for name, help_text in (("verify", "Verify a group signature"),
                            ("open", "Open a signature to its signer id"),
                            ("audit", "Open a signature and check the id against the registry")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--msg", required=True, help="Message file")
        sub.add_argument("--sig", required=True, help="Signature file")

    # Tracing and claiming
    reveal_parser = subparsers.add_parser("reveal", help="Reveal a member's tracing trapdoor")
    reveal_parser.add_argument("--id", type=int, required=True, help="Member id")
    reveal_parser.add_argument("--out", required=True, help="Trapdoor file to write")
    trace_parser = subparsers.add_parser("trace", help="Test a signature against a tracing trapdoor")
    trace_parser.add_argument("--trapdoor", required=True, help="Trapdoor file")
    trace_parser.add_argument("--sig", required=True, help="Signature file")
    claim_parser = subparsers.add_parser("claim", help="Prove authorship of a signature")
    claim_parser.add_argument("--as", dest="signer", type=int, required=True, help="Member id")
    claim_parser.add_argument("--msg", required=True, help="Message file")
    claim_parser.add_argument("--sig", required=True, help="Signature file")
    claim_parser.add_argument("--out", required=True, help="Claim file to write")
    claim_verify_parser = subparsers.add_parser("claim-verify", help="Verify an authorship claim")
    claim_verify_parser.add_argument("--msg", required=True, help="Message file")
    claim_verify_parser.add_argument("--sig", required=True, help="Signature file")
    claim_verify_parser.add_argument("--claim", required=True, help="Claim file")

    # Tools
    subparsers.add_parser("report", help="Print parameter constraints and size accounting")
    demo_parser = subparsers.add_parser("demo", help="End-to-end scenario with honest members")
    demo_parser.add_argument("--members", type=int, default=3, help="Number of members")

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one command and return its exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR

    if not args.command:
        parser.print_help()
        return EXIT_ERROR

    _configure_logging(args.verbose)
    try:
        app = TraceSig(keystore=args.keystore, config_path=args.config, seed=args.seed)
        return COMMANDS[args.command](app, args)
    except OSError as e:
        print(f"{args.command} failed: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.debug("Unhandled error", exc_info=True)
        print(f"{args.command} failed: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    """Main entry point for the CLI."""
    sys.exit(run())


if __name__ == "__main__":
    main()
