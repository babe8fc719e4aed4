"""
Honest-party oracle harness.

Drives a group through scripted join/sign/reveal/claim/open steps with honest
members only and re-checks the correctness properties after every step.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from ..core.params import ParamSet
from ..core.samplers import RngHandle
from ..errors import UsageError
from .gpv_ibe import OpeningKey
from .hashsig import usersig_keygen
from .registry import Registry
from .traceable import (Certificate, ClaimProof, GroupManagerKey, GroupPublicKey, GroupSignature, TracingTrapdoor,
                        UserSecret, claim, claim_verify, join_gm_process, join_user_finalize, join_user_request,
                        keygen, open_signature, reveal, sign, trace, verify)

logger = logging.getLogger(__name__)


@dataclass
class Member:
    ident: int
    usk: UserSecret
    cert: Certificate
    trapdoor: Optional[TracingTrapdoor] = None


@dataclass
class SignedMessage:
    signer: int
    message: bytes
    signature: GroupSignature
    claim: Optional[ClaimProof] = None


@dataclass
class HarnessStep:
    op: str
    args: Tuple[Any, ...]
    result: Any
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


class HonestHarness:
    """
    A group with only honest parties.

    Args:
        pp: Parameter set.
        rng: Randomness for every party; a seeded handle makes a run reproducible.
    """

    def __init__(self, pp: ParamSet, rng: Optional[RngHandle] = None):
        self.pp = pp
        self.rng = rng or RngHandle()
        self.gpk: GroupPublicKey
        self.gsk: GroupManagerKey
        self.osk: OpeningKey
        self.registry: Registry
        self.gpk, self.gsk, self.osk, self.registry = keygen(pp, self.rng.spawn("keygen"))
        self.members: Dict[int, Member] = {}
        self.signed: List[SignedMessage] = []
        self._results: Dict[Tuple[str, int], bool] = {}

    def add_member(self) -> int:
        rng = self.rng.spawn("join")
        user_keys = usersig_keygen(rng)
        request, pending = join_user_request(self.gpk, user_keys, rng)
        response, self.registry = join_gm_process(self.gpk, self.gsk, self.registry, request, rng)
        ident, usk, cert = join_user_finalize(self.gpk, pending, response)
        self.members[ident] = Member(ident, usk, cert)
        return ident

    def _member(self, ident: int) -> Member:
        if ident not in self.members:
            raise UsageError(f"no honest member with id {ident}")
        return self.members[ident]

    def _signed(self, index: int) -> SignedMessage:
        if not 0 <= index < len(self.signed):
            raise UsageError(f"no signature with index {index}")
        return self.signed[index]

    def sign(self, ident: int, message: bytes) -> int:
        """Sign as member ident; returns the index of the stored signature."""
        member = self._member(ident)
        signature = sign(self.gpk, member.usk, member.cert, message, self.rng.spawn("sign"))
        self.signed.append(SignedMessage(ident, message, signature))
        return len(self.signed) - 1

    def reveal(self, ident: int) -> Optional[TracingTrapdoor]:
        trapdoor = reveal(self.gpk, self.osk, self.registry, ident, self.rng.spawn("reveal"))
        if trapdoor is not None and ident in self.members:
            self.members[ident].trapdoor = trapdoor
        return trapdoor

    def claim(self, index: int) -> Optional[ClaimProof]:
        entry = self._signed(index)
        member = self._member(entry.signer)
        proof = claim(self.gpk, member.usk, member.cert, entry.message, entry.signature, self.rng.spawn("claim"))
        entry.claim = proof
        return proof

    def open(self, index: int) -> Optional[int]:
        entry = self._signed(index)
        return open_signature(self.gpk, self.osk, entry.message, entry.signature)

    def _cached(self, key: Tuple[str, int], compute) -> bool:
        if key not in self._results:
            self._results[key] = bool(compute())
        return self._results[key]

    def check(self) -> Dict[str, bool]:
        """Sign/Open/Trace/Claim correctness and cross-trace rejection over everything seen so far."""
        gpk = self.gpk
        checks = {
            "sign": all(self._cached(("verify", i), lambda s=s: verify(gpk, s.message, s.signature))
                        for i, s in enumerate(self.signed)),
            "open": all(self._cached(("open", i),
                                     lambda s=s: open_signature(gpk, self.osk, s.message, s.signature) == s.signer)
                        for i, s in enumerate(self.signed)),
            "claim": all(self._cached(("claim", i),
                                      lambda s=s: claim_verify(gpk, s.message, s.signature, s.claim))
                         for i, s in enumerate(self.signed) if s.claim is not None),
        }
        traced = [m for m in self.members.values() if m.trapdoor is not None]
        checks["trace"] = all(trace(self.gpk, m.trapdoor, s.signature)
                              for m in traced for s in self.signed if s.signer == m.ident)
        checks["cross_trace"] = not any(trace(self.gpk, m.trapdoor, s.signature)
                                        for m in traced for s in self.signed if s.signer != m.ident)
        checks["reveal"] = all(m.trapdoor.x == self.gpk.F.matvec(m.usk.z) for m in traced)
        return checks

    def replay(self, script: Iterable[Sequence[Any]]) -> List[HarnessStep]:
        """
        Run (op, *args) steps, checking the group after each one.

        Ops: add_member, sign(id, message), reveal(id), claim(index), open(index).
        """
        operations = {
            "add_member": self.add_member,
            "sign": self.sign,
            "reveal": self.reveal,
            "claim": self.claim,
            "open": self.open,
        }
        steps = []
        for op, *args in script:
            if op not in operations:
                raise UsageError(f"unknown harness operation {op!r}")
            result = operations[op](*args)
            checks = self.check()
            if op == "open":
                checks["open_step"] = result == self._signed(args[0]).signer
            elif op == "claim":
                checks["claim_step"] = result is not None
            elif op == "reveal":
                checks["reveal_step"] = result is not None
            step = HarnessStep(op, tuple(args), result, checks)
            if not step.ok:
                logger.warning("Harness step %s%s failed: %s", op, tuple(args),
                               [name for name, passed in checks.items() if not passed])
            steps.append(step)
        return steps
