"""
tracesig main module.
Keystore-backed facade over the scheme: every operation returns a
(success, message, payload) tuple for the CLI.
"""

import hashlib
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple

from dotenv import load_dotenv

from .core.params import PRESETS, ParamSet, preset, setup, validate_params
from .core.samplers import RngHandle
from .errors import CapacityError, JoinRejectedError, TraceSigError
from .scheme import traceable
from .scheme.harness import HonestHarness
from .scheme.hashsig import usersig_keygen
from .scheme.traceable import (ClaimProof, GroupSignature, JoinRequest, JoinResponse, TracingTrapdoor)
from .storage.config import TraceSigConfig
from .storage.keystore import Keystore
from .utils.file_utils import read_artifact_file, write_artifact_file

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(level=os.environ.get("TRACESIG_LOG_LEVEL", "INFO").upper(),
                    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

Result = Tuple[bool, str, Any]

REJECTIONS = (JoinRejectedError, CapacityError)


def _digest(*parts: bytes) -> str:
    """Hex digest of length-prefixed parts, used to label seeded streams."""
    h = hashlib.sha3_256()
    for part in parts:
        h.update(len(part).to_bytes(8, "big") + part)
    return h.hexdigest()


class TraceSig:
    """
    Main class for running a traceable signature group out of a keystore directory.

    Payloads carry the cryptographic outcome; success is False only when the
    operation could not run (missing files, integrity failures, misuse) or the
    group manager rejected a join, in which case the payload is {"rejected": True}.
    """

    def __init__(self, keystore: Optional[str] = None, config_path: Optional[str] = None,
                 seed: Optional[int] = None):
        """
        Args:
            keystore: Keystore directory; falls back to TRACESIG_KEYSTORE, the config, ~/.tracesig.
            config_path: Path to a json/yaml/toml config file.
            seed: Makes every operation reproducible byte-for-byte.
        """
        self.config = TraceSigConfig(config_path)
        self.keystore = Keystore(self.config.keystore_path(keystore))
        self.seed = self.config.seed(seed)

    def _rng(self, label: str) -> RngHandle:
        if self.seed is None:
            return RngHandle()
        return RngHandle(self.seed).child(label, 0)

    @staticmethod
    def _guard(action: str, fn: Callable[[], Result]) -> Result:
        try:
            return fn()
        except REJECTIONS as e:
            logger.info(f"{action} rejected: {e}")
            return False, f"{action} rejected: {e}", {"rejected": True}
        except (TraceSigError, OSError) as e:
            logger.debug(f"{action} failed", exc_info=True)
            return False, f"{action} failed: {e}", None

    def setup(self, lambda_desk: Optional[int] = None, group_size: Optional[int] = None,
              preset_name: Optional[str] = None) -> Result:
        """
        Derive parameters and store them as params.bin.

        Precedence: explicit arguments, then the config's params section, then the preset
        ('desk' when nothing is given).
        """
        def run() -> Result:
            kwargs: Dict[str, Any] = dict(PRESETS[preset_name or "desk"])
            overrides = self.config.param_overrides()
            if "group_size" in overrides:
                overrides["N"] = overrides.pop("group_size")
            kwargs.update(overrides)
            if lambda_desk is not None:
                kwargs["lambda_desk"] = lambda_desk
            if group_size is not None:
                kwargs["N"] = group_size
            pp = setup(**kwargs)
            path = self.keystore.save_params(pp)
            return True, f"Parameters written to {path}", pp
        return self._guard("setup", run)

    def keygen(self) -> Result:
        def run() -> Result:
            pp = self.keystore.load_params()
            gpk, gsk, osk, registry = traceable.keygen(pp, self._rng("keygen"))
            self.keystore.save_group(gpk, gsk, osk, registry)
            return True, f"Group keys written to {self.keystore.root}", gpk
        return self._guard("keygen", run)

    def join_request(self, name: str, out_path: str) -> Result:
        """User side, round 1: keep (z, x, e, y) under pending/<name>, write the request."""
        def run() -> Result:
            gpk = self.keystore.load_gpk()
            rng = self._rng(f"join-request/{name}")
            user_keys = usersig_keygen(rng.spawn("usersig"))
            request, pending = traceable.join_user_request(gpk, user_keys, rng)
            self.keystore.save_pending(name, pending, user_keys)
            write_artifact_file(out_path, request, "join request", {"name": name})
            return True, f"Join request written to {out_path}", request
        return self._guard("join-request", run)

    def join_approve(self, request_path: str, out_path: str) -> Result:
        """Group manager: certify the request, append the transcript, write the response."""
        def run() -> Result:
            gpk = self.keystore.load_gpk()
            request = read_artifact_file(request_path, JoinRequest)
            registry = self.keystore.load_registry()
            response, registry = traceable.join_gm_process(gpk, self.keystore.load_gsk(), registry, request,
                                                           self._rng(f"join-approve/{registry.next_id}"))
            self.keystore.save_registry(registry)
            write_artifact_file(out_path, response, "join response", {"id": response.ident})
            return True, f"Member {response.ident} approved", response.ident
        return self._guard("join-approve", run)

    def join_finish(self, name: str, response_path: str) -> Result:
        def run() -> Result:
            gpk = self.keystore.load_gpk()
            pending, user_keys = self.keystore.load_pending(name)
            response = read_artifact_file(response_path, JoinResponse)
            ident, usk, cert = traceable.join_user_finalize(gpk, pending, response)
            self.keystore.save_member(ident, usk, cert, user_keys)
            self.keystore.remove_pending(name)
            return True, f"Joined as member {ident}", ident
        return self._guard("join-finish", run)

    def sign(self, ident: int, message: bytes, out_path: str) -> Result:
        def run() -> Result:
            gpk = self.keystore.load_gpk()
            usk, cert = self.keystore.load_member(ident)
            rng = self._rng(f"sign/{ident}/{_digest(message)}")
            signature = traceable.sign(gpk, usk, cert, message, rng)
            write_artifact_file(out_path, signature, "group signature")
            return True, f"Signature written to {out_path}", signature
        return self._guard("sign", run)

    def _load_signature(self, sig_path: str) -> GroupSignature:
        return read_artifact_file(sig_path, GroupSignature)

    def verify(self, message: bytes, sig_path: str) -> Result:
        def run() -> Result:
            valid = traceable.verify(self.keystore.load_gpk(), message, self._load_signature(sig_path))
            return True, "valid" if valid else "invalid", valid
        return self._guard("verify", run)

    def open(self, message: bytes, sig_path: str) -> Result:
        def run() -> Result:
            ident = traceable.open_signature(self.keystore.load_gpk(), self.keystore.load_osk(), message,
                                             self._load_signature(sig_path))
            return True, "opened" if ident is not None else "cannot open", ident
        return self._guard("open", run)

    def audit(self, message: bytes, sig_path: str) -> Result:
        def run() -> Result:
            result = traceable.audit_open(self.keystore.load_gpk(), self.keystore.load_osk(),
                                          self.keystore.load_registry(), message, self._load_signature(sig_path))
            return True, "registered" if result.registered else "not registered", result
        return self._guard("audit", run)

    def reveal(self, ident: int, out_path: str) -> Result:
        def run() -> Result:
            trapdoor = traceable.reveal(self.keystore.load_gpk(), self.keystore.load_osk(),
                                        self.keystore.load_registry(), ident, self._rng(f"reveal/{ident}"))
            if trapdoor is None:
                return True, f"no tracing trapdoor for id {ident}", None
            write_artifact_file(out_path, trapdoor, "tracing trapdoor", {"id": ident})
            return True, f"Tracing trapdoor written to {out_path}", trapdoor
        return self._guard("reveal", run)

    def trace(self, trapdoor_path: str, sig_path: str) -> Result:
        def run() -> Result:
            trapdoor = read_artifact_file(trapdoor_path, TracingTrapdoor)
            matched = traceable.trace(self.keystore.load_gpk(), trapdoor, self._load_signature(sig_path))
            return True, "match" if matched else "no match", matched
        return self._guard("trace", run)

    def claim(self, ident: int, message: bytes, sig_path: str, out_path: str) -> Result:
        def run() -> Result:
            gpk = self.keystore.load_gpk()
            usk, cert = self.keystore.load_member(ident)
            signature = self._load_signature(sig_path)
            rng = self._rng(f"claim/{ident}/{_digest(message, signature.to_bytes())}")
            proof = traceable.claim(gpk, usk, cert, message, signature, rng)
            if proof is None:
                return True, "signature not claimable by this member", None
            write_artifact_file(out_path, proof, "claim", {"id": ident})
            return True, f"Claim written to {out_path}", proof
        return self._guard("claim", run)

    def claim_verify(self, message: bytes, sig_path: str, claim_path: str) -> Result:
        def run() -> Result:
            proof = read_artifact_file(claim_path, ClaimProof)
            valid = traceable.claim_verify(self.keystore.load_gpk(), message, self._load_signature(sig_path), proof)
            return True, "valid" if valid else "invalid", valid
        return self._guard("claim-verify", run)

    def report(self) -> Result:
        """Constraint rows and the size accounting for the stored parameters (or the desk preset)."""
        def run() -> Result:
            pp = self.keystore.load_params() if self.keystore.exists("params.bin") else preset("desk")
            gpk = self.keystore.load_gpk() if self.keystore.exists("gpk.bin") else None
            payload: Dict[str, Any] = {
                "params": pp,
                "constraints": validate_params(pp),
                "sizes": traceable.size_report(pp, gpk),
                "artifacts": self.keystore.inventory(),
            }
            return True, "report", payload
        return self._guard("report", run)

    def demo(self, members: int = 3, pp: Optional[ParamSet] = None) -> Result:
        """End-to-end run with honest members: join, sign, open, reveal, trace, claim."""
        def run() -> Result:
            params = pp or preset("toy")
            harness = HonestHarness(params, self._rng("demo"))
            script = [("add_member",)] * members
            for ident in range(1, members + 1):
                script.append(("sign", ident, f"demo message from member {ident}".encode()))
            for index in range(members):
                script.append(("open", index))
                script.append(("claim", index))
            for ident in range(1, members + 1):
                script.append(("reveal", ident))
            steps = harness.replay(script)
            passed = all(step.ok for step in steps)
            return passed, "all lifecycle checks passed" if passed else "lifecycle checks failed", steps
        return self._guard("demo", run)
