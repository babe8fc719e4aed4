"""
tracesig package.
Traceable group signatures from lattices: SIS/LWE building blocks, a
quadratic-relation zero-knowledge proof made non-interactive with Unruh's
transform, and a keystore-backed command line.
"""

__version__ = "0.1.0"

from .core.params import ParamSet, preset, setup, validate_params
from .core.samplers import RngHandle
from .errors import TraceSigError
from .main import TraceSig
from .scheme.harness import HonestHarness
from .scheme.traceable import (audit_open, claim, claim_verify, join_gm_process, join_user_finalize,
                               join_user_request, keygen, open_signature, reveal, sign, size_report, trace,
                               verify)
from .storage.config import TraceSigConfig
from .storage.keystore import Keystore

__all__ = [
    "TraceSig",
    "TraceSigConfig",
    "Keystore",
    "HonestHarness",
    "ParamSet",
    "RngHandle",
    "TraceSigError",
    "setup",
    "preset",
    "validate_params",
    "keygen",
    "join_user_request",
    "join_gm_process",
    "join_user_finalize",
    "sign",
    "verify",
    "open_signature",
    "reveal",
    "trace",
    "claim",
    "claim_verify",
    "audit_open",
    "size_report",
]
