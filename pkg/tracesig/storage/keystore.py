"""
Keystore directory management.

    <root>/params.bin, gpk.bin, gsk.bin, osk.bin, registry.bin
    <root>/members/<id>/usk.bin, cert.bin, usersig.bin
    <root>/pending/<name>/pending.bin, usersig.bin

Every binary file is a framed artifact with a JSON sidecar next to it.
"""

import logging
import os
import re
from typing import Any, Dict, List, Tuple, Type, TypeVar

from ..core.params import ParamSet
from ..errors import UsageError
from ..scheme.gpv_ibe import OpeningKey
from ..scheme.hashsig import UserSigKeypair
from ..scheme.registry import Registry
from ..scheme.traceable import Certificate, GroupManagerKey, GroupPublicKey, PendingUser, UserSecret
from ..utils.file_utils import (describe_artifact_file, ensure_directory, list_files_with_extension,
                                read_artifact_file, read_json_file, safe_delete_file, sidecar_path,
                                write_artifact_file)

logger = logging.getLogger(__name__)

T = TypeVar("T")

_NAME = re.compile(r"^[A-Za-z0-9_.-]+$")


class Keystore:
    """One directory holding a group's artifacts."""

    def __init__(self, root: str):
        self.root = os.path.abspath(os.path.expanduser(root))

    def path(self, *parts: str) -> str:
        return os.path.join(self.root, *parts)

    def exists(self, *parts: str) -> bool:
        return os.path.exists(self.path(*parts))

    def save(self, relpath: str, artifact, role: str, **extra) -> str:
        ensure_directory(os.path.dirname(self.path(relpath)))
        return write_artifact_file(self.path(relpath), artifact, role, extra)

    def load(self, relpath: str, cls: Type[T]) -> T:
        path = self.path(relpath)
        if not os.path.exists(path):
            raise FileNotFoundError(f"{path} not found (keystore {self.root})")
        return read_artifact_file(path, cls)

    def save_params(self, pp: ParamSet) -> str:
        return self.save("params.bin", pp, "params", N=pp.N, n=pp.n, q=pp.q, q_prime=pp.q_prime)

    def load_params(self) -> ParamSet:
        return self.load("params.bin", ParamSet)

    def save_group(self, gpk: GroupPublicKey, gsk: GroupManagerKey, osk: OpeningKey, registry: Registry) -> None:
        """
        Raises:
            UsageError: If the keystore already holds a group.
        """
        if self.exists("gpk.bin"):
            raise UsageError(f"keystore {self.root} already holds group keys")
        self.save_params(gpk.pp)
        self.save("gpk.bin", gpk, "group public key")
        self.save("gsk.bin", gsk, "group manager key")
        self.save("osk.bin", osk, "opening key")
        self.save_registry(registry)
        logger.info("Group keys written to %s", self.root)

    def load_gpk(self) -> GroupPublicKey:
        return self.load("gpk.bin", GroupPublicKey)

    def load_gsk(self) -> GroupManagerKey:
        return self.load("gsk.bin", GroupManagerKey)

    def load_osk(self) -> OpeningKey:
        return self.load("osk.bin", OpeningKey)

    def load_registry(self) -> Registry:
        return self.load("registry.bin", Registry)

    def save_registry(self, registry: Registry) -> str:
        return self.save("registry.bin", registry, "registry", members=registry.counter,
                         capacity=registry.capacity)

    @staticmethod
    def _check_name(name: str) -> str:
        if not _NAME.match(name):
            raise UsageError(f"invalid pending join name {name!r}")
        return name

    def save_pending(self, name: str, pending: PendingUser, user_keys: UserSigKeypair) -> None:
        name = self._check_name(name)
        self.save(os.path.join("pending", name, "pending.bin"), pending, "pending join", name=name)
        self.save(os.path.join("pending", name, "usersig.bin"), user_keys, "user signing key", name=name)

    def load_pending(self, name: str) -> Tuple[PendingUser, UserSigKeypair]:
        name = self._check_name(name)
        return (self.load(os.path.join("pending", name, "pending.bin"), PendingUser),
                self.load(os.path.join("pending", name, "usersig.bin"), UserSigKeypair))

    def remove_pending(self, name: str) -> None:
        folder = self.path("pending", self._check_name(name))
        for path in list_files_with_extension(folder, ".bin"):
            safe_delete_file(path)
        if os.path.isdir(folder) and not os.listdir(folder):
            os.rmdir(folder)

    def save_member(self, ident: int, usk: UserSecret, cert: Certificate, user_keys: UserSigKeypair) -> None:
        folder = os.path.join("members", str(ident))
        self.save(os.path.join(folder, "usk.bin"), usk, "member secret", id=ident)
        self.save(os.path.join(folder, "cert.bin"), cert, "certificate", id=ident)
        self.save(os.path.join(folder, "usersig.bin"), user_keys, "user signing key", id=ident)

    def load_member(self, ident: int) -> Tuple[UserSecret, Certificate]:
        folder = os.path.join("members", str(ident))
        if not os.path.isdir(self.path(folder)):
            raise UsageError(f"no member {ident} in keystore {self.root}")
        return (self.load(os.path.join(folder, "usk.bin"), UserSecret),
                self.load(os.path.join(folder, "cert.bin"), Certificate))

    def list_members(self) -> List[int]:
        folder = self.path("members")
        if not os.path.isdir(folder):
            return []
        return sorted(int(name) for name in os.listdir(folder) if name.isdigit())

    def inventory(self) -> List[Dict[str, Any]]:
        """Frame header and sidecar role of every artifact at the keystore root."""
        rows = []
        for path in list_files_with_extension(self.root, ".bin"):
            row = {"file": os.path.basename(path)}
            row.update(describe_artifact_file(path))
            row["role"] = read_json_file(sidecar_path(path)).get("role", "unknown")
            rows.append(row)
        return rows
