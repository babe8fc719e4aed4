"""
File utilities for the keystore.
Directory helpers, atomic writes, framed artifact files and their JSON sidecars.
"""

import json
import logging
import os
import shutil
import tempfile
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Type, TypeVar

from ..core.encoding import fingerprint, split_artifact
from ..errors import IntegrityError

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".json"

T = TypeVar("T")


def ensure_directory(path: str) -> str:
    """
    Ensure a directory exists, creating it if necessary.

    Args:
        path: Path to the directory.

    Returns:
        Absolute path to the directory.
    """
    path = os.path.abspath(os.path.expanduser(path))
    os.makedirs(path, exist_ok=True)
    return path


def atomic_write_bytes(file_path: str, data: bytes) -> None:
    """
    Write bytes atomically: temporary file in the target directory, then rename.

    Raises:
        OSError: If the file cannot be written.
    """
    file_path = os.path.expanduser(file_path)
    parent_dir = os.path.dirname(file_path) or "."
    os.makedirs(parent_dir, exist_ok=True)
    with tempfile.NamedTemporaryFile(mode="wb", delete=False, dir=parent_dir, suffix=".tmp") as temp_file:
        temp_file.write(data)
        temp_file.flush()
        os.fsync(temp_file.fileno())
    shutil.move(temp_file.name, file_path)


def atomic_write_json_file(file_path: str, data: Dict[str, Any], pretty: bool = True) -> bool:
    """
    Write data to a JSON file atomically.

    Args:
        file_path: Path to the JSON file.
        data: Data to write.
        pretty: Whether to pretty-print the JSON.

    Returns:
        True if successful, False otherwise.
    """
    try:
        text = json.dumps(data, indent=2 if pretty else None, sort_keys=True)
        atomic_write_bytes(file_path, text.encode("utf-8"))
        return True
    except (OSError, TypeError) as e:
        logger.error(f"Error writing JSON file {file_path}: {e}")
        return False


def read_json_file(file_path: str, default: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """
    Read a JSON file.

    Args:
        file_path: Path to the JSON file.
        default: Value returned if the file doesn't exist or can't be parsed.

    Returns:
        Parsed JSON data.
    """
    file_path = os.path.expanduser(file_path)
    if not os.path.exists(file_path):
        return default or {}
    try:
        with open(file_path, "r") as f:
            return json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        logger.error(f"Error reading JSON file {file_path}: {e}")
        return default or {}


def sidecar_path(file_path: str) -> str:
    return os.path.splitext(file_path)[0] + SIDECAR_SUFFIX


def write_artifact_file(file_path: str, artifact: Any, role: str, extra: Optional[Dict[str, Any]] = None) -> str:
    """
    Write a framed artifact and its JSON sidecar.

    Args:
        file_path: Target path of the binary artifact.
        artifact: Object with to_artifact().
        role: Human-readable role recorded in the sidecar.
        extra: Further sidecar fields (ids, names).

    Returns:
        The path written.
    """
    data = artifact.to_artifact()
    atomic_write_bytes(file_path, data)
    meta = {
        "role": role,
        "magic": data[:4].decode("ascii", "replace"),
        "bytes": len(data),
        "fingerprint": fingerprint(data).hex(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    meta.update(extra or {})
    atomic_write_json_file(sidecar_path(file_path), meta)
    logger.debug(f"Wrote {role} artifact {file_path} ({len(data)} bytes)")
    return file_path


def read_artifact_file(file_path: str, cls: Type[T]) -> T:
    """
    Load a framed artifact, checking magic, version and checksum.

    Raises:
        FileNotFoundError: If the file is missing.
        IntegrityError: If the frame or checksum is wrong.
        EncodingError: If the payload does not parse.
    """
    file_path = os.path.expanduser(file_path)
    with open(file_path, "rb") as f:
        data = f.read()
    try:
        return cls.from_artifact(data)
    except IntegrityError as e:
        raise IntegrityError(f"{file_path}: {e}") from e


def describe_artifact_file(file_path: str) -> Dict[str, Any]:
    """Magic, version and payload size of a framed file without parsing the payload."""
    with open(os.path.expanduser(file_path), "rb") as f:
        magic, version, payload = split_artifact(f.read())
    return {"magic": magic.decode("ascii", "replace"), "version": version, "payload_bytes": len(payload)}


def find_first_existing_file(file_paths: List[str], default: Optional[str] = None) -> Optional[str]:
    """
    Find the first existing file from a list of paths.

    Args:
        file_paths: List of file paths to check.
        default: Returned if none of the files exist.

    Returns:
        Path to the first existing file, or default.
    """
    for path in file_paths:
        expanded_path = os.path.expanduser(path)
        if os.path.exists(expanded_path):
            return expanded_path
    return default


def list_files_with_extension(directory: str, extension: str) -> List[str]:
    """
    List all files in a directory with a specific extension, sorted by name.

    Args:
        directory: Directory to search.
        extension: File extension to match (with or without dot).
    """
    directory = os.path.expanduser(directory)
    if not os.path.isdir(directory):
        return []
    if not extension.startswith("."):
        extension = f".{extension}"
    return sorted(os.path.join(directory, name) for name in os.listdir(directory) if name.endswith(extension))


def safe_delete_file(file_path: str) -> bool:
    """
    Delete a file and its sidecar.

    Returns:
        True if the file was deleted or doesn't exist, False on error.
    """
    file_path = os.path.expanduser(file_path)
    try:
        for path in (file_path, sidecar_path(file_path)):
            if os.path.exists(path):
                os.remove(path)
        return True
    except OSError as e:
        logger.error(f"Error deleting file {file_path}: {e}")
        return False
