"""
Join registry.
Append-only table of join transcripts (id, user verification key, user signature,
certificate). The group manager's counter is the registry length.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional

import numpy as np

from ..core.encoding import ArtifactMixin, Decoder, Encoder
from ..core.lattice import BitVector
from ..errors import CapacityError, JoinRejectedError
from .signatures import TagSignature

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Transcript:
    """transcript_id = (id, σ_user, cert_id), with the user key that σ_user verifies under."""

    ident: int
    ybits: BitVector
    user_vk: bytes
    user_sig: bytes
    cert: TagSignature

    def encode(self, enc: Encoder) -> None:
        enc.u32(self.ident).bit_vector(self.ybits).raw(self.user_vk).raw(self.user_sig)
        self.cert.encode(enc)

    @classmethod
    def decode(cls, dec: Decoder) -> "Transcript":
        return cls(dec.u32(), dec.bit_vector(), dec.raw(), dec.raw(), TagSignature.decode(dec))


@dataclass(eq=False)
class Registry(ArtifactMixin):
    capacity: int
    entries: List[Transcript] = field(default_factory=list)

    MAGIC = b"TREG"

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Transcript]:
        return iter(self.entries)

    @property
    def counter(self) -> int:
        """st: the number of members admitted so far."""
        return len(self.entries)

    @property
    def next_id(self) -> int:
        return self.counter + 1

    @property
    def full(self) -> bool:
        return self.counter >= self.capacity

    def find(self, ident: int) -> Optional[Transcript]:
        if 1 <= ident <= len(self.entries):
            return self.entries[ident - 1]
        return None

    def contains_ybits(self, ybits: BitVector) -> bool:
        return any(np.array_equal(entry.ybits.entries, ybits.entries) for entry in self.entries)

    def check_admissible(self, ybits: BitVector) -> None:
        """
        Raises:
            CapacityError: If N members already joined.
            JoinRejectedError: If bin(y) was registered before.
        """
        if self.full:
            raise CapacityError(f"group is full ({self.capacity} members)")
        if self.contains_ybits(ybits):
            raise JoinRejectedError("bin(y) already registered")

    def append(self, transcript: Transcript) -> None:
        if transcript.ident != self.next_id:
            raise JoinRejectedError(f"transcript id {transcript.ident}, expected {self.next_id}")
        self.check_admissible(transcript.ybits)
        self.entries.append(transcript)
        logger.debug("Registry now holds %d of %d members", self.counter, self.capacity)

    def to_bytes(self) -> bytes:
        enc = Encoder().u32(self.capacity).u32(len(self.entries))
        for entry in self.entries:
            entry.encode(enc)
        return enc.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Registry":
        dec = Decoder(data)
        capacity, count = dec.u32(), dec.u32()
        entries = [Transcript.decode(dec) for _ in range(count)]
        dec.done()
        registry = cls(capacity)
        for entry in entries:
            registry.append(entry)
        return registry
