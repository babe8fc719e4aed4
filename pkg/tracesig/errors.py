"""
Exception types for tracesig.
Library code raises these; the facade and CLI translate them into results and exit codes.
"""


class TraceSigError(Exception):
    """Base class for every error raised by tracesig."""


class DimensionError(TraceSigError):
    """Shapes of matrices, vectors or segments do not line up."""


class ModulusMismatchError(TraceSigError):
    """Two modular objects with different moduli were combined."""


class RangeError(TraceSigError):
    """A value lies outside the interval an operation accepts."""


class NormBoundError(TraceSigError):
    """A short vector exceeds its declared infinity-norm bound."""


class ParameterError(TraceSigError):
    """Parameters are inconsistent or no admissible parameters exist."""


class WidthError(TraceSigError):
    """A Gaussian width is below the floor required by the sampler."""


class TagError(TraceSigError):
    """A trapdoor tag is not invertible modulo q."""


class SamplingError(TraceSigError):
    """A sampler exhausted its retry budget."""


class ProvingError(TraceSigError):
    """The prover exhausted its restart budget."""


class UsageError(TraceSigError):
    """An API was used against its contract (e.g. one-time key reused)."""


class JoinRejectedError(TraceSigError):
    """The group manager refused a join request."""


class CapacityError(TraceSigError):
    """The group already holds N members."""


class EncodingError(TraceSigError):
    """Bytes do not decode to the expected canonical object."""


class IntegrityError(TraceSigError):
    """An artifact file failed its magic, version or checksum test."""


class WitnessError(TraceSigError):
    """Secret inputs do not satisfy the relation they are compiled into."""
