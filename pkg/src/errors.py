"""Exceptions raised by the QFI toolkit.

Everything derives from ValueError so callers that only care about bad
input can keep catching that.
"""


class QfiError(ValueError):
    """Base class for toolkit errors."""


class ConfigError(QfiError):
    """Invalid or unreadable configuration."""


class DimensionCapError(QfiError):
    """The requested number of qubits exceeds the configured cap."""


class DimensionMismatchError(QfiError):
    """Operator and state dimensions do not agree."""


class InvalidStateError(QfiError):
    """A state, direction or rotation violates its invariants."""


class NonHermitianError(QfiError):
    """An operator expected to be Hermitian is not."""


class NotSymmetricError(QfiError):
    """A permutation-symmetric state was required."""


class SeparableStateError(QfiError):
    """An entangled state was required."""


class SingularOutcomeError(QfiError):
    """A zero-probability outcome has a non-vanishing derivative."""


class SpecError(QfiError):
    """Malformed state specification or command input."""
