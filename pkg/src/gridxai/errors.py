"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit-code classes: configuration problems (2),
data/schema problems (3) and everything else (4).
"""


class GridXaiError(Exception):
    """Base class for all gridxai errors."""


class ConfigError(GridXaiError):
    """Invalid run configuration."""


class InvalidInputError(GridXaiError):
    """Caller passed data that violates an operation's preconditions."""


class SchemaMismatchError(GridXaiError):
    """Column/field layout does not match what the consumer expects."""


class ModelIntegrityError(GridXaiError):
    """A model violates its structural invariants (e.g. zero-cover node)."""


class CapacityError(GridXaiError):
    """Request exceeds a hard size limit (e.g. exhaustive subset enumeration)."""


class UndefinedScoreError(GridXaiError):
    """A score is mathematically undefined for the given inputs."""


class ParseError(GridXaiError):
    """Malformed input document."""

    def __init__(self, message, byte_offset=None):
        super().__init__(message)
        self.byte_offset = byte_offset


class AuthError(GridXaiError):
    """API authentication failed."""


class RateLimitError(GridXaiError):
    """API rate limit persisted past the configured retry budget."""


class FixtureMissingError(GridXaiError):
    """Offline mode requested data not present in the fixture directory."""


class MissingArtifactError(GridXaiError):
    """A pipeline stage requires an artifact another command produces."""

    def __init__(self, message, prerequisite=None):
        super().__init__(message)
        self.prerequisite = prerequisite
