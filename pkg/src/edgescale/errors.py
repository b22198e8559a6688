"""Exception types shared across the sandbox components.

HTTP handlers map these onto status codes: ValidationError and its
subclasses are 400-class, NotFoundError and its subclasses 404-class,
SnapshotUnavailable 503.
"""


class EdgescaleError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(EdgescaleError):
    """A config, command, or request body violates an invariant."""


class ScenarioError(ValidationError):
    """Scenario config failed validation; message names the violated invariant."""


class ConfigError(ValidationError):
    """Run config failed validation."""


class MaxUsersExceeded(ValidationError):
    """Steering would push the user count past the scenario cap."""


class OutOfBoundsError(ValidationError):
    """Requested replica count violates a deployment bound."""


class NotFoundError(EdgescaleError):
    """A named resource does not exist."""


class UnknownZoneError(NotFoundError):
    pass


class UnknownAddressError(NotFoundError):
    pass


class UnknownScenarioError(NotFoundError):
    pass


class DeploymentNotFound(NotFoundError):
    pass


class SnapshotUnavailable(EdgescaleError):
    """No simulator snapshot has been published yet."""


class EmptyWindowError(EdgescaleError):
    """The sliding window holds no samples."""


class LocationUnavailable(EdgescaleError):
    """The location API could not be polled this step."""


class ScaleRejected(EdgescaleError):
    """The orchestrator rejected a scaling request."""
