"""Exception hierarchy.

Every toolkit error derives from BapkitError so callers can catch one type;
the subclasses match the failure classes the operations document.
"""

from __future__ import annotations


class BapkitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(BapkitError):
    """An index lies outside the truncation box, or boxes disagree."""


class LevelError(BapkitError):
    """A seminorm level outside the graded family was requested."""


class ModeError(BapkitError):
    """Scalar modes were mixed, or a scalar is invalid for its mode."""


class InputError(BapkitError):
    """Structurally invalid input: dependent basis, malformed map, bad shape."""


class DegenerateInputError(BapkitError):
    """An operation received an empty family where at least one member is required."""


class ZeroOperatorError(BapkitError):
    """A zero operator reached a construction step that needs a nonzero range."""


class ContinuousNormError(BapkitError):
    """No level of the system is a norm on the required subspace."""


class ConstructionSoundnessError(BapkitError):
    """A certified bound failed on a sample; indicates a certification bug."""


class CertificateFailureError(BapkitError):
    """A sampled certificate inequality was violated."""


class BoxTooSmallError(BapkitError):
    """The truncation box cannot hold a required index; message names the bound."""


class InsufficientDataError(BapkitError):
    """A diagnostic needs more evidence vectors than were supplied."""


class ComputationCapError(BapkitError):
    """An exact enumeration exceeded its combinatorics cap."""


class UnboundedSeminormError(BapkitError):
    """A level-to-level operator norm is infinite on the box."""


class ConfigError(BapkitError):
    """Invalid run configuration."""
