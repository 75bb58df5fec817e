"""Exception hierarchy shared by every module."""

from __future__ import annotations


class CrowdguardError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(CrowdguardError):
    """A file-level problem, carrying the source path and line number."""

    def __init__(self, message: str, *, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        prefix = ""
        if path is not None:
            prefix += path
        if line_no is not None:
            prefix += f":{line_no}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class StreamParseError(FormatError):
    """Malformed record in a line-delimited stream."""


class VersionError(FormatError):
    """Unsupported format_version in a stream header."""


class OrderingError(FormatError):
    """Frame ids not strictly increasing."""


class DuplicateKeyError(FormatError):
    """Two recorded-scores entries share the same (frame_id, face_id)."""


class BadDistributionError(FormatError):
    """A score vector is negative or does not sum to 1."""


class UnknownLabelError(FormatError):
    """A label string outside the task's taxonomy."""


class MissingShouldersError(CrowdguardError):
    """Distance geometry requested for a person without shoulder keypoints."""


class DegenerateWidthError(CrowdguardError):
    """Shoulder width below the configured minimum; pose not trustworthy."""


class BackendError(CrowdguardError):
    """Base class for classifier backend failures."""


class BackendUnavailableError(BackendError):
    """The requested backend cannot be constructed (missing runtime or file)."""


class MissingScoreError(BackendError):
    """Recorded backend has no entry for the requested (frame_id, face_id)."""


class GeometryMismatchError(CrowdguardError):
    """Image dimensions disagree with the declared frame geometry."""


class IdMismatchError(CrowdguardError):
    """A report component references a subject id absent from its frame."""
