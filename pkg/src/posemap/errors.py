"""Exception types shared by the library, the CLI, and the REST service."""

from __future__ import annotations


class PosemapError(Exception):
    """Base class for every error raised by this package."""


class ParseError(PosemapError):
    """An input stream could not be parsed in its declared format."""

    def __init__(self, message: str, line: int | None = None, record: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if record is not None:
            where.append(f"record {record}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.record = record


class SchemaError(PosemapError):
    """A record violates the 20-joint skeleton schema."""

    def __init__(self, message: str, sequence_id: str | None = None):
        if sequence_id is not None:
            message = f"{message} [sequence {sequence_id}]"
        super().__init__(message)
        self.sequence_id = sequence_id


class DegenerateSkeletonError(PosemapError):
    """Torso length is too small to normalize against."""


class DomainError(PosemapError):
    """A numeric operation was called outside its domain (empty sequence, bad shape, non-finite input)."""


class NotFoundError(PosemapError):
    """A referenced corpus entity (sequence, referent, dataset) does not exist."""


class ValidationError(PosemapError):
    """A request or parameter set is structurally invalid."""


class TrainingError(PosemapError):
    """Training aborted; carries the epoch/batch where the loss went non-finite."""

    def __init__(self, message: str, epoch: int | None = None, batch: int | None = None):
        if epoch is not None:
            message = f"{message} (epoch {epoch}, batch {batch})"
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class ExportError(PosemapError):
    """An analysis export could not be assembled; carries dangling references."""

    def __init__(self, message: str, dangling: list[str] | None = None):
        if dangling:
            message = f"{message}: {', '.join(dangling)}"
        super().__init__(message)
        self.dangling = dangling or []


class ConcurrencyError(PosemapError):
    """Another mutation is already running against the same resource."""
