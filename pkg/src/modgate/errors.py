"""Exception hierarchy shared by all modgate modules."""

from __future__ import annotations


class ModgateError(Exception):
    """Base class for every error raised by this package."""


class FileError(ModgateError):
    """A required file is missing or unreadable."""


class SchemaError(ModgateError):
    """A taxonomy schema file violates its contract."""


class UnknownLabel(ModgateError):
    def __init__(self, raw: str):
        super().__init__(f"unknown label: {raw!r}")
        self.raw = raw


class RecordError(ModgateError):
    """A dataset record failed validation.

    ``cause`` is one of ``bad label``, ``empty text``, ``duplicate id`` or
    ``malformed record``.
    """

    def __init__(self, line: int, cause: str, detail: str = ""):
        msg = f"line {line}: {cause}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.line = line
        self.cause = cause
        self.detail = detail


class Underfull(ModgateError):
    def __init__(self, category, have: int, need: int):
        name = getattr(category, "value", category)
        super().__init__(f"Underfull {name} {have}/{need}")
        self.category = category
        self.have = have
        self.need = need


class SpecError(ModgateError):
    """A prompt specification is invalid."""


class ProviderError(ModgateError):
    """The model provider failed after all retries."""

    def __init__(self, message: str, status: int | None = None, cause: BaseException | None = None):
        super().__init__(message)
        self.status = status
        self.cause = cause


class RequestTimeout(ProviderError, TimeoutError):
    """The provider did not answer within ``request_timeout``."""


class ReplayMiss(ModgateError):
    def __init__(self, digest: str, comment_id: str | None = None):
        where = f" for comment {comment_id!r}" if comment_id is not None else ""
        super().__init__(f"no recorded response{where} (digest {digest[:16]}...)")
        self.digest = digest
        self.comment_id = comment_id


class CacheError(ModgateError):
    """The response cache file is corrupt or cannot be written."""


class ParseError(ModgateError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


class EmptyMatrix(ModgateError):
    """A metric needing at least one scored comment got none."""
