"""Exception types raised across the toolchain.

Every stage raises a subclass of AssertGenError so the CLI can report the
failing stage uniformly and exit non-zero.
"""

from __future__ import annotations


class AssertGenError(Exception):
    """Base class for all toolchain errors."""


class UnterminatedLiteral(AssertGenError):
    """A string or char literal never closes."""

    def __init__(self, offset: int):
        super().__init__(f"unterminated string/char literal at byte offset {offset}")
        self.offset = offset


class ParseFailure(AssertGenError):
    """Braces cannot be balanced or class structure cannot be recovered."""


class SpanOutOfRange(AssertGenError):
    """An assertion site's token span does not fit the method it claims to be in."""


class MissingPlaceholder(AssertGenError):
    """A token stream does not contain exactly one <ASSERTION> placeholder."""


class UnknownAbstractToken(AssertGenError):
    """The model emitted abstract tokens with no dictionary binding."""

    def __init__(self, tokens: list[str]):
        super().__init__(f"abstract tokens without dictionary binding: {tokens}")
        self.tokens = tokens


class MalformedRecord(AssertGenError):
    """A dataset/prediction record failed to re-import."""


class MissingFocal(AssertGenError):
    """A sample lacks the focal-method context required by the operation."""


class DegenerateCorpus(AssertGenError):
    """Too few groups to split."""


class BackendUnavailable(AssertGenError):
    """The requested predictor backend cannot be started."""


class EmptyIndex(AssertGenError):
    """The retrieval baseline has no entries to rank."""


class AdapterProtocolError(AssertGenError):
    """The adapter process violated the line protocol."""


class AdapterTimeout(AssertGenError):
    """The adapter process did not answer within the configured timeout."""


class MismatchedIds(AssertGenError):
    """Predictions and ground truths do not cover the same sample ids."""


class EmptyCorpus(AssertGenError):
    """Metric requested over zero samples."""


class NoFocalFound(AssertGenError):
    """All focal-detection strategies failed."""


class SiteNotInTest(AssertGenError):
    """The failing assertion is not located within the test method itself."""


class HookTimeout(AssertGenError):
    """A compile/test hook exceeded its timeout."""


class HookCrash(AssertGenError):
    """A compile/test hook exited with a status outside the 0/1 contract."""

    def __init__(self, command: str, returncode: int, output: str = ""):
        super().__init__(f"hook crashed (exit {returncode}): {command}")
        self.command = command
        self.returncode = returncode
        self.output = output
