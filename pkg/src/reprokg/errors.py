"""Exception hierarchy shared by all reprokg modules."""

from __future__ import annotations


class ReproKGError(Exception):
    """Base class for every error raised by this package."""


class InputError(ReproKGError):
    """Malformed or unusable input (maps to CLI exit status 1)."""


class ValidationError(ReproKGError):
    """Input parsed but violates a declared constraint (CLI exit status 2)."""


# rdf core


class InvalidIri(InputError):
    pass


class InvalidTerm(InputError):
    pass


class UnknownPrefix(InputError):
    def __init__(self, prefix: str):
        super().__init__(f"unknown prefix {prefix!r}")
        self.prefix = prefix


class TooManyBlankNodes(ReproKGError):
    pass


# parsing


class SyntaxError(InputError):  # noqa: A001 - deliberately mirrors the parser vocabulary
    """Parse failure carrying a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class Unsupported(InputError):
    """A recognised construct that lies outside the supported subset."""

    def __init__(self, construct: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: unsupported construct: {construct}")
        self.construct = construct
        self.line = line
        self.column = column


# query engine


class MalformedQuery(InputError):
    pass


# vocabularies / shapes


class InconsistentVocabulary(ReproKGError):
    pass


class ShapeViolation(ValidationError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.rule_id} @ {v.focus_node}: {v.message}" for v in self.violations)
        super().__init__(f"{len(self.violations)} shape violation(s): {lines}")


# system configurations


class InvalidConfiguration(ValidationError):
    def __init__(self, findings):
        self.findings = list(findings)
        msgs = "; ".join(f"{f.code}: {f.message}" for f in self.findings)
        super().__init__(f"invalid configuration: {msgs}")


class EmptyConfiguration(InputError):
    pass


# provenance


class DanglingReference(InputError):
    pass


class TemplateMismatch(InputError):
    pass


class InvalidTimestamp(InputError):
    pass


# ingest


class CyclicSuite(InputError):
    pass


class NonMonotoneTimestamps(InputError):
    def __init__(self, row: int):
        super().__init__(f"timestamps not strictly increasing at row {row}")
        self.row = row


class ArityMismatch(InputError):
    def __init__(self, row: int, expected: int, found: int):
        super().__init__(f"row {row}: expected {expected} values, found {found}")
        self.row = row


class UnmappedColumn(InputError):
    def __init__(self, column: str):
        super().__init__(f"column {column!r} has no channel-map entry")
        self.column = column


class NonNumericValue(InputError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: non-numeric value {value!r}")
        self.row = row
        self.column = column


class UnresolvedReference(InputError):
    pass


# evaluation


class InvalidNominal(InputError):
    pass


class InvalidSpec(InputError):
    pass


class EmptySeries(InputError):
    pass


class WindowTooLong(InputError):
    pass


class ChannelMissing(InputError):
    pass


# catalog


class ChecksumMismatch(ValidationError):
    def __init__(self, path: str, expected: str, actual: str):
        super().__init__(f"{path}: checksum mismatch (manifest {expected[:12]}…, file {actual[:12]}…)")
        self.path = path
        self.expected = expected
        self.actual = actual
