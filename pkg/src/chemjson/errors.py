"""Exception hierarchy and the ``Violation`` record shared by all validators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken rule, located by a dotted path into the document."""

    path: str
    rule: str
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.path}: {self.rule}"
        return f"{text} ({self.message})" if self.message else text


class ChemDataError(ValueError):
    """Base class for every error raised by this package."""

    def __init__(self, message: str, path: str = "", violations=()):
        self.path = path
        self.violations = list(violations)
        super().__init__(f"{path}: {message}" if path else message)


class MalformedJson(ChemDataError):
    pass


class SchemaViolation(ChemDataError):
    pass


class InvariantViolation(ChemDataError):
    pass


class UnitUnknown(ChemDataError):
    pass


class IncompatibleUnits(ChemDataError):
    pass


class UnknownElement(ChemDataError):
    pass


class DuplicateId(ChemDataError):
    pass


class DanglingReference(ChemDataError):
    pass


class NoVibrations(ChemDataError):
    pass


class ModeOutOfRange(ChemDataError):
    pass


class RowParseError(ChemDataError):
    """A log-file row could not be split into the expected columns."""

    def __init__(self, message: str, line_number: int):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class MissingField(ChemDataError):
    pass


class EmptyLog(ChemDataError):
    pass
