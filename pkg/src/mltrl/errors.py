"""Error taxonomy shared by the engine, store, CLI, and API.

Four families decide exit codes and HTTP statuses:

* ValidationFailed  -> CLI exit 1, HTTP 422 (bad command against current state)
* Conflict          -> CLI exit 2, HTTP 409 (writer lease, stale gate)
* NotFound          -> CLI exit 1, HTTP 404 (unknown ids)
* Integrity         -> CLI exit 2, HTTP 500 (broken chain, storage faults)
"""

from __future__ import annotations


class MltrlError(Exception):
    """Base for every domain error; ``code`` is the stable machine name."""

    code = "Error"

    def __init__(self, detail: str = ""):
        super().__init__(detail or self.code)
        self.detail = detail


class ValidationFailed(MltrlError):
    code = "ValidationFailed"


class Conflict(MltrlError):
    code = "Conflict"


class NotFound(MltrlError):
    code = "NotFound"


class Integrity(MltrlError):
    code = "Integrity"


# -- core-model ---------------------------------------------------------------

class OutOfRange(ValidationFailed):
    code = "OutOfRange"


class DomainError(ValidationFailed):
    code = "DomainError"


class EvidenceRequired(ValidationFailed):
    code = "EvidenceRequired"


class RequirementLevelBound(ValidationFailed):
    code = "RequirementLevelBound"


class StatusRegression(ValidationFailed):
    code = "StatusRegression"


# -- lifecycle engine ---------------------------------------------------------

class EmptyProject(ValidationFailed):
    code = "EmptyProject"


class EntryTooHigh(ValidationFailed):
    code = "EntryTooHigh"


class MissingJustification(ValidationFailed):
    code = "MissingJustification"


class DuplicateComponent(ValidationFailed):
    code = "DuplicateComponent"


class DuplicateRequirement(ValidationFailed):
    code = "DuplicateRequirement"


class DuplicateRisk(ValidationFailed):
    code = "DuplicateRisk"


class UnknownComponent(NotFound):
    code = "UnknownComponent"


class UnknownRequirement(NotFound):
    code = "UnknownRequirement"


class UnknownRisk(NotFound):
    code = "UnknownRisk"


class UnknownPerson(ValidationFailed):
    code = "UnknownPerson"


class UnknownReview(NotFound):
    code = "UnknownReview"


class ComponentRetired(ValidationFailed):
    code = "ComponentRetired"


class ComponentPaused(ValidationFailed):
    code = "ComponentPaused"


class PanelViolation(ValidationFailed):
    code = "PanelViolation"


class EthicsMissing(ValidationFailed):
    code = "EthicsMissing"


class ChecklistIncomplete(ValidationFailed):
    code = "ChecklistIncomplete"


class StaleGate(Conflict):
    code = "StaleGate"


class SkipAttempt(ValidationFailed):
    code = "SkipAttempt"


class NoHigherLevel(ValidationFailed):
    code = "NoHigherLevel"


class IllegalEmbeddedPath(ValidationFailed):
    code = "IllegalEmbeddedPath"


class MissingReviewRef(ValidationFailed):
    code = "MissingReviewRef"


class UpwardSwitchback(ValidationFailed):
    code = "UpwardSwitchback"


class NotDeployed(ValidationFailed):
    code = "NotDeployed"


class WrongLevel(ValidationFailed):
    code = "WrongLevel"


class InvalidChoice(ValidationFailed):
    code = "InvalidChoice"


class InvalidConfig(ValidationFailed):
    code = "InvalidConfig"


# -- cards --------------------------------------------------------------------

class ComponentMismatch(ValidationFailed):
    code = "ComponentMismatch"


class ParseError(ValidationFailed):
    code = "ParseError"

    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"line {line}: {detail}" if detail else f"line {line}")
        self.line = line


class MissingSection(ValidationFailed):
    code = "MissingSection"

    def __init__(self, section: str):
        super().__init__(section)
        self.section = section


# -- event store --------------------------------------------------------------

class WriterConflict(Conflict):
    code = "WriterConflict"


class StorageError(Integrity):
    code = "StorageError"


class ChainBroken(Integrity):
    code = "ChainBroken"

    def __init__(self, seq: int, detail: str = ""):
        super().__init__(f"seq {seq}: {detail}" if detail else f"seq {seq}")
        self.seq = seq


class UnknownEventKind(Integrity):
    code = "UnknownEventKind"


class SnapshotStale(Integrity):
    code = "SnapshotStale"


# -- CLI / API ----------------------------------------------------------------

class SeqAhead(ValidationFailed):
    code = "SeqAhead"


class ScriptNotFound(NotFound):
    code = "ScriptNotFound"


class StepFailed(MltrlError):
    code = "StepFailed"

    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"line {line}: {detail}" if detail else f"line {line}")
        self.line = line


class LintFailure(Integrity):
    code = "LintFailure"


class BindFailure(MltrlError):
    code = "BindFailure"
