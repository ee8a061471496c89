from typing import Any, Optional, Sequence


class WorkbenchError(ValueError):
    code = "error"

    def __init__(self, message: str, witness: Optional[Sequence[Any]] = None) -> None:
        super().__init__(message)
        self.witness = tuple(witness or ())


class MalformedInputError(WorkbenchError):
    code = "malformed-input"


class NotFoundError(WorkbenchError):
    code = "not-found"


class IncompleteBarrierMapError(WorkbenchError):
    code = "incomplete-barrier-map"


class CapacityError(WorkbenchError):
    code = "capacity"


class InvalidPairError(WorkbenchError):
    code = "invalid-pair"


class InvalidBasicSetError(WorkbenchError):
    code = "invalid-basic-set"


class InvalidIsoError(WorkbenchError):
    code = "invalid-iso"


class NoIsoError(WorkbenchError):
    code = "no-iso"


class InvalidAmalgamationError(WorkbenchError):
    code = "invalid-amalgamation"


class InvalidInputError(WorkbenchError):
    code = "invalid-input"


class InvalidChainError(WorkbenchError):
    code = "invalid-chain"


class InvalidPointError(WorkbenchError):
    code = "invalid-point"


class ScheduleInfeasibleError(WorkbenchError):
    code = "schedule-infeasible"


class AmalgamationIncompatibleError(WorkbenchError):
    """The amalgam was built but fails validation; the inputs did not meet the hypotheses."""

    code = "amalgamation-incompatible"

    def __init__(self, message: str, report: Any, stages: Sequence[Any] = ()) -> None:
        super().__init__(message, witness=getattr(report, "witness", ()))
        self.report = report
        self.stages = tuple(stages)
