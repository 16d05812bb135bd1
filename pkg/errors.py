"""
Error Types
Exception hierarchy shared by the solvers, the loaders and the CLI
"""
from typing import Optional


class HallMatchingError(Exception):
    """Root of every error raised by this project"""

    code = "hall-matching"

    def __init__(self, message: str, context: Optional[str] = None):
        self.context = context
        if context:
            message = f"{context}: {message}"
        super().__init__(message)


class InputError(HallMatchingError, ValueError):
    """Bad input: the caller can fix it"""

    code = "input"


class InvariantViolationError(HallMatchingError, RuntimeError):
    """A property the construction guarantees did not hold"""

    code = "invariant-violation"


class ConfigError(InputError):
    code = "config"


class MalformedRationalError(InputError):
    code = "malformed-rational"


class InvalidIntervalError(InputError):
    code = "invalid-interval"


class DemandExceedsMeasureError(InputError):
    code = "demand-exceeds-measure"


class PartitionSumMismatchError(InputError):
    code = "partition-sum-mismatch"


class NonpositivePartError(InputError):
    code = "nonpositive-part"


class NotASubsetError(InputError):
    code = "not-a-subset"


class EmptyInstanceError(InputError):
    code = "empty-instance"


class EmptySubsetError(InputError):
    code = "empty-subset"


class InstanceTooLargeError(InputError):
    code = "instance-too-large"


class NonpositiveDemandError(InputError):
    code = "nonpositive-demand"


class NonpositiveScaleError(InputError):
    code = "nonpositive-scale"


class NonpositiveXiError(InputError):
    code = "nonpositive-xi"


class BlockMeasureMismatchError(InputError):
    code = "block-measure-mismatch"


class BlockOverlapError(InputError):
    code = "block-overlap"


class InstanceFormatError(InputError):
    """Malformed instance/allocation file; context names the line or field"""

    code = "malformed-instance"


class OracleScaleError(InputError):
    code = "oracle-scale"


class InstanceMismatchError(InputError):
    code = "instance-mismatch"


class StageNotSolvableError(InputError):
    """Stage has a nonpositive demand or its instance violates the condition"""

    code = "stage-not-solvable"


class InfeasibleInstanceError(InputError):
    code = "instance-infeasible"


class NestingInfeasibleError(InvariantViolationError):
    """Incremental refinement step could not extend the previous stage"""

    code = "nesting-infeasible"

    def __init__(self, message: str, stage_index: int, dump: Optional[dict] = None):
        self.stage_index = stage_index
        self.dump = dump or {}
        super().__init__(message, context=f"stage {stage_index}")
