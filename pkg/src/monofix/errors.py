"""Structured error hierarchy shared by all modules."""


class MonofixError(Exception):
    """Base class; `code` is the CLI exit status associated with the error."""

    code = 2


class ZeroRadicand(MonofixError):
    pass


class DivisionByZero(MonofixError, ZeroDivisionError):
    pass


class ParseError(MonofixError):
    code = 4

    def __init__(self, message, line=1, col=1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class IndeterminateForm(MonofixError):
    pass


class SamplerExhausted(MonofixError):
    pass


class NotUnimodular(MonofixError):
    pass


class OrderBoundExceeded(MonofixError):
    pass


class ClosureBoundExceeded(MonofixError):
    pass


class NotTwoGroup(MonofixError):
    pass


class NotRootOfUnity(MonofixError):
    pass


class RecursionCapExceeded(MonofixError):
    pass


class AveragingDegenerate(MonofixError):
    pass


class NoInvariantFound(MonofixError):
    pass


class IdentityCheckFailed(MonofixError):
    pass


class HypothesisFailed(MonofixError):
    pass


class NoPointFound(MonofixError):
    pass


class ClassNotIdentified(MonofixError):
    pass


class RelationViolated(MonofixError):
    pass


class ConstructionFailed(MonofixError):
    """No available construction produced generators for the fixed field."""


class StrictFieldError(MonofixError):
    """A construction step needs a square root the strict field does not contain."""


class StepInvalid(MonofixError):
    code = 3

    def __init__(self, index, reason):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason


class PipelineError(MonofixError):
    """Wraps a sub-stage failure with the class label and step index."""

    def __init__(self, label, step, cause):
        super().__init__(f"[{label}] step {step}: {type(cause).__name__}: {cause}")
        self.label = label
        self.step = step
        self.cause = cause
        self.code = getattr(cause, "code", 2)
