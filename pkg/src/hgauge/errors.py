"""Exception hierarchy shared by all modules."""


class HGaugeError(Exception):
    """Base class for library errors."""


class NonConvergent(HGaugeError):
    pass


class OutOfChart(HGaugeError):
    pass


class SpanViolation(HGaugeError):
    pass


class NotComposable(HGaugeError):
    pass


class NotAnAction(HGaugeError):
    pass


class GroupMismatch(HGaugeError):
    pass


class IncoherentData(HGaugeError):
    """Raised when pseudo-bundle data fails a coherence property."""

    def __init__(self, label, residual):
        super().__init__(f"coherence property ({label}) fails with residual {residual:.3e}")
        self.label = label
        self.residual = residual


class DivisionFailure(HGaugeError):
    pass


class NotASection(HGaugeError):
    pass


class EquivarianceFailure(HGaugeError):
    pass


class HypothesisFailure(HGaugeError):
    pass


class EndpointMismatch(HGaugeError):
    def __init__(self, index, residual):
        super().__init__(f"endpoint mismatch at index {index} (residual {residual:.3e})")
        self.index = index
        self.residual = residual


class NotConstant(HGaugeError):
    pass


class NotIdentity(HGaugeError):
    pass


class SourceMismatch(HGaugeError):
    pass


class BoundaryMismatch(HGaugeError):
    pass


class FiberMismatch(HGaugeError):
    def __init__(self, message, stage=None):
        super().__init__(message if stage is None else f"stage {stage}: {message}")
        self.stage = stage


class ProbeDisagreement(HGaugeError):
    pass


class NonFiniteState(HGaugeError):
    pass


class ActionInvalid(HGaugeError):
    pass


class SchemaError(HGaugeError):
    pass


class BuildError(HGaugeError):
    pass


class SuiteFailure(HGaugeError):
    pass
