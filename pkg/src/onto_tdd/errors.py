class EngineError(Exception):
    """The reasoner could not produce an answer (limits, timeouts, unsupported input)."""


class NonRegularChainError(EngineError):
    pass


class NodeLimitExceeded(EngineError):
    pass


class ReasonerTimeout(EngineError):
    pass


class FragmentViolation(EngineError):
    pass


class InconsistentOntologyError(Exception):
    """Raised where an answer over an inconsistent ontology would be meaningless."""

    def __init__(self, message: str = "inconsistent ontology"):
        super().__init__(message)


class MockLeakError(Exception):
    pass
