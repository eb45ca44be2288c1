"""Exception and warning types shared across the package."""


class ProxFlowError(Exception):
    """Base class for package errors."""


class PointOutsideDomain(ProxFlowError, ValueError):
    pass


class UnboundedDomain(ProxFlowError, ValueError):
    pass


class UnknownPotential(ProxFlowError, KeyError):
    pass


class EmptySample(ProxFlowError, ValueError):
    pass


class NonPositiveValue(ProxFlowError, ValueError):
    pass


class SolverStall(ProxFlowError, RuntimeError):
    """The transport simplex failed to produce an optimality certificate."""


class FeasibilityBreach(ProxFlowError, RuntimeError):
    """A particle left the domain after projection; indicates a bug."""


class StepTooLarge(ProxFlowError, ValueError):
    pass


class ConfigError(ProxFlowError, ValueError):
    """Invalid scenario configuration.

    ``problems`` holds ``(field, message)`` pairs, one per offending field.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"{field}: {msg}" for field, msg in self.problems]
        super().__init__("invalid configuration\n  " + "\n  ".join(lines))


class ScenarioError(ProxFlowError, RuntimeError):
    """A numeric error raised inside a scenario run, tagged with the scenario name."""


class AmbiguousProjectionWarning(UserWarning):
    """Two distinct closest points were found; a deterministic one was chosen."""


class NonProxRegularWarning(UserWarning):
    pass
