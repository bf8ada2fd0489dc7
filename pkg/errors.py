"""
Exception hierarchy for the bundle geometry toolkit.
Library code raises these; cli.py maps them onto exit codes.
"""


class GeometryError(Exception):
    """Base class for every failure raised by the library modules."""


class DimensionMismatchError(GeometryError):
    pass


class GroupMembershipError(GeometryError):
    pass


class BranchCutError(GeometryError):
    """Logarithm or KP decomposition outside its single-valued region."""


class ConvergenceError(GeometryError):
    pass


class SingularFrameError(GeometryError):
    """alpha(x) is not an isomorphism onto the Lie algebra."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DomainError(GeometryError):
    pass


class ChartExitError(GeometryError):
    """A trajectory left the chart box; carries the last state inside."""

    def __init__(self, message, exit_time=None, last_point=None):
        super().__init__(message)
        self.exit_time = exit_time
        self.last_point = last_point


class PreconditionError(GeometryError):
    pass


class IntegratorError(GeometryError):
    pass


class ScenarioError(GeometryError):
    pass
