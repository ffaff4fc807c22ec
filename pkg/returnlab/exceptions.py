class LabError(Exception):
    """
    Base error raised by the laboratory.

    Carries the same three pieces of information as the error payload
    described by ValidationErrorSchema, so that error_handlers can turn any
    raised error into a structured response without inspecting messages.

    Attributes:
        loc (list[str]): The location of the error (e.g., parameter name).
        msg (str): A computer-readable message describing the error.
        type_ (str): The category of the error.
    """

    type_ = "lab_error"

    def __init__(self, msg, loc=None, ctx=None):
        super().__init__(msg)
        self.msg = msg
        self.loc = list(loc) if loc else ["input"]
        self.ctx = ctx

    def to_dict(self):
        """
        Converts the error into the error payload format.

        Returns:
            dict: The error attributes with keys 'ctx', 'loc', 'msg' and
                  'type_'.
        """
        return {
            "ctx": self.ctx,
            "loc": self.loc,
            "msg": self.msg,
            "type_": self.type_,
        }


class InvalidInputError(LabError, ValueError):
    """A precondition of an operation does not hold."""

    type_ = "validation_error"


class NotFoundError(LabError):
    """A referenced experiment, file or map does not exist."""

    type_ = "not_found"


class UnsatisfiableConstraintError(LabError):
    """Cylinder selection rejected too many candidates."""

    type_ = "constraint_error"


class EnumerationCapError(LabError):
    """An exhaustive enumeration would exceed its size cap."""

    type_ = "capacity_error"


class ConvergenceError(LabError):
    """An iterative method did not converge within its step budget."""

    type_ = "convergence_error"


class SimulationError(LabError):
    """A simulated orbit left the region where it can be classified."""

    type_ = "simulation_error"


class AcceptanceError(LabError):
    """A run under --check missed one of its acceptance thresholds."""

    type_ = "acceptance_error"
