import json

from pydantic import ValidationError

from returnlab.exceptions import AcceptanceError, LabError
from returnlab.schemas.error_schema import ValidationErrorSchema


def _payload(**fields):
    return ValidationErrorSchema(**fields).model_dump()


def register_error_handlers(app):
    """
    Registers the error handlers of the experiment commands.

    Every handler turns a raised error into a structured payload in line
    with the ValidationErrorSchema, printed on stderr, and an exit code.

    Parameters:
    - app: The LabGroup instance to register error handlers with.
    """

    @app.errorhandler(LabError)
    def lab_error(error):
        """
        Handles errors raised by the laboratory.

        Returns:
        - 1: The error's own loc, msg and type_.
        """
        return _payload(**error.to_dict()), 1

    @app.errorhandler(AcceptanceError)
    def acceptance_error(error):
        """
        Handles runs under --check that missed a threshold.

        Returns:
        - 2: Acceptance error listing the failed checks.
        """
        return _payload(**error.to_dict()), 2

    @app.errorhandler(ValidationError)
    def config_validation_error(error):
        """
        Handles configs rejected by their pydantic schema.

        Returns:
        - 1: Validation error located at the first offending field.
        """
        first = error.errors()[0]
        return _payload(
            loc=[str(part) for part in first["loc"]] or ["config"],
            msg=first["msg"],
            type_="validation_error",
            ctx={"errors": error.error_count()},
        ), 1

    @app.errorhandler(json.JSONDecodeError)
    def malformed_config(error):
        """
        Handles config files that are not valid JSON.

        Returns:
        - 1: Validation error with the position of the syntax error.
        """
        return _payload(
            loc=["config"],
            msg=f"Config is not valid JSON: {error.msg}.",
            type_="validation_error",
            ctx={"line": error.lineno, "column": error.colno},
        ), 1
