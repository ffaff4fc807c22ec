import logging

import click
import colorama

from returnlab import app
from error_handlers import register_error_handlers


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Register the error handlers with the command group
register_error_handlers(app)

# Importing routes
from returnlab.routes.home_routes import *
from returnlab.routes.return_routes import *
from returnlab.routes.stein_routes import *
from returnlab.routes.bound_routes import *
from returnlab.routes.tower_routes import *


def create_app(verbose=False):
    """
    Factory function to configure the experiment command group.

    This function sets up logging on stderr and enables ANSI colours on
    Windows consoles for the PASS/FAIL lines.

    Returns:
        LabGroup: The configured command group.
    """
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        force=True,
    )
    colorama.just_fix_windows_console()
    return app


def main(verbose):
    create_app(verbose)


# Group-level -v/--verbose, run before any subcommand
app.params.append(
    click.Option(["-v", "--verbose"], is_flag=True, help="Debug logging.")
)
app.callback = main


if __name__ == "__main__":
    app()
