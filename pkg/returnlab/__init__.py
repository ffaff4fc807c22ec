"""
This module initializes the command group shared by every experiment.

Route modules register their commands on it, error_handlers registers the
error handlers, and app.py configures logging and runs it.
"""

from returnlab.utils.cli_utils import LabGroup

# Initialize the command group for the experiment commands
app = LabGroup(
    name="returnlab",
    help=(
        "Return-time statistics laboratory: Poisson and Erlang limit laws "
        "of cylinder returns, Stein-method checks, mixing coefficients, "
        "error bounds and Markov towers."
    ),
)
