import json

import click

from returnlab import app
from returnlab.exceptions import NotFoundError


@app.command(name="experiments")
def list_experiments():
    """
    Lists the registered experiments, one name per line.
    """
    for name in sorted(app.experiments):
        click.echo(name)


@app.command(name="schema")
@click.argument("experiment")
def experiment_schema(experiment):
    """
    Prints the JSON schema of an experiment's config.

    Parameters:
    - experiment: Name of a registered experiment.

    Returns:
    - 0: The schema, with an example config, on stdout.
    - 1: Experiment not found.
    """
    schema = app.experiments.get(experiment)
    if schema is None:
        raise NotFoundError(
            f"Experiment {experiment!r} not found.",
            loc=["experiment"],
            ctx={"available": sorted(app.experiments)},
        )
    click.echo(json.dumps(schema.model_json_schema(), indent=2,
                          sort_keys=True))
