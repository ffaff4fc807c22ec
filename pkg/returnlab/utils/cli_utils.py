import json
import logging
from pathlib import Path

import click

from returnlab.exceptions import AcceptanceError
from returnlab.utils.report_utils import (
    atomic_write,
    canonical_json,
    config_hash,
    csv_text,
    load_json,
)
from returnlab.utils.rng_utils import RNG_ALGORITHM


logger = logging.getLogger(__name__)

DEFAULT_OUT = "results"


class LabGroup(click.Group):
    """
    Command group with an error handler registry.

    Handlers registered with `errorhandler(ExceptionType)` receive the raised
    error and return (payload, exit_code); the payload is printed as JSON on
    stderr and the process exits with that code. Experiments registered with
    `experiment` share the --config, --out, --check and --seed-override
    options and the artifact writer.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.error_handlers = {}
        self.experiments = {}

    def errorhandler(self, exc_type):
        def decorator(func):
            self.error_handlers[exc_type] = func
            return func

        return decorator

    def handler_for(self, error):
        for klass in type(error).__mro__:
            if klass in self.error_handlers:
                return self.error_handlers[klass]
        return None

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.exceptions.Exit:
            raise
        except Exception as error:
            handler = self.handler_for(error)
            if handler is None:
                raise
            payload, code = handler(error)
            click.echo(json.dumps(payload, sort_keys=True), err=True)
            ctx.exit(code)

    def experiment(self, name, schema):
        """
        Register `func(config) -> ExperimentResult` as an experiment command.

        Parameters:
        - name: Subcommand and default artifact name.
        - schema: pydantic model the JSON config is validated against.
        """

        def decorator(func):
            @self.command(name=name, help=func.__doc__)
            @click.option(
                "--config",
                "config_path",
                required=True,
                help="JSON config of the experiment.",
            )
            @click.option(
                "--out",
                default=None,
                help=f"Output directory (default: config 'out' or "
                f"'{DEFAULT_OUT}').",
            )
            @click.option(
                "--check",
                is_flag=True,
                help="Exit with code 2 when an acceptance threshold fails.",
            )
            @click.option(
                "--seed-override",
                type=int,
                default=None,
                help="Replace the config's seed list by this single seed.",
            )
            def command(config_path, out, check, seed_override):
                config = load_config(schema, config_path, out, seed_override)
                result = func(config)
                paths = write_artifacts(config, result)
                for check_item in result.checks:
                    colour = "green" if check_item.passed else "red"
                    click.echo(
                        click.style(
                            f"{'PASS' if check_item.passed else 'FAIL'} "
                            f"{check_item.name} = {check_item.value:.6g}",
                            fg=colour,
                        )
                    )
                for path in paths:
                    click.echo(str(path))
                if check and not result.passed:
                    raise AcceptanceError(
                        f"{len(result.failed_checks())} acceptance "
                        "threshold(s) missed.",
                        loc=["check"],
                        ctx={
                            "failed": [
                                item.to_dict()
                                for item in result.failed_checks()
                            ]
                        },
                    )

            self.experiments[name] = schema
            return func

        return decorator


def load_config(schema, path, out=None, seed_override=None):
    """
    Read and validate an experiment config.

    --out and --seed-override are written into the document before
    validation, so the resolved config embedded in the summary shows them.
    """
    raw = load_json(path)
    if out is not None:
        raw["out"] = out
    if seed_override is not None:
        raw["seeds"] = [seed_override]
    return schema.model_validate(raw)


def artifact_paths(config):
    name = config.name or config.experiment
    directory = Path(config.out or DEFAULT_OUT)
    return (
        directory / f"{name}.samples.csv",
        directory / f"{name}.summary.json",
    )


def write_artifacts(config, result):
    """
    Write <name>.samples.csv and <name>.summary.json once, at the end.

    Returns:
        tuple: The two paths.
    """
    resolved = config.model_dump(mode="json")
    digest = config_hash(resolved)
    csv_path, json_path = artifact_paths(config)
    summary = {
        "experiment": config.experiment,
        "config": resolved,
        "config_hash": digest,
        "rng": RNG_ALGORITHM,
        "seeds": list(config.seeds),
        "results": result.summary,
        "checks": [check.to_dict() for check in result.checks],
        "passed": result.passed,
    }
    metadata = {"experiment": config.experiment, "config_hash": digest}
    atomic_write(csv_path, csv_text(result.header, result.rows, metadata))
    atomic_write(json_path, canonical_json(summary))
    logger.info("Wrote %s and %s", csv_path, json_path)
    return csv_path, json_path
