import logging

import numpy as np

from returnlab import app
from returnlab.models.report import Check, ExperimentResult
from returnlab.schemas.experiment_schema import SteinSelftestConfig
from returnlab.stein import (
    poisson_characterization_residual,
    stein_bound_pointwise,
    stein_bound_sum,
    stein_representation,
    stein_residual,
    stein_solve,
)
from returnlab.utils.rng_utils import derive_seed, make_rng


logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
REPRESENTATION_TOLERANCE = 1e-10
BOUND_SLACK = 1e-12


def _bound_violations(solution):
    """Counts of k (resp. m) where |f(k)| (resp. the partial sums) break their bound."""
    t = solution.t
    ks = np.arange(1, solution.k_max + 1)
    magnitudes = np.abs(solution.values[1:])
    pointwise = np.array([stein_bound_pointwise(t, k) for k in ks])
    sums = np.array([stein_bound_sum(t, m) for m in ks])
    partial = np.cumsum(magnitudes)
    return (
        int(np.count_nonzero(magnitudes > pointwise * (1.0 + BOUND_SLACK))),
        int(np.count_nonzero(partial > sums * (1.0 + BOUND_SLACK))),
    )


@app.experiment("stein_selftest", SteinSelftestConfig)
def stein_selftest(config):
    """
    Self-test of the Poisson Stein solver on random events.

    For every t, random events E in [0, event_max] are solved up to k_max;
    the residual of the Stein equation, the pointwise and summed bounds on
    |f| and the Poisson characterization are checked, and the tabulated
    solution of the first event is compared with both closed forms at high
    precision.
    """
    rows, representations = [], []
    worst = {"residual": 0.0, "characterization": 0.0, "representation": 0.0}
    violations = {"pointwise": 0, "sum": 0}
    for j, t in enumerate(config.t_values):
        rng = make_rng(derive_seed(config.seeds[0], j))
        first = None
        for e in range(config.events):
            event = np.flatnonzero(rng.random(config.event_max + 1) < 0.5)
            solution = stein_solve(t, event, config.k_max)
            residual = stein_residual(solution)
            characterization = abs(
                poisson_characterization_residual(t, solution.values)
            )
            pointwise, summed = _bound_violations(solution)
            violations["pointwise"] += pointwise
            violations["sum"] += summed
            worst["residual"] = max(worst["residual"], residual)
            worst["characterization"] = max(
                worst["characterization"], characterization
            )
            rows.append(
                [t, e, int(event.size), solution.mu0_event, residual,
                 characterization, float(np.abs(solution.values).max()),
                 pointwise, summed]
            )
            if first is None:
                first = solution
        for k in config.reference_points:
            if not 1 <= k <= first.k_max:
                continue
            finite = stein_representation(t, first.event, k, "finite")
            tail = stein_representation(t, first.event, k, "tail")
            gap = max(abs(finite - tail), abs(first.values[k] - tail))
            worst["representation"] = max(worst["representation"], gap)
            representations.append(
                {"t": t, "k": k, "finite": finite, "tail": tail,
                 "tabulated": float(first.values[k])}
            )
    logger.info("Stein self-test: worst %s, violations %s", worst, violations)

    checks = [
        Check("max_residual", worst["residual"], upper=RESIDUAL_TOLERANCE),
        Check("max_characterization_residual", worst["characterization"],
              upper=RESIDUAL_TOLERANCE),
        Check("pointwise_bound_violations", violations["pointwise"], upper=0),
        Check("sum_bound_violations", violations["sum"], upper=0),
        Check("representation_gap", worst["representation"],
              upper=REPRESENTATION_TOLERANCE),
    ]
    return ExperimentResult(
        header=["t", "event", "size", "mu0_event", "residual",
                "characterization", "max_abs_f", "pointwise_violations",
                "sum_violations"],
        rows=rows,
        summary={"worst": worst, "violations": violations,
                 "representations": representations},
        checks=checks,
    )
