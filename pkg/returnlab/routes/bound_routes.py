import logging

import numpy as np

from returnlab import app
from returnlab.bounds import (
    bound_input_for_word,
    cylinder_lemma_bound,
    optimize_gap,
    recurrence_lemma_bound,
    shifted_return_lemma_bound,
    theorem1_bound,
    theorem2_rate,
    young_optimize_gap,
    young_prescribed_gap,
    young_rate,
)
from returnlab.cylinders import (
    enumerate_words,
    measure,
    return_probability_exact,
    self_intersection_measure,
    shifted_return_probability_exact,
)
from returnlab.exceptions import InvalidInputError
from returnlab.mixing import mixing_table
from returnlab.models.mixing_profile import Exponential, Polynomial
from returnlab.models.report import Check, ExperimentResult
from returnlab.models.word import Word
from returnlab.schemas.experiment_schema import (
    BoundTableConfig,
    LemmaCheckConfig,
)


logger = logging.getLogger(__name__)

RATE_R_SQUARED = 0.99
# Relative slack for rounding when comparing exact values with bounds
LEMMA_SLACK = 1e-12
MIXING_TABLE_K = 8

BREAKDOWN_KEYS = (
    "delta_mu",
    "n_delta_n",
    "n_delta_rA",
    "alpha_bar",
    "alpha_over_mu",
    "log_factor",
)


def _exact_model(source):
    if source.model is None:
        raise InvalidInputError(
            "This experiment needs a system with an exact measure.",
            loc=["system"],
        )
    return source.model, getattr(source, "system", None)


def _evaluate(inp, epsilon):
    """optimize_gap where a gap prescription exists, else the bound at 1."""
    if isinstance(inp.profile, (Exponential, Polynomial)):
        return optimize_gap(inp, epsilon)
    return theorem1_bound(inp, 1)


@app.experiment("bound_table", BoundTableConfig)
def bound_table(config):
    """
    Constant-free Poisson error bounds with their optimized gaps.

    The bound is tabulated on the cylinders 0^{n-1}1 of the configured
    system at the prescribed and at the grid-optimal gap, the rate family of
    the profile is identified, and optional given-quantity and tower cases
    are evaluated. Values certify rates, not absolute sizes.
    """
    source = config.system.to_source()
    model, system = _exact_model(source)
    profile = config.profile.to_model()

    rows, table = [], []
    for n in config.n_values:
        word = Word((0,) * (n - 1) + (1,))
        inp = bound_input_for_word(
            word, config.t, profile, model, eta=config.eta, system=system
        )
        report = _evaluate(inp, config.epsilon)
        rows.append(
            [n, word.format(source.alphabet_size), inp.mu_A, inp.r_A,
             report.delta_star, report.value,
             report.extra.get("grid_gap", report.delta_star),
             report.extra.get("grid_value", report.value)]
            + [report.breakdown[key] for key in BREAKDOWN_KEYS]
        )
        table.append({"input": inp.to_dict(), "report": report.to_dict()})

    summary = {"system": source.name, "profile": profile.to_dict(),
               "table": table}
    checks = []
    if isinstance(profile, (Exponential, Polynomial)):
        rate = theorem2_rate(config.n_values, config.eta, profile,
                             t=config.t, epsilon=config.epsilon)
        summary["rate"] = rate.to_dict()
        if rate.family == "exponential":
            checks.append(
                Check("rate_r_squared", rate.r_squared, lower=RATE_R_SQUARED)
            )

    summary["cases"] = [
        _evaluate(case.to_input(), config.epsilon).to_dict()
        for case in config.cases
    ]
    if config.tower is not None:
        inp = config.tower.to_input()
        decay = inp.profile
        best = young_optimize_gap(inp, decay)
        summary["tower"] = {
            "input": inp.to_dict(),
            "grid": best.to_dict(),
            "prescribed_gap": young_prescribed_gap(
                config.tower.n, config.tower.rho, decay
            ),
            "rate": young_rate(
                config.tower.n, config.tower.rho, decay, config.tower.t
            ),
        }

    return ExperimentResult(
        header=["n", "word", "mu_A", "r_A", "delta", "value", "grid_delta",
                "grid_value", *BREAKDOWN_KEYS],
        rows=rows,
        summary=summary,
        checks=checks,
    )


def _violated(exact, bound):
    return exact > bound * (1.0 + LEMMA_SLACK)


@app.experiment("lemma_check", LemmaCheckConfig)
def lemma_check(config):
    """
    Exhaustive check of the cylinder lemmas on every short word.

    For all admissible words up to length max_n, exact values of
    mu(A intersect T^{-k} A), P_A(tau_A <= t) and P_A(tau_A o T^{n-1} <= M)
    are compared with mu(A) delta_A(k), the recurrence estimate and the
    shifted-return estimate under each configured profile.
    """
    source = config.system.to_source()
    model, system = _exact_model(source)
    transition = getattr(system, "transition", None)
    profiles = [schema.to_model() for schema in config.profiles]
    ks = range(1, config.k_max + 1)
    ts = range(1, config.t_max + 1)
    ms = range(1, config.m_max + 1)

    rows = []
    violations = {"cylinder": 0, "recurrence": 0, "shifted_return": 0}
    words_checked = 0
    for n in range(1, config.max_n + 1):
        for word in enumerate_words(n, source.alphabet_size, transition):
            if measure(word, model) <= 0:
                continue
            words_checked += 1
            label = word.format(source.alphabet_size)
            exact = {
                "cylinder": [self_intersection_measure(word, k, model)
                             for k in ks],
                "recurrence": [return_probability_exact(word, t, model)
                               for t in ts],
                "shifted_return": [
                    shifted_return_probability_exact(word, m, model)
                    for m in ms
                ],
            }
            for profile in profiles:
                bounds = {
                    "cylinder": [
                        cylinder_lemma_bound(word, k, profile, model)
                        for k in ks
                    ],
                    "recurrence": [
                        recurrence_lemma_bound(word, t, profile, model,
                                               system=system)
                        for t in ts
                    ],
                    "shifted_return": [
                        shifted_return_lemma_bound(word, m, profile, model)
                        for m in ms
                    ],
                }
                for lemma, steps in (("cylinder", ks), ("recurrence", ts),
                                     ("shifted_return", ms)):
                    for step, value, bound in zip(
                        steps, exact[lemma], bounds[lemma]
                    ):
                        bad = _violated(value, bound)
                        violations[lemma] += int(bad)
                        rows.append([lemma, profile.kind, label, step, value,
                                     bound, not bad])
    logger.info("Checked %d words, violations %s", words_checked, violations)

    summary = {
        "system": source.name,
        "words_checked": words_checked,
        "violations": violations,
        "profiles": [profile.to_dict() for profile in profiles],
        "alpha_empirical": np.asarray(
            mixing_table(model, 1, MIXING_TABLE_K).values
        ).tolist(),
    }
    checks = [
        Check(f"violations[{lemma}]", count, upper=0)
        for lemma, count in violations.items()
    ]
    return ExperimentResult(
        header=["lemma", "profile", "word", "step", "exact", "bound", "holds"],
        rows=rows,
        summary=summary,
        checks=checks,
    )
