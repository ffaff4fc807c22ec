import logging
import math

import numpy as np

from returnlab import app
from returnlab.counting import (
    count_visits,
    default_t_grid,
    harvest_count_law,
    harvest_return_law,
    kac_statistic,
    ks_distance,
    neighbor_frequencies,
    survival_curve,
    sup_deviation,
    tv_distance,
)
from returnlab.cylinders import (
    empirical_standard_error,
    measure,
    parse_word,
    recurrence_time,
    select_test_cylinders,
)
from returnlab.dynamics import DoublingSource
from returnlab.exceptions import InvalidInputError
from returnlab.models.measure import Empirical
from returnlab.models.report import Check, ExperimentResult
from returnlab.schemas.experiment_schema import (
    CountLawConfig,
    PeriodicCounterexampleConfig,
    ReturnLawConfig,
)
from returnlab.stein import erlang_tail, poisson_pmf_array, stein_distance
from returnlab.tower import poisson_regime
from returnlab.utils.rng_utils import derive_seed


logger = logging.getLogger(__name__)

FIRST_RETURN_TOLERANCE = 0.02
HIGHER_RETURN_TOLERANCE = 0.03
KAC_RANGE = (0.98, 1.02)
STEIN_IDENTITY_TOLERANCE = 1e-10
# Neighbour statistics are read off one window this many times longer
NEIGHBOR_WINDOW_FACTOR = 100


def _pooled(laws):
    pooled = laws[0]
    for law in laws[1:]:
        pooled = pooled.merge(law)
    return pooled


def _cylinder_model(config, source):
    """Measure the test cylinders are drawn from, and their admissibility."""
    if source.name == "gw":
        if not poisson_regime(config.system.alpha):
            raise InvalidInputError(
                "Return laws of the Gaspard-Wang map are only tested for "
                f"alpha in (0, 1/3), got {config.system.alpha}.",
                loc=["system", "alpha"],
            )
        if config.mode != "stream":
            raise InvalidInputError(
                "The Gaspard-Wang map is harvested in stream mode.",
                loc=["mode"],
            )
        reference = source.stream(
            config.reference_length, derive_seed(config.seeds[0], 0)
        )
        return Empirical(reference), None
    if source.name == "sft":
        return source.model, source.system
    return source.model, None


@app.experiment("return_law", ReturnLawConfig)
def return_law(config):
    """
    Rescaled k-th return times of random cylinders against the Erlang tails.

    Cylinders of length n with r_A above the threshold are drawn from the
    system's measure; for each one and each k the law of mu(A) tau^k under
    P_A is harvested over all seeds, and its survival curve is compared with
    sum_{i<k} e^{-t} t^i / i!. First returns are also scored by Kac's lemma.
    """
    source = config.system.to_source()
    t_grid = (
        np.asarray(config.t_grid) if config.t_grid else default_t_grid()
    )
    model, system = _cylinder_model(config, source)
    selected = select_test_cylinders(
        config.n,
        config.cylinders,
        model,
        derive_seed(config.seeds[0], 1),
        constraint=config.min_recurrence,
        system=system,
    )
    exact = source.model is not None

    rows, cylinders, checks = [], [], []
    for j, cylinder in enumerate(selected):
        label = cylinder.word.format(source.alphabet_size)
        laws = {}
        for k in config.k_values:
            law = _pooled(
                [
                    harvest_return_law(
                        source,
                        cylinder.word,
                        k,
                        config.samples,
                        derive_seed(seed, 2, j, k),
                        mode=config.mode,
                        mu_A=None if exact else cylinder.mu,
                    )
                    for seed in config.seeds
                ]
            )
            survival = survival_curve(law, t_grid)
            for t, observed in zip(t_grid, survival):
                limit = erlang_tail(t, k)
                rows.append(
                    [label, k, float(t), float(observed), limit,
                     abs(float(observed) - limit)]
                )
            deviation = sup_deviation(law, t_grid, k)
            entry = {
                "samples": law.size,
                "mean": law.mean(),
                "sup_deviation": deviation,
            }
            tolerance = (
                FIRST_RETURN_TOLERANCE if k == 1 else HIGHER_RETURN_TOLERANCE
            )
            checks.append(
                Check(f"sup_deviation[{label},k={k}]", deviation,
                      upper=tolerance)
            )
            if k == 1:
                entry["ks_distance"] = ks_distance(law)
                entry["kac"] = kac_statistic(law)
                checks.append(
                    Check(f"kac[{label}]", entry["kac"], *KAC_RANGE)
                )
            laws[str(k)] = entry
            logger.info(
                "Cylinder %s k=%d: sup deviation %.4f", label, k, deviation
            )
        report = {**cylinder.to_dict(), "laws": laws}
        if not exact:
            report["mu_A_standard_error"] = empirical_standard_error(
                cylinder.mu, model.reference.length - config.n + 1
            )
        cylinders.append(report)

    return ExperimentResult(
        header=["word", "k", "t", "survival", "erlang_tail", "abs_diff"],
        rows=rows,
        summary={
            "system": source.name,
            "n": config.n,
            "t_grid": t_grid.tolist(),
            "cylinders": cylinders,
        },
        checks=checks,
    )


def _count_law_report(source, word, t, samples, seeds, mode, salt):
    """Pooled count law of W_m, m = floor(t / mu(A)), with its distances."""
    mu = measure(word, source.model)
    if mu <= 0:
        raise InvalidInputError(f"Word {word} has measure 0.", loc=["words"])
    m = int(math.floor(t / mu))
    if m < 1:
        raise InvalidInputError(
            f"t = {t} is below mu(A) = {mu} for word {word}.", loc=["t"]
        )
    law = _pooled(
        [
            harvest_count_law(
                source, word, m, samples, derive_seed(seed, salt), mode=mode
            )
            for seed in seeds
        ]
    )
    t_hat = m * mu
    direct, through_stein = stein_distance(law, t_hat, {0})
    counts = law.samples.astype(np.int64)
    report = {
        "word": word.format(source.alphabet_size),
        "mu_A": mu,
        "m": m,
        "t": t_hat,
        "samples": law.size,
        "mean": law.mean(),
        "variance": float(counts.var()),
        "tv_poisson_t": tv_distance(law, t_hat),
        "tv_matched_mean": tv_distance(law),
        "stein_direct": direct,
        "stein_operator": through_stein,
    }
    try:
        report["r_A"] = recurrence_time(word, source.transition)
    except InvalidInputError:
        report["r_A"] = None
    return law, report


def _pmf_rows(label, law, t):
    counts = law.samples.astype(np.int64)
    top = int(counts.max())
    empirical = np.bincount(counts, minlength=top + 1) / counts.size
    poisson = poisson_pmf_array(t, top)
    matched = poisson_pmf_array(max(law.mean(), 1e-12), top)
    return [
        [label, w, float(empirical[w]), float(poisson[w]), float(matched[w])]
        for w in range(top + 1)
    ]


PMF_HEADER = ["word", "w", "empirical", "poisson_t", "poisson_matched"]


@app.experiment("count_law", CountLawConfig)
def count_law(config):
    """
    Visit counts W_m of given cylinders against Poisson(t).

    Reports the total variation to Poisson(t) and to the matched-mean
    Poisson law, and both sides of the Stein identity for the event {0}.
    """
    source = config.system.to_source()
    if source.model is None:
        raise InvalidInputError(
            "Count laws need a system with an exact measure.",
            loc=["system"],
        )
    rows, reports, checks = [], [], []
    for j, text in enumerate(config.words):
        word = parse_word(text)
        law, report = _count_law_report(
            source, word, config.t, config.samples, config.seeds,
            config.mode, j,
        )
        rows.extend(_pmf_rows(report["word"], law, report["t"]))
        reports.append(report)
        checks.append(
            Check(
                f"stein_identity[{report['word']}]",
                abs(report["stein_direct"] - report["stein_operator"]),
                upper=STEIN_IDENTITY_TOLERANCE,
            )
        )
        if config.max_tv is not None:
            checks.append(
                Check(f"tv_poisson_t[{report['word']}]",
                      report["tv_poisson_t"], upper=config.max_tv)
            )
    return ExperimentResult(
        header=PMF_HEADER,
        rows=rows,
        summary={"system": source.name, "words": reports},
        checks=checks,
    )


@app.experiment("periodic_counterexample", PeriodicCounterexampleConfig)
def periodic_counterexample(config):
    """
    Clustered visits of a periodic cylinder against a control cylinder.

    A word with r_A = 1 returns in runs, so its visit count is compound
    Poisson and sits far from the matched-mean Poisson law; the control
    word with r_A > n/2 does not.
    """
    source = DoublingSource()
    rows, reports = [], {}
    for role, text in (("periodic", config.periodic_word),
                       ("control", config.control_word)):
        word = parse_word(text)
        salt = 0 if role == "periodic" else 1
        law, report = _count_law_report(
            source, word, config.t, config.samples, config.seeds, "blocks",
            salt,
        )
        report["dispersion"] = (
            report["variance"] / report["mean"] if report["mean"] else None
        )
        window = NEIGHBOR_WINDOW_FACTOR * report["m"]
        stream = source.stream(
            window + word.n, derive_seed(config.seeds[0], 2, salt)
        )
        record = count_visits(stream, word, window)
        b_minus, b_plus = neighbor_frequencies(record, word.n)
        report["neighbors"] = {
            "window": window,
            "visits": record.w_m,
            "b_minus": b_minus,
            "b_plus": b_plus,
        }
        rows.extend(_pmf_rows(report["word"], law, report["t"]))
        reports[role] = report

    checks = [
        Check(
            "tv_matched_mean[periodic]",
            reports["periodic"]["tv_matched_mean"],
            lower=config.min_tv,
        )
    ]
    return ExperimentResult(
        header=PMF_HEADER, rows=rows, summary=reports, checks=checks
    )
