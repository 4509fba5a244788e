"""Selection objectives, brute-force enumeration and random baselines.

The log-det objective of an index set is the log absolute determinant of
the corresponding principal submatrix of the projected gramian
(C W_c C* for sensors, B* W_o B for actuators).  Enumeration is
lexicographic and vectorized in batches; percentiles count values strictly
below the reference, times 100.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import balancing, gramian, matkernel, selection
from .errors import EnumerationCapError

__all__ = [
    "ObjectiveReport",
    "EnsembleStats",
    "logdet_objective",
    "trace_objective",
    "objective_report",
    "brute_force",
    "random_ensemble",
    "percentile_strictly_below",
    "rank_sweep",
]

DEFAULT_CAP = 10**6


@dataclass
class ObjectiveReport:
    """Objective values achieved by one selection."""

    logdet_sensor: float
    logdet_actuator: float
    trace_sensor: float
    selection: selection.SelectionResult
    h2_closed: float | None = None


@dataclass
class EnsembleStats:
    """Objective values of randomly sampled selections."""

    samples: np.ndarray
    mean: float
    std: float
    percentile_of_qr: float | None = None

    def percentile(self, value):
        return percentile_strictly_below(self.samples, value)


def percentile_strictly_below(values, x):
    """Fraction of `values` strictly below `x`, times 100."""
    values = np.asarray(values, dtype=float)
    return float(100.0 * np.mean(values < x))


def _principal_logdet(gram, indices):
    idx = np.asarray(indices)
    sub = gram[np.ix_(idx, idx)]
    sign, val = np.linalg.slogdet(sub)
    if sign == 0 or not np.isfinite(val):
        return -np.inf
    return float(val)


def logdet_objective(indices, gram, side="sensor"):
    """log |principal submatrix| of the projected gramian at `indices`.

    Returns -inf for a singular submatrix.  `side` is documentation only;
    pass C W_c C* for sensors and B* W_o B for actuators.
    """
    if side not in ("sensor", "actuator"):
        raise ValueError(f"unknown side {side!r}")
    gram = matkernel.as_complex(gram)
    return _principal_logdet(gram, indices)


def trace_objective(indices, gram):
    """Trace of the principal submatrix (the H2-type objective)."""
    gram = matkernel.as_complex(gram)
    idx = np.asarray(indices)
    return float(np.trace(gram[np.ix_(idx, idx)]).real)


def objective_report(sel, gram_sensor, gram_actuator, h2_closed=None):
    """Evaluate one selection against both projected gramians."""
    return ObjectiveReport(
        logdet_sensor=logdet_objective(sel.gamma, gram_sensor, "sensor"),
        logdet_actuator=logdet_objective(sel.beta, gram_actuator, "actuator"),
        trace_sensor=trace_objective(sel.gamma, gram_sensor),
        selection=sel,
        h2_closed=h2_closed,
    )


def _batched_logdets(gram, index_array, batch=50000):
    """slogdet of many principal submatrices, batched to bound memory."""
    count = index_array.shape[0]
    vals = np.empty(count)
    for s in range(0, count, batch):
        blk = index_array[s : s + batch]
        sub = gram[blk[:, :, None], blk[:, None, :]]
        sign, ld = np.linalg.slogdet(sub)
        ld = np.where(sign == 0, -np.inf, ld)
        vals[s : s + batch] = ld
    return vals


def brute_force(gram, budget, cap=DEFAULT_CAP, metric="logdet"):
    """Exhaustively enumerate all size-`budget` principal subset objectives.

    Returns (best_indices, values) where `values` lists the objective
    (log-det or trace of the principal submatrix) for every subset in
    lexicographic order.  Raises EnumerationCapError if C(p, budget)
    exceeds `cap` (sample with `random_ensemble` instead).
    """
    if metric not in ("logdet", "trace"):
        raise ValueError(f"unknown metric {metric!r}")
    gram = matkernel.as_complex(gram)
    p = gram.shape[0]
    total = math.comb(p, budget)
    if total > cap:
        raise EnumerationCapError(
            f"C({p},{budget}) = {total} exceeds the cap of {cap}; "
            "use random sampling instead"
        )
    index_array = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(p), budget)),
        dtype=np.intp,
        count=total * budget,
    ).reshape(total, budget)
    if metric == "trace":
        vals = gram.diagonal().real[index_array].sum(axis=1)
    elif not np.any(gram.imag):
        # Hermitian PSD submatrices of a real gramian are real; keep them so.
        vals = _batched_logdets(gram.real, index_array)
    else:
        vals = _batched_logdets(gram, index_array)
    best = index_array[int(np.argmax(vals))]
    return best, vals


def random_ensemble(gram, budget, count, seed, qr_value=None):
    """Uniform random index subsets (without replacement) and their log-dets."""
    if count < 1:
        raise ValueError("need at least one sample")
    gram = matkernel.as_complex(gram)
    p = gram.shape[0]
    rng = np.random.default_rng(seed)
    index_array = np.empty((count, budget), dtype=np.intp)
    for i in range(count):
        index_array[i] = rng.choice(p, size=budget, replace=False)
    if not np.any(gram.imag):
        vals = _batched_logdets(gram.real, index_array)
    else:
        vals = _batched_logdets(gram, index_array)
    pct = percentile_strictly_below(vals, qr_value) if qr_value is not None else None
    return EnsembleStats(
        samples=vals,
        mean=float(np.mean(vals)),
        std=float(np.std(vals)),
        percentile_of_qr=pct,
    )


def rank_sweep(model, ranks, count=200, seed=0):
    """QR selection vs. random ensembles across truncation ranks.

    For each rank r the QR selection uses rank-r balanced modes, and the
    combined objective (sensor log-det plus actuator log-det) is compared
    against `count` random sensor/actuator pairs.  Returns a list of dicts
    with keys r, qr_value, samples, median, percentile.
    """
    grams = gramian.compute_gramians(model)
    gram_sensor = matkernel.as_complex(model.c @ grams.w_c @ model.c.conj().T)
    gram_actuator = matkernel.as_complex(model.b.conj().T @ grams.w_o @ model.b)
    rng = np.random.default_rng(seed)
    rows = []
    for r in ranks:
        bal = balancing.balance(grams, r)
        sel = selection.select_subsets(model.c, model.b, bal.psi_r, bal.phi_r)
        qr_value = logdet_objective(sel.gamma, gram_sensor) + logdet_objective(
            sel.beta, gram_actuator, "actuator"
        )
        sub_seed = int(rng.integers(0, 2**63 - 1))
        sens = random_ensemble(gram_sensor, r, count, sub_seed)
        act = random_ensemble(gram_actuator, r, count, sub_seed + 1)
        samples = sens.samples + act.samples
        rows.append(
            {
                "r": r,
                "qr_value": qr_value,
                "samples": samples,
                "median": float(np.median(samples)),
                "percentile": percentile_strictly_below(samples, qr_value),
            }
        )
    return rows
