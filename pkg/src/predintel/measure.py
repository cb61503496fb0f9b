"""Prediction-match scoring and the intelligence aggregation pipeline.

The pipeline turns logged prediction events into a single intelligence value:

1. score each prediction against the state that finally occurred (Hellinger
   match for discrete sensors, a t-test for continuous values), corrected for
   what a random guesser would have scored;
2. sum scores over all states and time-indexed predictions of one umwelt;
3. weight the sum by the compressibility of the prediction string;
4. combine umwelts with a joint-complexity factor so near-duplicate umwelts
   are not double counted;
5. take log2, clamped to zero at a total match of one or below.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

from .complexity import JOINT_SEPARATOR, CompressorSpec, k_hat, k_ratio
from .types import (
    CategoricalDistribution,
    ContinuousEnsemblePrediction,
    LabelMismatchError,
    MeasurementResult,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

DEFAULT_ALPHA = 0.05

#: Tolerance for "observed equals ensemble mean" when the ensemble std is zero
#: and the t statistic is undefined; the match is then the pointwise limit.
DEGENERATE_STD_TOL = 1e-9

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

RPolicy = Callable[[int, tuple[str, ...]], CategoricalDistribution]


def uniform_r_policy(dim: int, labels: tuple[str, ...]) -> CategoricalDistribution:
    """Default random-guess baseline: equal probability over the dimension's
    full label alphabet."""
    return CategoricalDistribution.uniform(labels)


def _aligned_probs(p: CategoricalDistribution, q: CategoricalDistribution):
    if p.labels == q.labels:
        return p.probs, q.probs
    if set(p.labels) != set(q.labels):
        raise LabelMismatchError(f"label sets differ: {p.labels} vs {q.labels}")
    by_label = dict(zip(q.labels, q.probs))
    return p.probs, tuple(by_label[lab] for lab in p.labels)


def hellinger(p: CategoricalDistribution, q: CategoricalDistribution) -> float:
    """Hellinger distance between two categorical distributions, in [0, 1].

    0 iff the distributions are identical, 1 iff their supports are disjoint.
    Distributions are aligned by label, not by position.
    """
    pp, qp = _aligned_probs(p, q)
    total = math.fsum((math.sqrt(a) - math.sqrt(b)) ** 2 for a, b in zip(pp, qp))
    return min(1.0, _INV_SQRT2 * math.sqrt(total))


def degree_of_match(p: CategoricalDistribution, q: CategoricalDistribution) -> float:
    """1 minus the Hellinger distance: 1 for identical, 0 for disjoint."""
    return 1.0 - hellinger(p, q)


def pm_discrete(
    p: CategoricalDistribution,
    u: CategoricalDistribution,
    r: CategoricalDistribution,
) -> float:
    """Random-guess-corrected match between prediction ``p`` and final state ``u``.

    ``r`` is the random-guess baseline (uniform unless the caller overrides).
    The absolute value is kept exactly as defined, so a prediction that is
    maximally wrong relative to random still scores positively.
    """
    return abs(degree_of_match(p, u) - degree_of_match(r, u))


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the regularized incomplete beta (modified
    # Lentz's method).
    max_iter, eps, fpmin = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _betainc_reg(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def two_tailed_t_p(t: float, df: int) -> float:
    """Two-tailed p-value of a Student's t statistic with ``df`` degrees of
    freedom, via the regularized incomplete beta function."""
    if df < 1:
        raise ValidationError(f"degrees of freedom must be >= 1, got {df}")
    if not math.isfinite(t):
        raise ValidationError(f"t statistic must be finite, got {t}")
    return _betainc_reg(df / 2.0, 0.5, df / (df + t * t))


def pm_continuous(
    pred: ContinuousEnsemblePrediction,
    observed: float,
    alpha: float = DEFAULT_ALPHA,
) -> int:
    """Binary match for a continuous prediction via a one-sample t-test.

    The observed value is tested against the ensemble's normal summary;
    accepting the null hypothesis (p >= alpha) counts as a match of 1,
    rejecting it as 0. No random-guess subtraction: a random guesser has a
    near-zero chance of hitting a particular real value.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")
    if pred.std == 0.0:
        return 1 if abs(observed - pred.mean) <= DEGENERATE_STD_TOL else 0
    t = (observed - pred.mean) / (pred.std / math.sqrt(pred.n))
    return 1 if two_tailed_t_p(t, pred.n - 1) >= alpha else 0


def event_pm(
    event: PredictionEvent,
    r_policy: RPolicy = uniform_r_policy,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """Prediction match of a single event.

    A discrete event with d sensor dimensions contributes the sum of the d
    per-dimension corrected matches; a continuous event contributes its
    binary t-test match.
    """
    if event.is_continuous:
        return float(pm_continuous(event.prediction, event.outcome, alpha))
    total = 0.0
    for dim, (dist, observed) in enumerate(zip(event.prediction, event.outcome)):
        u = CategoricalDistribution.one_hot(dist.labels, observed)
        total += pm_discrete(dist, u, r_policy(dim, dist.labels))
    return total


def sum_pm(
    events: Iterable[PredictionEvent],
    r_policy: RPolicy = uniform_r_policy,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """Sum of prediction matches over all states and time-indexed predictions
    of one umwelt."""
    events = list(events)
    umwelts = {ev.umwelt_id for ev in events}
    if len(umwelts) > 1:
        raise ValidationError(f"events span multiple umwelts: {sorted(umwelts)}")
    return math.fsum(event_pm(ev, r_policy, alpha) for ev in events)


def weighted_pm(
    record: UmweltRecord,
    compressor: CompressorSpec,
    r_policy: RPolicy = uniform_r_policy,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """Complexity-weighted match sum for one umwelt: the compressibility
    ratio of the canonical prediction string times the match sum."""
    if not record.events:
        return 0.0
    if not record.prediction_string:
        raise ValidationError(
            f"record {record.umwelt_id!r} has events but no prediction string"
        )
    return k_ratio(record.prediction_string, compressor) * sum_pm(
        record.events, r_policy, alpha
    )


def combine_umwelts(
    records: Sequence[UmweltRecord],
    pms: Sequence[float],
    compressor: CompressorSpec,
) -> tuple[float, float]:
    """Joint-complexity factor and combined total match across umwelts.

    The factor is the complexity of all serializations concatenated (in
    ascending umwelt id order, newline-separated) over the sum of their
    individual complexities: near 1 for unrelated umwelts, near 1/x for x
    near-identical ones.
    """
    if not records:
        raise ValidationError("need at least one umwelt record")
    if len(records) != len(pms):
        raise ValidationError("records and match sums must align")
    ordered = sorted(records, key=lambda r: r.umwelt_id)
    if len({r.umwelt_id for r in ordered}) != len(ordered):
        raise ValidationError("duplicate umwelt ids")
    combined = JOINT_SEPARATOR.join(r.serialization for r in ordered)
    # Compressor overhead on concatenation can nudge the ratio past 1 for
    # unrelated umwelts; clamp so the factor never inflates the total.
    joint_factor = min(
        1.0,
        k_hat(combined, compressor)
        / sum(k_hat(r.serialization, compressor) for r in ordered),
    )
    return joint_factor, joint_factor * math.fsum(pms)


def intelligence(pm_total: float) -> float:
    """log2 of the combined match, clamped to zero at pm_total <= 1."""
    if pm_total < 0.0:
        raise ValidationError(f"total prediction match must be >= 0, got {pm_total}")
    return math.log2(pm_total) if pm_total > 1.0 else 0.0


def measure(
    records: Sequence[UmweltRecord],
    compressor: CompressorSpec,
    r_policy: RPolicy = uniform_r_policy,
    alpha: float = DEFAULT_ALPHA,
) -> MeasurementResult:
    """Run the full pipeline over a set of umwelt records."""
    pms = {r.umwelt_id: weighted_pm(r, compressor, r_policy, alpha) for r in records}
    joint_factor, pm_total = combine_umwelts(
        records, [pms[r.umwelt_id] for r in records], compressor
    )
    return MeasurementResult(
        umwelt_ids=tuple(r.umwelt_id for r in records),
        pm_per_umwelt=pms,
        joint_factor=joint_factor,
        pm_total=pm_total,
        intelligence=intelligence(pm_total),
        compressor_id=compressor.algorithm_id,
    )
