"""Hellinger scoring, random-guess correction, and the aggregation pipeline.

Frozen expected values were computed with an mpmath oracle at 50 decimal
digits (see oracle helpers at the bottom); they are independent of the
implementation under test.
"""

import math
import random

import pytest

from predintel.complexity import serialize_predictions
from predintel.measure import (
    combine_umwelts,
    degree_of_match,
    event_pm,
    hellinger,
    intelligence,
    measure,
    pm_discrete,
    sum_pm,
    weighted_pm,
)
from predintel.types import (
    CategoricalDistribution,
    ContinuousEnsemblePrediction,
    LabelMismatchError,
    MeasurementResult,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

ABC = ("a", "b", "c")

# mpmath oracle values (50 digits, rounded here)
H_ONEHOT_UNIFORM3 = 0.6501151673303319  # H((1,0,0), uniform-3)
PM_TABLE_CASE = 0.2840897635587816  # |(1-H((.75,.25,0),(1,0,0))) - (1-H(R,(1,0,0)))|
H_RU_BY_K = {2: 0.5411961001461971, 3: 0.6501151673303319, 5: 0.7434960689215061}


def dist(probs, labels=ABC):
    return CategoricalDistribution(tuple(labels), tuple(probs))


def uniform(labels=ABC):
    return CategoricalDistribution.uniform(labels)


def one_hot(label, labels=ABC):
    return CategoricalDistribution.one_hot(labels, label)


class TestCategoricalDistribution:
    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            dist((0.5, 0.4, 0.2))

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            dist((1.2, -0.2, 0.0))

    def test_rejects_nan(self):
        with pytest.raises(ValidationError):
            dist((float("nan"), 0.5, 0.5))

    def test_rejects_duplicate_labels(self):
        with pytest.raises(ValidationError):
            CategoricalDistribution(("a", "a"), (0.5, 0.5))


class TestHellinger:
    def test_identical_is_zero(self):
        p = dist((0.3, 0.7, 0.0))
        assert hellinger(p, p) == 0.0

    def test_disjoint_is_one(self):
        assert hellinger(one_hot("a"), one_hot("b")) == 1.0

    def test_one_hot_vs_uniform(self):
        assert hellinger(one_hot("a"), uniform()) == pytest.approx(
            H_ONEHOT_UNIFORM3, abs=1e-9
        )

    def test_aligned_by_label_not_position(self):
        p = CategoricalDistribution(("a", "b"), (0.2, 0.8))
        q = CategoricalDistribution(("b", "a"), (0.8, 0.2))
        assert hellinger(p, q) == 0.0

    def test_label_mismatch_raises(self):
        with pytest.raises(LabelMismatchError):
            hellinger(one_hot("a"), CategoricalDistribution(("x", "y", "z"), (1, 0, 0)))

    def test_symmetry_and_bounds_randomized(self):
        rng = random.Random(1234)
        for _ in range(300):
            k = rng.randint(2, 6)
            labels = tuple(f"l{i}" for i in range(k))
            p = _random_dist(rng, labels)
            q = _random_dist(rng, labels)
            h_pq = hellinger(p, q)
            h_qp = hellinger(q, p)
            assert h_pq == pytest.approx(h_qp, abs=1e-12)
            assert 0.0 <= h_pq <= 1.0

    def test_agrees_with_oracle_randomized(self):
        rng = random.Random(99)
        for _ in range(50):
            p = _random_dist(rng, ABC)
            q = _random_dist(rng, ABC)
            assert hellinger(p, q) == pytest.approx(_oracle_hellinger(p, q), abs=1e-9)


class TestDegreeOfMatch:
    def test_identical(self):
        assert degree_of_match(uniform(), uniform()) == 1.0

    def test_disjoint(self):
        assert degree_of_match(one_hot("a"), one_hot("c")) == 0.0

    def test_one_hot_vs_uniform(self):
        assert degree_of_match(one_hot("a"), uniform()) == pytest.approx(
            1.0 - H_ONEHOT_UNIFORM3, abs=1e-9
        )


class TestPmDiscrete:
    def test_random_guesser_scores_zero(self):
        r = uniform()
        for label in ABC:
            assert pm_discrete(r, one_hot(label), r) == 0.0

    def test_perfect_one_hot_match(self):
        u = one_hot("b")
        assert pm_discrete(u, u, uniform()) == pytest.approx(
            H_ONEHOT_UNIFORM3, abs=1e-9
        )

    def test_partial_prediction(self):
        p = dist((0.75, 0.25, 0.0), labels=("W", "E", "R"))
        u = one_hot("W", labels=("W", "E", "R"))
        r = uniform(("W", "E", "R"))
        assert pm_discrete(p, u, r) == pytest.approx(PM_TABLE_CASE, abs=1e-9)

    @pytest.mark.parametrize("k", [2, 3, 5])
    def test_maximum_at_perfect_prediction(self, k):
        labels = tuple(f"l{i}" for i in range(k))
        u = CategoricalDistribution.one_hot(labels, labels[0])
        r = CategoricalDistribution.uniform(labels)
        maximum = pm_discrete(u, u, r)
        assert maximum == pytest.approx(H_RU_BY_K[k], abs=1e-9)
        formula = math.sqrt((1 - 1 / math.sqrt(k)) ** 2 + (k - 1) / k) / math.sqrt(2)
        assert maximum == pytest.approx(formula, abs=1e-12)
        rng = random.Random(k)
        for _ in range(200):
            p = _random_dist(rng, labels)
            assert pm_discrete(p, u, r) <= maximum + 1e-12


class TestSumPm:
    def test_empty(self):
        assert sum_pm([]) == 0.0

    def test_four_dim_perfect_event(self):
        ev = _discrete_event("u", 1, outcome=("W", "E", "W", "E"), perfect=True)
        assert sum_pm([ev]) == pytest.approx(4 * H_ONEHOT_UNIFORM3, abs=1e-9)

    def test_continuous_event_at_mean(self):
        ev = PredictionEvent(
            "u", 1, 1, ContinuousEnsemblePrediction(5.0, 1.0, 5), 5.0
        )
        assert sum_pm([ev]) == 1.0

    def test_mixed_umwelts_rejected(self):
        a = _discrete_event("a", 1, ("W", "E", "W", "E"))
        b = _discrete_event("b", 1, ("W", "E", "W", "E"))
        with pytest.raises(ValidationError):
            sum_pm([a, b])

    def test_additive_over_disjoint_lists(self):
        rng = random.Random(5)
        events = [
            _discrete_event("u", i, ("W", "E", "W", "E"), perfect=rng.random() < 0.5)
            for i in range(1, 21)
        ]
        total = sum_pm(events)
        assert total == pytest.approx(sum_pm(events[:7]) + sum_pm(events[7:]), abs=1e-9)


class TestWeightedPm:
    def test_no_events_is_zero(self, compressor):
        record = UmweltRecord("u", b"serialized umwelt")
        assert weighted_pm(record, compressor) == 0.0

    def test_missing_prediction_string_rejected(self, compressor):
        ev = _discrete_event("u", 1, ("W", "E", "W", "E"))
        record = UmweltRecord("u", b"serialized", events=(ev,), prediction_string=b"")
        with pytest.raises(ValidationError):
            weighted_pm(record, compressor)

    def test_compressible_predictions_score_less(self, compressor):
        # same match sum, one record with repetitive prediction bytes and one
        # with incompressible bytes of the same length
        events = tuple(
            _discrete_event("u", i, ("W", "E", "W", "E"), perfect=True)
            for i in range(1, 11)
        )
        base = serialize_predictions(events)
        rng = random.Random(0)
        noisy = bytes(rng.randrange(256) for _ in range(len(base)))
        repetitive = b"1;" * (len(base) // 2)
        rec_rep = UmweltRecord("u", b"s", events, repetitive)
        rec_rand = UmweltRecord("u", b"s", events, noisy)
        assert weighted_pm(rec_rep, compressor) < weighted_pm(rec_rand, compressor)


class TestCombineUmwelts:
    def test_single_umwelt_factor_is_exactly_one(self, compressor):
        record = UmweltRecord("u", b"some umwelt description " * 10)
        factor, total = combine_umwelts([record], [5.0], compressor)
        assert factor == 1.0
        assert total == 5.0

    def test_duplicate_serializations_halve(self, compressor):
        # realistic umwelt-sized serialization (a generated series text)
        from predintel.complexity import serialize_series
        from predintel.timeseries import gen_sine

        data = serialize_series(gen_sine(500).values).data
        a = UmweltRecord("a", data)
        b = UmweltRecord("b", data)
        factor, _ = combine_umwelts([a, b], [1.0, 1.0], compressor)
        assert factor <= 0.6

    def test_independent_random_serializations(self, compressor):
        rng = random.Random(42)
        a = UmweltRecord("a", bytes(rng.randrange(256) for _ in range(2000)))
        b = UmweltRecord("b", bytes(rng.randrange(256) for _ in range(2000)))
        factor, _ = combine_umwelts([a, b], [1.0, 1.0], compressor)
        assert 0.9 <= factor <= 1.0

    def test_order_independent(self, compressor):
        a = UmweltRecord("a", b"first umwelt " * 30)
        b = UmweltRecord("b", b"second umwelt " * 30)
        assert combine_umwelts([a, b], [1.0, 2.0], compressor) == combine_umwelts(
            [b, a], [2.0, 1.0], compressor
        )

    def test_empty_rejected(self, compressor):
        with pytest.raises(ValidationError):
            combine_umwelts([], [], compressor)


class TestIntelligence:
    def test_clamp_at_one(self):
        assert intelligence(1.0) == 0.0

    def test_clamp_below_one(self):
        assert intelligence(0.5) == 0.0

    def test_power_of_two(self):
        assert intelligence(64.0) == 6.0

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            intelligence(-0.1)

    def test_monotone(self):
        values = [0.0, 0.5, 1.0, 1.5, 2.0, 10.0, 64.0, 1e6]
        results = [intelligence(v) for v in values]
        assert results == sorted(results)


class TestMeasurementResult:
    def test_pipeline_output_satisfies_invariants(self, compressor):
        events = tuple(
            _discrete_event("m1", i, ("W", "E", "W", "E"), perfect=True)
            for i in range(1, 31)
        )
        rec = UmweltRecord("m1", b"maze one " * 20, events, serialize_predictions(events))
        result = measure([rec], compressor)
        # constructor re-validates: rebuild from the parts
        rebuilt = MeasurementResult(
            umwelt_ids=result.umwelt_ids,
            pm_per_umwelt=result.pm_per_umwelt,
            joint_factor=result.joint_factor,
            pm_total=result.pm_total,
            intelligence=result.intelligence,
            compressor_id=result.compressor_id,
        )
        assert rebuilt.intelligence == result.intelligence

    def test_inconsistent_intelligence_rejected(self):
        with pytest.raises(ValidationError):
            MeasurementResult(
                umwelt_ids=("u",),
                pm_per_umwelt={"u": 8.0},
                joint_factor=1.0,
                pm_total=8.0,
                intelligence=2.0,  # should be 3
            )

    def test_inconsistent_total_rejected(self):
        with pytest.raises(ValidationError):
            MeasurementResult(
                umwelt_ids=("u",),
                pm_per_umwelt={"u": 8.0},
                joint_factor=0.5,
                pm_total=8.0,  # should be 4
                intelligence=3.0,
            )


# --- helpers ---------------------------------------------------------------


def _random_dist(rng, labels):
    raw = [rng.random() for _ in labels]
    total = sum(raw)
    return CategoricalDistribution(tuple(labels), tuple(v / total for v in raw))


def _discrete_event(umwelt, index, outcome, perfect=False):
    labels = ("W", "E", "R")
    if perfect:
        prediction = tuple(
            CategoricalDistribution.one_hot(labels, lab) for lab in outcome
        )
    else:
        prediction = tuple(CategoricalDistribution.uniform(labels) for _ in outcome)
    return PredictionEvent(umwelt, index, 1, prediction, tuple(outcome))


def _oracle_hellinger(p, q):
    """Independent arbitrary-precision route (mpmath, 50 digits)."""
    import mpmath as mp

    with mp.workdps(50):
        by_label = dict(zip(q.labels, q.probs))
        s = mp.fsum(
            (mp.sqrt(mp.mpf(pp)) - mp.sqrt(mp.mpf(by_label[lab]))) ** 2
            for lab, pp in zip(p.labels, p.probs)
        )
        return float(mp.sqrt(s) / mp.sqrt(2))
