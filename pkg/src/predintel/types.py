"""Core value types shared by the measurement pipeline and both reference agents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

PROB_TOL = 1e-9


class ValidationError(ValueError):
    """An input violates a documented invariant."""


class LabelMismatchError(ValidationError):
    """Two distributions do not share the same label set."""


@dataclass(frozen=True)
class CategoricalDistribution:
    """Probability vector over a finite, ordered label set.

    Probabilities are aligned with ``labels`` by position; comparisons between
    distributions are aligned by label, so two instances with permuted labels
    describe the same distribution.
    """

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.labels) != len(self.probs):
            raise ValidationError("labels and probs must have the same length")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(f"labels must be distinct, got {self.labels}")
        for p in self.probs:
            if not math.isfinite(p) or p < 0.0 or p > 1.0:
                raise ValidationError(f"probability {p!r} outside [0, 1]")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")

    @classmethod
    def uniform(cls, labels) -> "CategoricalDistribution":
        labels = tuple(labels)
        k = len(labels)
        if k == 0:
            raise ValidationError("uniform distribution needs at least one label")
        return cls(labels, (1.0 / k,) * k)

    @classmethod
    def one_hot(cls, labels, label: str) -> "CategoricalDistribution":
        labels = tuple(labels)
        if label not in labels:
            raise ValidationError(f"label {label!r} not in {labels}")
        return cls(labels, tuple(1.0 if lab == label else 0.0 for lab in labels))

    def prob_of(self, label: str) -> float:
        try:
            return self.probs[self.labels.index(label)]
        except ValueError:
            raise LabelMismatchError(f"label {label!r} not in {self.labels}") from None


@dataclass(frozen=True)
class ContinuousEnsemblePrediction:
    """Normal-shaped prediction summarised from an ensemble of point estimates."""

    mean: float
    std: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError(f"ensemble size must be >= 2, got {self.n}")
        if not math.isfinite(self.mean):
            raise ValidationError("ensemble mean must be finite")
        if not (math.isfinite(self.std) and self.std >= 0.0):
            raise ValidationError(f"ensemble std must be >= 0, got {self.std}")


DiscretePrediction = tuple[CategoricalDistribution, ...]
Prediction = Union[DiscretePrediction, ContinuousEnsemblePrediction]
Outcome = Union[tuple[str, ...], float]


@dataclass(frozen=True)
class PredictionEvent:
    """One time-indexed prediction paired with the state that finally occurred."""

    umwelt_id: str
    state_index: int
    time_index: int
    prediction: Prediction
    outcome: Outcome

    def __post_init__(self):
        if isinstance(self.prediction, ContinuousEnsemblePrediction):
            if not isinstance(self.outcome, (int, float)):
                raise ValidationError("continuous prediction needs a real outcome")
            object.__setattr__(self, "outcome", float(self.outcome))
        else:
            prediction = tuple(self.prediction)
            object.__setattr__(self, "prediction", prediction)
            if not prediction or not all(
                isinstance(d, CategoricalDistribution) for d in prediction
            ):
                raise ValidationError("discrete prediction must be distributions")
            outcome = tuple(self.outcome) if not isinstance(self.outcome, str) else None
            if outcome is None or len(outcome) != len(prediction):
                raise ValidationError(
                    "discrete outcome must list one observed label per dimension"
                )
            object.__setattr__(self, "outcome", outcome)

    @property
    def is_continuous(self) -> bool:
        return isinstance(self.prediction, ContinuousEnsemblePrediction)


@dataclass(frozen=True)
class UmweltRecord:
    """An umwelt's identity, canonical serialization, and accumulated events.

    ``prediction_string`` must be the canonical byte serialization of
    ``events`` (see :func:`predintel.complexity.serialize_predictions`); the
    same events always regenerate identical bytes.
    """

    umwelt_id: str
    serialization: bytes
    events: tuple[PredictionEvent, ...] = ()
    prediction_string: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if not self.serialization:
            raise ValidationError("umwelt serialization must be non-empty")
        for ev in self.events:
            if ev.umwelt_id != self.umwelt_id:
                raise ValidationError(
                    f"event for {ev.umwelt_id!r} in record {self.umwelt_id!r}"
                )


@dataclass(frozen=True)
class MeasurementResult:
    """Output of the full aggregation pipeline over a set of umwelts."""

    umwelt_ids: tuple[str, ...]
    pm_per_umwelt: dict[str, float] = field(compare=False)
    joint_factor: float = 1.0
    pm_total: float = 0.0
    intelligence: float = 0.0
    compressor_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "umwelt_ids", tuple(sorted(self.umwelt_ids)))
        if set(self.pm_per_umwelt) != set(self.umwelt_ids):
            raise ValidationError("pm_per_umwelt keys must match umwelt_ids")
        expected_total = self.joint_factor * math.fsum(self.pm_per_umwelt.values())
        scale = max(abs(expected_total), abs(self.pm_total), 1.0)
        if abs(expected_total - self.pm_total) > PROB_TOL * scale:
            raise ValidationError(
                f"pm_total {self.pm_total} != joint_factor * sum pm {expected_total}"
            )
        expected_int = math.log2(self.pm_total) if self.pm_total > 1.0 else 0.0
        if abs(expected_int - self.intelligence) > PROB_TOL:
            raise ValidationError(
                f"intelligence {self.intelligence} inconsistent with pm_total"
            )
