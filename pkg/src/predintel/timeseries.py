"""Time-series reference agent: datasets, a small from-scratch recurrent
regressor ensemble, and whole-set evaluation.

Each dataset is min-max scaled with train-split statistics, cut into
overlapping sliding windows, and predicted one step ahead by an ensemble of
independently seeded recurrent networks. The ensemble's outputs form a normal
summary whose match against the observed next value is decided by a one-sample
t-test. Intelligence is computed over every window of the entire series.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .complexity import serialize_predictions, serialize_series
from .types import (
    ContinuousEnsemblePrediction,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

DEFAULT_SPLIT = (0.70, 0.15, 0.15)


@dataclass(frozen=True)
class SeriesDataset:
    name: str
    values: tuple[float, ...]
    split: tuple[float, float, float] = DEFAULT_SPLIT

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "split", tuple(float(f) for f in self.split))
        if len(self.split) != 3 or any(f <= 0 for f in self.split):
            raise ValidationError("split needs three positive fractions")
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ValidationError(f"split fractions sum to {sum(self.split)}, expected 1")
        if len(self.values) < 5:
            raise ValidationError("series too short to window")

    def split_points(self) -> tuple[int, int]:
        n = len(self.values)
        train_end = int(round(n * self.split[0]))
        val_end = train_end + int(round(n * self.split[1]))
        return train_end, min(val_end, n)


@dataclass(frozen=True)
class RegressorConfig:
    window: int = 3
    n_models: int = 5
    hidden_units: int = 20
    epochs: int = 10
    batch_size: int = 10
    alpha: float = 0.05
    learning_rate: float = 1e-2
    init_scale: float = 0.08

    def __post_init__(self):
        for name in ("window", "n_models", "hidden_units", "epochs", "batch_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.learning_rate <= 0 or self.init_scale <= 0:
            raise ValidationError("learning_rate and init_scale must be positive")


def gen_line(n: int = 1000) -> SeriesDataset:
    """Strictly increasing line: y_i = i / n."""
    _check_n(n)
    return SeriesDataset("line", tuple(i / n for i in range(n)))


def gen_sine(n: int = 500) -> SeriesDataset:
    """Period-50 sine wave, phased so the extrema +-1 are hit exactly on
    integer sample points."""
    _check_n(n)
    return SeriesDataset(
        "sine", tuple(math.sin(2 * math.pi * i / 50 + math.pi / 2) for i in range(n))
    )


def gen_sine_trend_noise(n: int = 500, seed: int = 0) -> SeriesDataset:
    """Period-50 sine plus a rising baseline and seeded Gaussian noise."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, 0.05, size=n)
    values = tuple(
        math.sin(2 * math.pi * i / 50) + 0.002 * i + noise[i] for i in range(n)
    )
    return SeriesDataset("sine-trend", values)


GENERATORS = {
    "line": gen_line,
    "sine": gen_sine,
    "sine-trend": gen_sine_trend_noise,
}


def _check_n(n: int):
    if n < 5:
        raise ValidationError(f"series length {n} too small")


def load_csv(path, column=None, name: str | None = None) -> SeriesDataset:
    """Load one numeric column from a CSV file.

    ``column`` may be a header name, a zero-based index, or None for the
    first column. A header row is skipped automatically when its cell does
    not parse as a number. Malformed data rows fail loudly with their line
    number.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: file is empty")

    col_index = 0
    start = 0
    header = rows[0]
    if isinstance(column, str) and not _is_number(column):
        stripped = [c.strip() for c in header]
        if column not in stripped:
            raise ValidationError(f"{path}: no column named {column!r} in header {header}")
        col_index = stripped.index(column)
        start = 1
    else:
        if column is not None:
            col_index = int(column)
        if header and not _is_number(_cell(header, col_index, path, 1)):
            start = 1  # unnamed numeric load with a header row

    values = []
    for line_no, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        cell = _cell(row, col_index, path, line_no)
        try:
            values.append(float(cell))
        except ValueError:
            raise ValidationError(
                f"{path}: line {line_no}: cannot parse {cell!r} as a number"
            ) from None
    if not values:
        raise ValidationError(f"{path}: column {col_index} has no numeric values")
    return SeriesDataset(name or str(path), tuple(values))


def _cell(row, index, path, line_no):
    if index >= len(row):
        raise ValidationError(f"{path}: line {line_no}: no column {index}")
    return row[index].strip()


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


@dataclass(frozen=True)
class WindowSample:
    inputs: tuple[float, ...]
    target: float


def windows(values, w: int) -> list[WindowSample]:
    """Stride-1 sliding windows: each sample holds w inputs and the next value."""
    values = list(values)
    if w < 1:
        raise ValidationError(f"window must be >= 1, got {w}")
    if len(values) < w + 1:
        raise ValidationError(f"series of {len(values)} too short for window {w}")
    return [
        WindowSample(tuple(values[i : i + w]), values[i + w])
        for i in range(len(values) - w)
    ]


@dataclass(frozen=True)
class Scaler:
    """Min-max scaler fitted on the train split only."""

    low: float
    high: float

    @classmethod
    def fit(cls, values) -> "Scaler":
        values = list(values)
        low, high = min(values), max(values)
        if high == low:
            high = low + 1.0  # constant series maps to 0
        return cls(low, high)

    def transform(self, values) -> np.ndarray:
        return (np.asarray(values, dtype=np.float64) - self.low) / (self.high - self.low)


class SequenceRegressor:
    """Single-layer recurrent cell (input/forget/output/candidate gates) with
    a dense scalar head, trained by plain gradient descent.

    All parameters live in a dict of numpy arrays; the forward pass is
    deterministic given parameters and input, and training is deterministic
    given the seed.
    """

    PARAM_NAMES = ("wx", "wh", "b", "wy", "by")

    def __init__(self, hidden_units: int, seed: int, init_scale: float = 0.08):
        self.hidden_units = hidden_units
        self.seed = seed
        rng = np.random.default_rng(seed)
        h = hidden_units
        self.params = {
            # gate order along the last axis: input, forget, output, candidate
            "wx": rng.uniform(-init_scale, init_scale, size=(1, 4 * h)),
            "wh": rng.uniform(-init_scale, init_scale, size=(h, 4 * h)),
            "b": rng.uniform(-init_scale, init_scale, size=(4 * h,)),
            "wy": rng.uniform(-init_scale, init_scale, size=(h, 1)),
            "by": rng.uniform(-init_scale, init_scale, size=(1,)),
        }
        self.val_mse: float | None = None
        self._adam_m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_t = 0

    def forward(self, x: np.ndarray, keep_trace: bool = False):
        """Run a batch of windows through the cell.

        x has shape (batch, steps); returns predictions of shape (batch,)
        and, when requested, the per-step activations needed for backprop.
        """
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        batch, steps = x.shape
        h = self.hidden_units
        hs = np.zeros((batch, h))
        cs = np.zeros((batch, h))
        trace = []
        for t in range(steps):
            xt = x[:, t : t + 1]
            z = xt @ self.params["wx"] + hs @ self.params["wh"] + self.params["b"]
            i = _sigmoid(z[:, :h])
            f = _sigmoid(z[:, h : 2 * h])
            o = _sigmoid(z[:, 2 * h : 3 * h])
            g = np.tanh(z[:, 3 * h :])
            c_new = f * cs + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            if keep_trace:
                trace.append((xt, hs, cs, i, f, o, g, c_new, tanh_c))
            hs, cs = h_new, c_new
        y = (hs @ self.params["wy"] + self.params["by"])[:, 0]
        if keep_trace:
            return y, (trace, hs)
        return y

    def predict(self, window_input) -> float:
        out = self.forward(np.asarray(window_input, dtype=np.float64)[None, :])
        return float(out[0])

    def gradients(self, x: np.ndarray, targets: np.ndarray):
        """Mean-squared-error loss and its gradients for one batch, by
        backpropagation through time."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        targets = np.asarray(targets, dtype=np.float64)
        batch = x.shape[0]
        h = self.hidden_units
        y, (trace, h_last) = self.forward(x, keep_trace=True)
        err = y - targets
        loss = float(np.mean(err**2))

        grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        dy = (2.0 / batch) * err[:, None]
        grads["wy"] = h_last.T @ dy
        grads["by"] = dy.sum(axis=0)
        dh = dy @ self.params["wy"].T
        dc = np.zeros((batch, h))
        for step in reversed(trace):
            xt, h_prev, c_prev, i, f, o, g, c_new, tanh_c = step
            do = dh * tanh_c
            dc = dc + dh * o * (1.0 - tanh_c**2)
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    do * o * (1.0 - o),
                    dg * (1.0 - g**2),
                ],
                axis=1,
            )
            grads["wx"] += xt.T @ dz
            grads["wh"] += h_prev.T @ dz
            grads["b"] += dz.sum(axis=0)
            dh = dz @ self.params["wh"].T
            dc = dc * f
        return loss, grads

    def train_step(self, x, targets, learning_rate: float) -> float:
        """One Adam update at a fixed step size (plain gradient steps at the
        same size do not learn within the default epoch budget)."""
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        loss, grads = self.gradients(x, targets)
        self._adam_t += 1
        t = self._adam_t
        for name in self.PARAM_NAMES:
            m = self._adam_m[name]
            v = self._adam_v[name]
            g = grads[name]
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            m_hat = m / (1.0 - beta1**t)
            v_hat = v / (1.0 - beta2**t)
            self.params[name] -= learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        return loss


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_ensemble(
    dataset: SeriesDataset,
    config: RegressorConfig = RegressorConfig(),
    seeds=None,
) -> list[SequenceRegressor]:
    """Train one regressor per seed on the dataset's train split.

    Each member trains on its own seeded bootstrap resample of the train
    windows, which is what gives the ensemble an honest spread of
    predictions; without it the members converge to near-identical functions
    and the t-test match rejects any shared bias. Training is deterministic
    per seed: same seeds and data give bit-identical parameters. The
    validation split is only used to report each model's validation MSE.
    """
    if seeds is None:
        seeds = tuple(range(config.n_models))
    seeds = tuple(seeds)
    if len(seeds) != config.n_models:
        raise ValidationError(
            f"need {config.n_models} seeds (one per model), got {len(seeds)}"
        )
    scaler = fit_scaler(dataset)
    scaled = scaler.transform(dataset.values)
    train_end, val_end = dataset.split_points()
    train_samples = windows(scaled[:train_end], config.window)
    val_samples = windows(scaled[train_end:val_end], config.window) if val_end - train_end > config.window else []

    x_train = np.array([s.inputs for s in train_samples])
    y_train = np.array([s.target for s in train_samples])

    models = []
    for index, seed in enumerate(seeds):
        model = SequenceRegressor(config.hidden_units, seed, config.init_scale)
        rng = np.random.default_rng(seed + 1_000_003)
        n = len(train_samples)
        boot = rng.integers(0, n, size=n)
        x_boot, y_boot = x_train[boot], y_train[boot]
        for _ in range(config.epochs):
            perm = rng.permutation(n)
            for lo in range(0, n, config.batch_size):
                idx = perm[lo : lo + config.batch_size]
                loss = model.train_step(x_boot[idx], y_boot[idx], config.learning_rate)
                if not math.isfinite(loss):
                    raise ValidationError(f"model {index} (seed {seed}) diverged: loss={loss}")
        if val_samples:
            preds = model.forward(np.array([s.inputs for s in val_samples]))
            model.val_mse = float(
                np.mean((preds - np.array([s.target for s in val_samples])) ** 2)
            )
        models.append(model)
    return models


def fit_scaler(dataset: SeriesDataset) -> Scaler:
    train_end, _ = dataset.split_points()
    return Scaler.fit(dataset.values[:train_end])


def predict_ensemble(models, window_input) -> ContinuousEnsemblePrediction:
    """Combine the models' point predictions into a normal summary: sample
    mean and (n-1)-denominator standard deviation."""
    outputs = [m.predict(window_input) for m in models]
    n = len(outputs)
    if n < 2:
        raise ValidationError("ensemble needs at least two models")
    mean = math.fsum(outputs) / n
    var = math.fsum((o - mean) ** 2 for o in outputs) / (n - 1)
    return ContinuousEnsemblePrediction(mean=mean, std=math.sqrt(var), n=n)


def evaluate_series(
    dataset: SeriesDataset,
    models,
    config: RegressorConfig = RegressorConfig(),
) -> UmweltRecord:
    """Score the ensemble on every window of the entire dataset.

    Predictions and observations are compared in train-scaled space; the
    umwelt serialization is the raw series text.
    """
    scaler = fit_scaler(dataset)
    scaled = scaler.transform(dataset.values)
    samples = windows(scaled, config.window)

    events = []
    for index, sample in enumerate(samples, start=1):
        prediction = predict_ensemble(models, sample.inputs)
        events.append(
            PredictionEvent(
                umwelt_id=dataset.name,
                state_index=index,
                time_index=1,
                prediction=prediction,
                outcome=float(sample.target),
            )
        )
    return UmweltRecord(
        umwelt_id=dataset.name,
        serialization=serialize_series(dataset.values).data,
        events=tuple(events),
        prediction_string=serialize_predictions(events),
    )


def max_intelligence_estimate(record: UmweltRecord, compressor) -> float:
    """Intelligence ceiling assuming a perfect match for every prediction:
    log2 of (prediction-string compressibility x window count), clamped at 0."""
    from .complexity import k_ratio
    from .measure import intelligence

    return intelligence(k_ratio(record.serialization, compressor) * len(record.events))
