"""Result records, their on-disk formats, and report rendering.

A measurement run persists as pretty-printed JSON (schema-versioned, sorted
keys, byte-identical across reruns except for the timing block), a CSV
summary table, and a PNG figure rendered next to them.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .complexity import DEFAULT_COMPRESSOR_ID, get_compressor, serialize_predictions
from .measure import combine_umwelts, intelligence, weighted_pm
from .types import (
    ContinuousEnsemblePrediction,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to re-execute a run bit-identically."""

    command: str
    mazes: tuple[str, ...] = ()
    passes: int = 1
    datasets: tuple[str, ...] = ()
    window: int = 3
    n_models: int = 5
    hidden_units: int = 20
    epochs: int = 10
    batch_size: int = 10
    alpha: float = 0.05
    learning_rate: float = 1e-2
    seed: int = 0
    compressor: str = DEFAULT_COMPRESSOR_ID
    out: str = ""
    parallel: bool = False

    def to_text(self) -> str:
        lines = []
        for key, value in sorted(asdict(self).items()):
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


_TUPLE_FIELDS = {"mazes", "datasets"}
_INT_FIELDS = {"passes", "window", "n_models", "hidden_units", "epochs", "batch_size", "seed"}
_FLOAT_FIELDS = {"alpha", "learning_rate"}
_BOOL_FIELDS = {"parallel"}


def parse_config_text(text: str, command: str = "") -> RunConfig:
    """Parse the flat key-value config format (``key = value`` per line,
    ``#`` comments)."""
    values: dict = {"command": command}
    known = set(RunConfig.__dataclass_fields__)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ValidationError(f"config line {line_no}: unknown key {key!r}")
        try:
            if key in _TUPLE_FIELDS:
                values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key in _INT_FIELDS:
                values[key] = int(value)
            elif key in _FLOAT_FIELDS:
                values[key] = float(value)
            elif key in _BOOL_FIELDS:
                values[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                values[key] = value
        except ValueError:
            raise ValidationError(
                f"config line {line_no}: bad value {value!r} for {key}"
            ) from None
    return RunConfig(**values)


@dataclass
class UmweltReport:
    umwelt_id: str
    events: int
    k_ratio: float
    pm: float
    intelligence: float
    max_pm: float
    max_intelligence: float


@dataclass
class ResultRecord:
    """A MeasurementResult plus provenance, in persistable form."""

    command: str
    config: RunConfig
    compressor_id: str
    compressor_version: str
    umwelts: list[UmweltReport]
    joint_factor: float
    pm_total: float
    intelligence: float
    max_pm_total: float
    max_intelligence: float
    wall_clock_s: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "command": self.command,
            "config": asdict(self.config),
            "config_hash": self.config.config_hash(),
            "compressor": {"id": self.compressor_id, "version": self.compressor_version},
            "umwelts": [asdict(u) for u in self.umwelts],
            "joint_factor": self.joint_factor,
            "pm_total": self.pm_total,
            "intelligence": self.intelligence,
            "max_pm_total": self.max_pm_total,
            "max_intelligence": self.max_intelligence,
            "timing": {"wall_clock_s": self.wall_clock_s},
        }
        for key in ("mazes", "datasets"):
            payload["config"][key] = list(payload["config"][key])
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def validate_result_json(text: str) -> dict:
    """Load a persisted record and recheck its internal arithmetic.

    Raises ValidationError when the stored intelligence cannot be re-derived
    from the stored match fields.
    """
    payload = json.loads(text)
    pm_total = payload["pm_total"]
    expected = payload["joint_factor"] * math.fsum(u["pm"] for u in payload["umwelts"])
    if abs(expected - pm_total) > 1e-9 * max(1.0, abs(expected)):
        raise ValidationError(
            f"stored pm_total {pm_total} inconsistent with per-umwelt sums {expected}"
        )
    expected_int = math.log2(pm_total) if pm_total > 1.0 else 0.0
    if abs(expected_int - payload["intelligence"]) > 1e-9:
        raise ValidationError(
            f"stored intelligence {payload['intelligence']} inconsistent with pm_total"
        )
    return payload


def strip_timing(json_text: str) -> str:
    """Canonical form for byte-comparison across runs: timing block zeroed."""
    payload = json.loads(json_text)
    payload["timing"] = {}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_result(record: ResultRecord, out_path) -> dict[str, Path]:
    """Write the JSON record, the CSV summary, and the summary figure."""
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    json_path = out.with_suffix(".json")
    json_path.write_text(record.to_json())

    csv_path = out.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["umwelt", "events", "k_ratio", "pm", "intelligence", "max_intelligence"]
        )
        for u in record.umwelts:
            writer.writerow(
                [u.umwelt_id, u.events, f"{u.k_ratio:.6f}", f"{u.pm:.6f}",
                 f"{u.intelligence:.6f}", f"{u.max_intelligence:.6f}"]
            )
        writer.writerow(
            ["ALL", sum(u.events for u in record.umwelts), f"{record.joint_factor:.6f}",
             f"{record.pm_total:.6f}", f"{record.intelligence:.6f}",
             f"{record.max_intelligence:.6f}"]
        )

    png_path = out.with_suffix(".png")
    _render_measure_figure(record, png_path)
    return {"json": json_path, "csv": csv_path, "png": png_path}


def _render_measure_figure(record: ResultRecord, path: Path):
    names = [u.umwelt_id for u in record.umwelts] + ["combined"]
    agent = [u.intelligence for u in record.umwelts] + [record.intelligence]
    ceiling = [u.max_intelligence for u in record.umwelts] + [record.max_intelligence]
    x = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(names)), 4.0))
    ax.bar(x - 0.2, agent, width=0.4, label="agent", color="tab:blue")
    ax.bar(x + 0.2, ceiling, width=0.4, label="maximum", color="tab:orange", alpha=0.7)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("intelligence (bits)")
    ax.set_title(f"{record.command} ({record.compressor_id})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ---------------------------------------------------------------------------
# measurement-pipeline timing benchmark


@dataclass
class BenchPoint:
    n_events: int
    mean_s: float
    sd_s: float


@dataclass
class BenchResult:
    points: list[BenchPoint]
    slope_s_per_event: float
    intercept_s: float
    r_squared: float
    runs: int

    def seconds_per_billion(self) -> float:
        return self.slope_s_per_event * 1e9


def _synthetic_events(n: int, seed: int) -> list[PredictionEvent]:
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, 1.0, size=n)
    observed = means + rng.normal(0.0, 0.5, size=n)
    return [
        PredictionEvent(
            umwelt_id="bench",
            state_index=i + 1,
            time_index=1,
            prediction=ContinuousEnsemblePrediction(float(means[i]), 1.0, 5),
            outcome=float(observed[i]),
        )
        for i in range(n)
    ]


def _pipeline_once(events, serialization, compressor) -> float:
    record = UmweltRecord(
        umwelt_id="bench",
        serialization=serialization,
        events=events,
        prediction_string=serialize_predictions(events),
    )
    pm = weighted_pm(record, compressor)
    joint, total = combine_umwelts([record], [pm], compressor)
    return intelligence(total)


def run_bench(
    points: int = 8,
    runs: int = 20,
    base: int = 250,
    seed: int = 0,
    compressor_id: str = DEFAULT_COMPRESSOR_ID,
) -> BenchResult:
    """Time the measurement pipeline (event log -> intelligence) at
    geometrically spaced prediction counts.

    Event generation is excluded from the timing: producing predictions is
    the agent's cost, not the measure's.
    """
    if points < 2 or runs < 1:
        raise ValidationError("bench needs at least 2 points and 1 run")
    compressor = get_compressor(compressor_id)
    sizes = [base * 2**i for i in range(points)]
    bench_points = []
    serialization = b"bench umwelt\n" * 4
    for n in sizes:
        events = tuple(_synthetic_events(n, seed))
        _pipeline_once(events, serialization, compressor)  # warm-up
        samples = []
        for _ in range(runs):
            t0 = time.perf_counter()
            _pipeline_once(events, serialization, compressor)
            samples.append(time.perf_counter() - t0)
        mean = math.fsum(samples) / len(samples)
        var = (
            math.fsum((s - mean) ** 2 for s in samples) / (len(samples) - 1)
            if len(samples) > 1
            else 0.0
        )
        bench_points.append(BenchPoint(n, mean, math.sqrt(var)))

    xs = np.array([p.n_events for p in bench_points], dtype=float)
    ys = np.array([p.mean_s for p in bench_points], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return BenchResult(bench_points, float(slope), float(intercept), r_squared, runs)


def write_bench(result: BenchResult, out_path) -> dict[str, Path]:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_events", "mean_s", "sd_s", "runs"])
        for p in result.points:
            writer.writerow([p.n_events, f"{p.mean_s:.6e}", f"{p.sd_s:.6e}", result.runs])

    png_path = out.with_suffix(".png")
    xs = [p.n_events for p in result.points]
    ys = [p.mean_s for p in result.points]
    errs = [p.sd_s for p in result.points]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(xs, ys, yerr=errs, fmt="o", capsize=3, label=f"mean of {result.runs} runs")
    fit_x = np.linspace(min(xs), max(xs), 50)
    ax.plot(
        fit_x,
        result.slope_s_per_event * fit_x + result.intercept_s,
        "--",
        label=f"linear fit (R²={result.r_squared:.4f})",
    )
    ax.set_xlabel("number of predictions")
    ax.set_ylabel("pipeline time (s)")
    ax.set_title("Measurement time vs prediction count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": csv_path, "png": png_path}


def write_series_csv(values, out_path, render_figure: bool = True) -> dict[str, Path]:
    """Persist a generated series as CSV (header ``value``) plus a preview plot."""
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    csv_path = out.with_suffix(".csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value"])
        for v in values:
            writer.writerow([f"{float(v):.6f}"])
    written = {"csv": csv_path}
    if render_figure:
        png_path = out.with_suffix(".png")
        fig, ax = plt.subplots(figsize=(6.4, 3.2))
        ax.plot(list(values), linewidth=1.0)
        ax.set_xlabel("index")
        ax.set_ylabel("value")
        fig.tight_layout()
        fig.savefig(png_path, dpi=120)
        plt.close(fig)
        written["png"] = png_path
    return written
