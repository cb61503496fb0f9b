"""Kolmogorov-complexity approximation via compression, plus the canonical
byte serializations used by the complexity-weighting and multi-umwelt steps.

True Kolmogorov complexity is uncomputable; ``k_hat`` stands in the compressed
length of a fixed, deterministic compressor. All reported ratios are relative
to that compressor, so every result carries the compressor's identity tag.
"""

from __future__ import annotations

import enum
import lzma
import zlib
from dataclasses import dataclass

from .types import ContinuousEnsemblePrediction, PredictionEvent, ValidationError

#: Decimal places used for every probability and real value before it enters a
#: complexity calculation. Rounding keeps over-precise predictions from
#: inflating their own complexity.
ROUND_DECIMALS = 3

#: Separator placed between umwelt serializations when they are concatenated
#: for the joint-complexity factor.
JOINT_SEPARATOR = b"\x0a"

DEFAULT_COMPRESSOR_ID = "lz-deflate-level9"


@dataclass(frozen=True)
class CompressorSpec:
    """A named deterministic compressor: same input bytes, same output bytes."""

    algorithm_id: str
    version: str

    def compress(self, data: bytes) -> bytes:
        raise NotImplementedError


@dataclass(frozen=True)
class _DeflateCompressor(CompressorSpec):
    level: int = 9

    def compress(self, data: bytes) -> bytes:
        # Raw deflate stream (no zlib header/checksum) keeps the constant
        # overhead on short strings as small as possible.
        c = zlib.compressobj(self.level, zlib.DEFLATED, -15)
        return c.compress(data) + c.flush()


@dataclass(frozen=True)
class _LzmaCompressor(CompressorSpec):
    def compress(self, data: bytes) -> bytes:
        filters = [{"id": lzma.FILTER_LZMA2, "preset": 9}]
        return lzma.compress(data, format=lzma.FORMAT_RAW, filters=filters)


def get_compressor(algorithm_id: str = DEFAULT_COMPRESSOR_ID) -> CompressorSpec:
    """Resolve a compressor id like ``lz-deflate-level9`` or ``lzma``."""
    if algorithm_id.startswith("lz-deflate-level"):
        try:
            level = int(algorithm_id.removeprefix("lz-deflate-level"))
        except ValueError:
            raise ValidationError(f"bad compressor id {algorithm_id!r}") from None
        if not 1 <= level <= 9:
            raise ValidationError(f"deflate level must be 1-9, got {level}")
        return _DeflateCompressor(
            algorithm_id, f"zlib/{zlib.ZLIB_RUNTIME_VERSION}", level
        )
    if algorithm_id == "lzma":
        return _LzmaCompressor(algorithm_id, "lzma/raw-preset9")
    raise ValidationError(f"unknown compressor id {algorithm_id!r}")


def k_hat(data: bytes, compressor: CompressorSpec) -> int:
    """Approximate Kolmogorov complexity: compressed length in bytes."""
    if not data:
        raise ValidationError("cannot estimate complexity of empty input")
    return len(compressor.compress(data))


def k_ratio(data: bytes, compressor: CompressorSpec) -> float:
    """Compressed over raw length, clamped to 1.0.

    Header overhead can push the raw ratio slightly above 1 on short
    incompressible strings; the clamp keeps the complexity weight from ever
    inflating a match sum.
    """
    return min(1.0, k_hat(data, compressor) / len(data))


class SerializationSource(enum.Enum):
    MAZE_GRID = "maze_grid"
    TIMESERIES_VALUES = "timeseries_values"
    EXTERNAL = "external"


@dataclass(frozen=True)
class SerializedUmwelt:
    data: bytes
    source: SerializationSource


def serialize_maze(world) -> SerializedUmwelt:
    """Canonical text form of a maze grid.

    First line is ``"<width> <height>"``; each following line is one row of
    cell characters from {W, E, R}, top row first. This text doubles as the
    on-disk maze file format.
    """
    lines = [f"{world.width} {world.height}"]
    lines.extend(world.rows)
    return SerializedUmwelt("\n".join(lines).encode("ascii"), SerializationSource.MAZE_GRID)


def serialize_series(values) -> SerializedUmwelt:
    """Canonical text form of a data series: one fixed-point value per line."""
    values = list(values)
    if not values:
        raise ValidationError("cannot serialize an empty series")
    text = "\n".join(f"{float(v):.{ROUND_DECIMALS}f}" for v in values)
    return SerializedUmwelt(text.encode("ascii"), SerializationSource.TIMESERIES_VALUES)


def _event_sort_key(event: PredictionEvent):
    return (event.umwelt_id, event.state_index, event.time_index)


def serialize_predictions(events) -> bytes:
    """Canonical byte string describing all predictions in a record.

    Events are sorted into (umwelt, state, time) order regardless of input
    order, and all reals are rounded per ``ROUND_DECIMALS``, so the same
    events always produce identical bytes. Discrete events emit one line per
    sensor dimension (``s,t,dim:p1,p2,...``); continuous events emit one
    ``s,t:mean,std`` line.
    """
    lines = []
    for ev in sorted(events, key=_event_sort_key):
        s, t = ev.state_index, ev.time_index
        if isinstance(ev.prediction, ContinuousEnsemblePrediction):
            p = ev.prediction
            lines.append(f"{s},{t}:{p.mean:.{ROUND_DECIMALS}f},{p.std:.{ROUND_DECIMALS}f}")
        else:
            for dim, dist in enumerate(ev.prediction, start=1):
                probs = ",".join(f"{p:.{ROUND_DECIMALS}f}" for p in dist.probs)
                lines.append(f"{s},{t},{dim}:{probs}")
    return "\n".join(lines).encode("ascii")
