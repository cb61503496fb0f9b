"""Compression primitives and canonical serializations."""

import random

import pytest

from predintel.complexity import (
    get_compressor,
    k_hat,
    k_ratio,
    serialize_maze,
    serialize_predictions,
    serialize_series,
)
from predintel.maze import load_builtin, parse_maze
from predintel.types import (
    CategoricalDistribution,
    ContinuousEnsemblePrediction,
    PredictionEvent,
    ValidationError,
)

WER = ("W", "E", "R")


class TestKHat:
    def test_identical_bytes_collapse(self, compressor):
        assert k_hat(b"a" * 1000, compressor) <= 50

    def test_random_bytes_incompressible(self, compressor):
        rng = random.Random(12345)
        data = bytes(rng.randrange(256) for _ in range(1000))
        assert k_hat(data, compressor) >= 900

    def test_repetition_compresses(self, compressor):
        rng = random.Random(7)
        s = bytes(rng.randrange(256) for _ in range(500))
        assert k_hat(s + s, compressor) < 2 * k_hat(s, compressor)

    def test_empty_rejected(self, compressor):
        with pytest.raises(ValidationError):
            k_hat(b"", compressor)

    def test_deterministic(self, compressor):
        rng = random.Random(3)
        data = bytes(rng.randrange(256) for _ in range(4096))
        assert compressor.compress(data) == compressor.compress(data)

    def test_subadditive_within_constant(self, compressor):
        rng = random.Random(11)
        for _ in range(40):
            a = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 3000)))
            b = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 3000)))
            assert k_hat(a + b, compressor) <= k_hat(a, compressor) + k_hat(b, compressor) + 64


class TestKRatio:
    def test_repetitive_is_small(self, compressor):
        assert k_ratio(b"ab" * 2000, compressor) < 0.1

    def test_random_10kb_clamped_to_one(self, compressor):
        rng = random.Random(2024)
        data = bytes(rng.randrange(256) for _ in range(10_000))
        ratio = k_ratio(data, compressor)
        assert 0.9 <= ratio <= 1.0

    def test_always_in_unit_interval(self, compressor):
        rng = random.Random(5)
        for n in (1, 2, 5, 17, 100, 999):
            data = bytes(rng.randrange(256) for _ in range(n))
            assert 0.0 < k_ratio(data, compressor) <= 1.0


class TestCompressorRegistry:
    def test_default_levels(self):
        for level in (1, 5, 9):
            c = get_compressor(f"lz-deflate-level{level}")
            assert c.algorithm_id == f"lz-deflate-level{level}"

    def test_lzma(self):
        c = get_compressor("lzma")
        assert k_hat(b"x" * 1000, c) < 100

    def test_unknown_rejected(self):
        with pytest.raises(ValidationError):
            get_compressor("snappy")


class TestSerializeMaze:
    def test_all_wall_plus_center(self):
        world = parse_maze("3 3\nWWW\nWEW\nWWW")
        assert serialize_maze(world).data == b"3 3\nWWW\nWEW\nWWW"

    def test_deterministic(self):
        world = load_builtin("t-maze")
        assert serialize_maze(world).data == serialize_maze(world).data

    def test_round_trip(self):
        for name in ("t-maze", "x-maze", "s-maze"):
            world = load_builtin(name)
            again = parse_maze(serialize_maze(world).data.decode(), name)
            assert again.rows == world.rows
            assert (again.width, again.height) == (world.width, world.height)

    def test_straight_line_more_compressible_than_x(self, compressor):
        straight = serialize_maze(load_builtin("straight-line")).data
        x_maze = serialize_maze(load_builtin("x-maze")).data
        assert k_ratio(straight, compressor) < k_ratio(x_maze, compressor)


class TestSerializeSeries:
    def test_fixed_point_lines(self):
        assert serialize_series([1.0, 1.0, 1.0]).data == b"1.000\n1.000\n1.000"

    def test_constant_series_ratio(self, compressor):
        data = serialize_series([1.0] * 1000).data
        assert k_ratio(data, compressor) <= 0.1

    def test_noise_series_ratio(self, compressor):
        # decimal text tops out near log2(10)/8 = 0.415 compressibility, so the
        # noise floor sits well below 1 but clearly above structured series
        rng = random.Random(77)
        data = serialize_series([rng.gauss(0, 1) for _ in range(1000)]).data
        ratio = k_ratio(data, compressor)
        assert ratio >= 0.3
        assert ratio > 5 * k_ratio(serialize_series([1.0] * 1000).data, compressor)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            serialize_series([])


class TestSerializePredictions:
    def test_empty(self):
        assert serialize_predictions([]) == b""

    def test_learned_four_sensor_prediction(self):
        # the canonical frequency-table case: 3-of-4 vs 1-of-4 observations
        rows = [(0.75, 0.25, 0.0), (0.25, 0.75, 0.0), (0.75, 0.25, 0.0), (0.0, 1.0, 0.0)]
        prediction = tuple(CategoricalDistribution(WER, r) for r in rows)
        event = PredictionEvent("t-maze", 5, 1, prediction, ("W", "E", "W", "E"))
        assert serialize_predictions([event]) == (
            b"5,1,1:0.750,0.250,0.000\n"
            b"5,1,2:0.250,0.750,0.000\n"
            b"5,1,3:0.750,0.250,0.000\n"
            b"5,1,4:0.000,1.000,0.000"
        )

    def test_continuous_lines(self):
        ev = PredictionEvent("d", 2, 1, ContinuousEnsemblePrediction(0.12345, 0.5, 5), 0.1)
        assert serialize_predictions([ev]) == b"2,1:0.123,0.500"

    def test_permutation_invariant(self):
        events = [
            PredictionEvent(
                "u", i, 1, ContinuousEnsemblePrediction(i / 10, 0.1, 5), 0.0
            )
            for i in range(1, 8)
        ]
        shuffled = list(events)
        random.Random(3).shuffle(shuffled)
        assert serialize_predictions(shuffled) == serialize_predictions(events)
