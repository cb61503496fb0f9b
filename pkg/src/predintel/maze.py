"""Grid-maze world and the embodied reference agent.

The agent carries four relative sensors (left, front, right, occupied cell),
moves forward or points itself in one of four absolute directions, and learns
a frequency table of sensor-state transitions. Evaluation teleports the agent
through every enumerated (location, action) configuration with learning off
and scores each one-step prediction. The agent builds no map: its umwelt is
the set of sensor-action combinations the maze affords.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from importlib import resources

from .complexity import serialize_maze, serialize_predictions
from .types import (
    CategoricalDistribution,
    PredictionEvent,
    UmweltRecord,
    ValidationError,
)

WALL, EMPTY, REWARD = "W", "E", "R"
SENSOR_LABELS = (WALL, EMPTY, REWARD)


class Orientation(str, enum.Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"


class Action(str, enum.Enum):
    MOVE = "move"
    FACE_UP = "face-up"
    FACE_DOWN = "face-down"
    FACE_LEFT = "face-left"
    FACE_RIGHT = "face-right"


_FACING = {
    Action.FACE_UP: Orientation.UP,
    Action.FACE_DOWN: Orientation.DOWN,
    Action.FACE_LEFT: Orientation.LEFT,
    Action.FACE_RIGHT: Orientation.RIGHT,
}

# (front, left, right) unit vectors per orientation; y grows downward.
_DELTAS = {
    Orientation.UP: ((0, -1), (-1, 0), (1, 0)),
    Orientation.DOWN: ((0, 1), (1, 0), (-1, 0)),
    Orientation.LEFT: ((-1, 0), (0, 1), (0, -1)),
    Orientation.RIGHT: ((1, 0), (0, -1), (0, 1)),
}

#: Fixed enumeration order: the four rotations executed from a canonical
#: upward orientation, then a forward move from each orientation.
ENUMERATION_ACTIONS = (
    (Action.FACE_UP, Orientation.UP),
    (Action.FACE_DOWN, Orientation.UP),
    (Action.FACE_LEFT, Orientation.UP),
    (Action.FACE_RIGHT, Orientation.UP),
    (Action.MOVE, Orientation.UP),
    (Action.MOVE, Orientation.DOWN),
    (Action.MOVE, Orientation.LEFT),
    (Action.MOVE, Orientation.RIGHT),
)


@dataclass(frozen=True)
class MazeWorld:
    """Immutable rectangular grid of wall/empty/reward cells.

    The outer border is always wall so the sensors are defined at every
    free cell. Reward is just a third cell feature the sensors can see; the
    agent neither seeks nor consumes it.
    """

    name: str
    width: int
    height: int
    rows: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.width < 3 or self.height < 3:
            raise ValidationError("maze must be at least 3x3 to have a wall border")
        if len(self.rows) != self.height or any(len(r) != self.width for r in self.rows):
            raise ValidationError("grid rows do not match declared dimensions")
        bad = set("".join(self.rows)) - set(SENSOR_LABELS)
        if bad:
            raise ValidationError(f"invalid cell characters: {sorted(bad)}")
        border = (
            self.rows[0]
            + self.rows[-1]
            + "".join(r[0] + r[-1] for r in self.rows)
        )
        if set(border) != {WALL}:
            raise ValidationError("outer border cells must all be wall")
        if not self.free_cells():
            raise ValidationError("maze needs at least one non-wall cell")

    def cell(self, x: int, y: int) -> str:
        return self.rows[y][x]

    def is_wall(self, x: int, y: int) -> bool:
        return self.rows[y][x] == WALL

    def free_cells(self) -> list[tuple[int, int]]:
        """All non-wall cells in row-major order."""
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if self.rows[y][x] != WALL
        ]

    def start_pose(self) -> "AgentPose":
        """Designated start: the last free cell in row-major order, facing up."""
        x, y = self.free_cells()[-1]
        return AgentPose(x, y, Orientation.UP)


@dataclass(frozen=True)
class AgentPose:
    x: int
    y: int
    orientation: Orientation


def parse_maze(text: str, name: str = "maze") -> MazeWorld:
    """Parse the canonical maze text format: a "<width> <height>" header line
    followed by one row of cell characters per line."""
    lines = text.strip().splitlines()
    if not lines:
        raise ValidationError("empty maze text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValidationError(f"line 1: expected '<width> <height>', got {lines[0]!r}")
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise ValidationError(f"line 1: non-integer dimensions {lines[0]!r}") from None
    rows = lines[1:]
    if len(rows) != height:
        raise ValidationError(f"expected {height} rows, got {len(rows)}")
    for i, row in enumerate(rows, start=2):
        if len(row) != width:
            raise ValidationError(f"line {i}: expected {width} cells, got {len(row)}")
        bad = set(row) - set(SENSOR_LABELS)
        if bad:
            raise ValidationError(f"line {i}: invalid cell characters {sorted(bad)}")
    return MazeWorld(name, width, height, tuple(rows))


BUILTIN_MAZES = (
    "t-maze",
    "straight-line",
    "u-maze",
    "square-room",
    "s-maze",
    "x-maze",
)


def load_builtin(name: str) -> MazeWorld:
    if name not in BUILTIN_MAZES:
        raise ValidationError(f"unknown built-in maze {name!r}; choose from {BUILTIN_MAZES}")
    text = resources.files("predintel.mazes").joinpath(f"{name}.maze").read_text()
    return parse_maze(text, name)


def sense(world: MazeWorld, pose: AgentPose) -> tuple[str, str, str, str]:
    """Sensor state at a pose: cells to the left of, in front of, and to the
    right of the facing direction, plus the occupied cell."""
    if world.is_wall(pose.x, pose.y):
        raise ValidationError(f"pose ({pose.x},{pose.y}) is inside a wall")
    (fdx, fdy), (ldx, ldy), (rdx, rdy) = _DELTAS[pose.orientation]
    return (
        world.cell(pose.x + ldx, pose.y + ldy),
        world.cell(pose.x + fdx, pose.y + fdy),
        world.cell(pose.x + rdx, pose.y + rdy),
        world.cell(pose.x, pose.y),
    )


def apply_action(world: MazeWorld, pose: AgentPose, action: Action) -> AgentPose:
    """Execute one action. Facing actions set an absolute orientation; a move
    into a wall leaves the pose (and therefore the sensors) unchanged."""
    if action is Action.MOVE:
        (dx, dy), _, _ = _DELTAS[pose.orientation]
        nx, ny = pose.x + dx, pose.y + dy
        if world.is_wall(nx, ny):
            return pose
        return AgentPose(nx, ny, pose.orientation)
    return AgentPose(pose.x, pose.y, _FACING[action])


SensorState = tuple[str, str, str, str]
TransitionKey = tuple[SensorState, Action]


class TransitionTable:
    """Frequency record of (sensor state, action) -> next sensor state.

    Per key it keeps one count vector per sensor over {W, E, R}; predictions
    are the per-sensor empirical frequencies, or uniform for keys never seen
    (which the random-guess correction scores as exactly zero).
    """

    def __init__(self):
        self._counts: dict[TransitionKey, list[list[int]]] = {}
        self._totals: dict[TransitionKey, int] = {}

    def record(self, state: SensorState, action: Action, next_state: SensorState):
        key = (tuple(state), action)
        if key not in self._counts:
            self._counts[key] = [[0, 0, 0] for _ in range(4)]
            self._totals[key] = 0
        per_sensor = self._counts[key]
        for sensor, label in enumerate(next_state):
            per_sensor[sensor][SENSOR_LABELS.index(label)] += 1
        self._totals[key] += 1

    def predict(self, state: SensorState, action: Action) -> tuple[CategoricalDistribution, ...]:
        key = (tuple(state), action)
        total = self._totals.get(key, 0)
        if total == 0:
            return tuple(CategoricalDistribution.uniform(SENSOR_LABELS) for _ in range(4))
        return tuple(
            CategoricalDistribution(
                SENSOR_LABELS, tuple(c / total for c in counts)
            )
            for counts in self._counts[key]
        )

    def observations(self, state: SensorState, action: Action) -> int:
        return self._totals.get((tuple(state), action), 0)

    def __len__(self) -> int:
        return len(self._totals)

    def snapshot(self) -> dict:
        """Deterministic copy of the raw counts, for mutation checks and
        session state dumps."""
        return {
            f"{''.join(state)}|{action.value}": {
                "total": self._totals[(state, action)],
                "counts": [list(c) for c in self._counts[(state, action)]],
            }
            for (state, action) in sorted(
                self._totals, key=lambda k: (k[0], k[1].value)
            )
        }


def reachable_cells(world: MazeWorld) -> list[tuple[int, int]]:
    """Free cells reachable from the start cell by forward moves, row-major."""
    start = world.start_pose()
    seen = {(start.x, start.y)}
    queue = deque([(start.x, start.y)])
    while queue:
        x, y = queue.popleft()
        for dx, dy in ((0, -1), (0, 1), (-1, 0), (1, 0)):
            nx, ny = x + dx, y + dy
            if (nx, ny) not in seen and not world.is_wall(nx, ny):
                seen.add((nx, ny))
                queue.append((nx, ny))
    return sorted(seen, key=lambda c: (c[1], c[0]))


def enumerate_configurations(world: MazeWorld) -> list[tuple[AgentPose, Action]]:
    """Every possible action at every reachable location, deterministically:
    for each cell the four rotations from a canonical upward orientation plus
    a forward move from each of the four orientations (8 per cell)."""
    configs = []
    for x, y in reachable_cells(world):
        for action, orientation in ENUMERATION_ACTIONS:
            configs.append((AgentPose(x, y, orientation), action))
    return configs


def run_training_pass(world: MazeWorld, table: TransitionTable, passes: int = 1):
    """Drive the agent through the full configuration enumeration with
    learning on, recording every transition."""
    if passes < 0:
        raise ValidationError(f"passes must be >= 0, got {passes}")
    for _ in range(passes):
        for pose, action in enumerate_configurations(world):
            state = sense(world, pose)
            next_state = sense(world, apply_action(world, pose, action))
            table.record(state, action, next_state)


def evaluate(world: MazeWorld, table: TransitionTable) -> UmweltRecord:
    """Score the agent over every enumerated configuration with learning off.

    For each (pose, action): read the sensors, take the table's prediction
    for that key, execute the action, observe the resulting sensors, and log
    one four-dimension prediction event. The table is never mutated.
    """
    events = []
    for index, (pose, action) in enumerate(enumerate_configurations(world), start=1):
        state = sense(world, pose)
        prediction = table.predict(state, action)
        next_state = sense(world, apply_action(world, pose, action))
        events.append(
            PredictionEvent(
                umwelt_id=world.name,
                state_index=index,
                time_index=1,
                prediction=prediction,
                outcome=next_state,
            )
        )
    return UmweltRecord(
        umwelt_id=world.name,
        serialization=serialize_maze(world).data,
        events=tuple(events),
        prediction_string=serialize_predictions(events),
    )


def max_oracle(world: MazeWorld) -> UmweltRecord:
    """Best-possible statistical predictor for a maze.

    A first pass collects the true outcome distribution of every
    (sensor state, action) key — including aliasing, where distinct locations
    share a key but differ in outcome — and a second pass scores every
    configuration against those empirical distributions. The result is the
    maze's intelligence ceiling.
    """
    oracle = TransitionTable()
    run_training_pass(world, oracle, passes=1)
    return evaluate(world, oracle)
