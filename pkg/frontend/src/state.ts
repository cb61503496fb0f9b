// Pure view-state reducer. Every field comes straight from a service payload;
// replaying the same event stream always produces the same final view.

import type {
  DistributionPayload,
  MazePayload,
  PosePayload,
  StreamEvent,
} from "./types.js";

export interface ChartPoint {
  seq: number;
  value: number;
}

export interface ChartSeries {
  // one series per umwelt set, e.g. "t-maze" or "straight-line+t-maze"
  key: string;
  points: ChartPoint[];
}

export interface ViewState {
  sessionId: string | null;
  maze: MazePayload | null;
  pose: PosePayload | null;
  sensors: string[];
  learning: boolean;
  lastAction: string | null;
  lastPrediction: DistributionPayload[] | null;
  lastOutcome: string[] | null;
  lastPm: number | null;
  chart: ChartSeries[];
  lastSeq: number;
}

export function initialView(): ViewState {
  return {
    sessionId: null,
    maze: null,
    pose: null,
    sensors: [],
    learning: true,
    lastAction: null,
    lastPrediction: null,
    lastOutcome: null,
    lastPm: null,
    chart: [],
    lastSeq: 0,
  };
}

export function applyEvent(view: ViewState, event: StreamEvent): ViewState {
  if (event.seq <= view.lastSeq) {
    return view; // already applied (reconnect overlap)
  }
  const next: ViewState = { ...view, lastSeq: event.seq };
  switch (event.type) {
    case "session": {
      const s = event.state;
      next.sessionId = s.session_id;
      next.maze = s.maze;
      next.pose = s.pose;
      next.sensors = s.sensors;
      next.learning = s.learning;
      break;
    }
    case "action": {
      next.pose = event.pose;
      next.sensors = event.sensors_after;
      next.lastAction = event.action;
      next.lastPrediction = event.prediction;
      next.lastOutcome = event.sensors_after;
      next.lastPm = event.pm;
      next.learning = event.learning;
      break;
    }
    case "learning": {
      next.learning = event.enabled;
      break;
    }
    case "intelligence": {
      const key = [...event.umwelts].sort().join("+");
      const series = view.chart.find((s) => s.key === key);
      const point = { seq: event.seq, value: event.intelligence };
      next.chart = series
        ? view.chart.map((s) =>
            s.key === key ? { ...s, points: [...s.points, point] } : s,
          )
        : [...view.chart, { key, points: [point] }];
      break;
    }
  }
  return next;
}

export function applyAll(view: ViewState, events: StreamEvent[]): ViewState {
  return events.reduce(applyEvent, view);
}

const AGENT_MARK: Record<PosePayload["orientation"], string> = {
  up: "^",
  down: "v",
  left: "<",
  right: ">",
};

const CELL_MARK: Record<string, string> = { W: "#", E: ".", R: "*" };

export function gridToText(view: ViewState): string {
  if (!view.maze) return "(no maze)";
  const lines = view.maze.rows.map((row) =>
    [...row].map((c) => CELL_MARK[c] ?? "?"),
  );
  if (view.pose) {
    lines[view.pose.y][view.pose.x] = AGENT_MARK[view.pose.orientation];
  }
  return lines.map((cells) => cells.join("")).join("\n");
}

function predictionToText(view: ViewState): string {
  if (!view.lastPrediction) return "(no prediction yet)";
  return view.lastPrediction
    .map((dist, i) => {
      const cols = dist.labels
        .map((label, j) => `${label}=${dist.probs[j].toFixed(3)}`)
        .join(" ");
      const observed = view.lastOutcome ? view.lastOutcome[i] : "?";
      return `S${i + 1}: ${cols} -> ${observed}`;
    })
    .join("\n");
}

export function chartToText(view: ViewState): string {
  if (view.chart.length === 0) return "(no measurements)";
  return view.chart
    .map(
      (s) =>
        `${s.key}: ${s.points.map((p) => p.value.toFixed(4)).join(" -> ")}`,
    )
    .join("\n");
}

export function viewToText(view: ViewState): string {
  const parts = [
    gridToText(view),
    `sensors: ${view.sensors.join(" ")}`,
    `learning: ${view.learning ? "on" : "off"}`,
    `last action: ${view.lastAction ?? "(none)"}  pm: ${
      view.lastPm === null ? "-" : view.lastPm.toFixed(4)
    }`,
    predictionToText(view),
    chartToText(view),
  ];
  return parts.join("\n---\n");
}
