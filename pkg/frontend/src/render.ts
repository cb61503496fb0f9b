// DOM rendering of the view state: maze canvas (green agent circle, red
// reward dot), sensor readout, prediction bars, learning toggle, chart.

import { drawChart } from "./chart.js";
import type { ViewState } from "./state.js";

const CELL = 28;

const WALL_COLOR = "#3b3b46";
const EMPTY_COLOR = "#f4f2ec";
const AGENT_COLOR = "#2e9e44";
const REWARD_COLOR = "#d33";

export interface Panels {
  maze: HTMLCanvasElement;
  sensors: HTMLElement;
  prediction: HTMLElement;
  pm: HTMLElement;
  learning: HTMLInputElement;
  chart: HTMLCanvasElement;
  banner: HTMLElement;
}

export function renderView(view: ViewState, panels: Panels): void {
  renderMaze(view, panels.maze);
  renderSensors(view, panels.sensors);
  renderPrediction(view, panels.prediction);
  panels.pm.textContent =
    view.lastPm === null
      ? "no action yet"
      : `${view.lastAction}: match ${view.lastPm.toFixed(4)}`;
  panels.learning.checked = view.learning;
  drawChart(panels.chart, view.chart);
}

function renderMaze(view: ViewState, canvas: HTMLCanvasElement): void {
  if (!view.maze) return;
  const { width, height, rows } = view.maze;
  canvas.width = width * CELL;
  canvas.height = height * CELL;
  const ctx = canvas.getContext("2d")!;
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const cell = rows[y][x];
      ctx.fillStyle = cell === "W" ? WALL_COLOR : EMPTY_COLOR;
      ctx.fillRect(x * CELL, y * CELL, CELL, CELL);
      if (cell === "R") {
        ctx.fillStyle = REWARD_COLOR;
        ctx.beginPath();
        ctx.arc(x * CELL + CELL / 2, y * CELL + CELL / 2, CELL / 5, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  }
  if (view.pose) {
    const { x, y, orientation } = view.pose;
    const cx = x * CELL + CELL / 2;
    const cy = y * CELL + CELL / 2;
    ctx.fillStyle = AGENT_COLOR;
    ctx.beginPath();
    ctx.arc(cx, cy, CELL / 2.6, 0, 2 * Math.PI);
    ctx.fill();
    // facing marker
    const tip: Record<string, [number, number]> = {
      up: [0, -CELL / 2.6],
      down: [0, CELL / 2.6],
      left: [-CELL / 2.6, 0],
      right: [CELL / 2.6, 0],
    };
    const [dx, dy] = tip[orientation];
    ctx.strokeStyle = "#fff";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.lineTo(cx + dx, cy + dy);
    ctx.stroke();
  }
}

function renderSensors(view: ViewState, element: HTMLElement): void {
  const names = ["S1 left", "S2 front", "S3 right", "S4 here"];
  element.innerHTML = view.sensors
    .map(
      (value, i) =>
        `<span class="sensor sensor-${value}">${names[i]}: ${value}</span>`,
    )
    .join(" ");
}

function renderPrediction(view: ViewState, element: HTMLElement): void {
  if (!view.lastPrediction) {
    element.innerHTML = "<em>take an action to see its prediction</em>";
    return;
  }
  const rows = view.lastPrediction
    .map((dist, i) => {
      const bars = dist.labels
        .map((label, j) => {
          const pct = Math.round(dist.probs[j] * 100);
          return (
            `<div class="bar-wrap" title="${label}: ${dist.probs[j].toFixed(3)}">` +
            `<div class="bar bar-${label}" style="height:${pct}%"></div>` +
            `<span class="bar-label">${label}</span></div>`
          );
        })
        .join("");
      const observed = view.lastOutcome ? view.lastOutcome[i] : "?";
      return (
        `<div class="pred-row"><span class="pred-name">S${i + 1}</span>` +
        `<div class="bars">${bars}</div>` +
        `<span class="pred-outcome">saw ${observed}</span></div>`
      );
    })
    .join("");
  element.innerHTML = rows;
}

export function showBanner(panels: Panels, message: string | null): void {
  panels.banner.textContent = message ?? "";
  panels.banner.style.display = message ? "block" : "none";
}
