// Minimal canvas line chart for the intelligence history: one polyline per
// umwelt-set series, values straight from the service.

import type { ChartSeries } from "./state.js";

const COLORS = ["#2e6fdb", "#d97706", "#0f9d58", "#b33dc6", "#d33"];
const PAD = 28;

export function drawChart(canvas: HTMLCanvasElement, series: ChartSeries[]): void {
  const ctx = canvas.getContext("2d")!;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, width, height);

  const all = series.flatMap((s) => s.points);
  if (all.length === 0) {
    ctx.fillStyle = "#888";
    ctx.fillText("no measurements yet", PAD, height / 2);
    return;
  }
  const maxSeq = Math.max(...all.map((p) => p.seq), 1);
  const maxVal = Math.max(...all.map((p) => p.value), 1e-9);

  const toX = (seq: number) => PAD + (seq / maxSeq) * (width - 2 * PAD);
  const toY = (value: number) => height - PAD - (value / maxVal) * (height - 2 * PAD);

  // axes
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(PAD, PAD / 2);
  ctx.lineTo(PAD, height - PAD);
  ctx.lineTo(width - PAD / 2, height - PAD);
  ctx.stroke();
  ctx.fillStyle = "#666";
  ctx.fillText(maxVal.toFixed(2), 2, PAD / 2 + 8);
  ctx.fillText("0", 2, height - PAD);

  series.forEach((s, index) => {
    const color = COLORS[index % COLORS.length];
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.points.forEach((p, i) => {
      const x = toX(p.seq);
      const y = toY(p.value);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    for (const p of s.points) {
      ctx.beginPath();
      ctx.arc(toX(p.seq), toY(p.value), 3, 0, 2 * Math.PI);
      ctx.fill();
    }
    ctx.fillText(s.key, PAD + 4, PAD / 2 + 12 * (index + 1));
  });
}
