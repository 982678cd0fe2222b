import type { MetricsRecord } from "./types.js";

/**
 * Accuracy/coverage curves for the finished (or in-progress) session.
 * Geometry is computed by a pure function so tests can check scaling
 * without a canvas; drawing is a thin stroke-the-points wrapper.
 */

export interface CurvePoint {
  x: number;
  y: number;
  round: number;
  value: number;
}

export type CurveKey = "target_accuracy" | "compound_coverage" | "source_accuracy";

/**
 * Scale one metric series into pixel space.  X spans the round range,
 * Y is fixed to [0, 1] (all plotted metrics are fractions; canvas Y
 * grows downward).  Rounds with a null value are skipped.
 */
export function curvePoints(
  metrics: MetricsRecord[],
  key: CurveKey,
  width: number,
  height: number,
  pad = 24,
): CurvePoint[] {
  const usable = metrics.filter((rec) => rec[key] !== null);
  if (usable.length === 0) return [];
  const rounds = usable.map((rec) => rec.round);
  const minRound = Math.min(...rounds);
  const maxRound = Math.max(...rounds);
  const spanX = Math.max(maxRound - minRound, 1);
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  return usable.map((rec) => {
    const value = rec[key] as number;
    return {
      x: pad + ((rec.round - minRound) / spanX) * innerW,
      y: pad + (1 - value) * innerH,
      round: rec.round,
      value,
    };
  });
}

const CURVES: { key: CurveKey; color: string; label: string }[] = [
  { key: "target_accuracy", color: "#c0392b", label: "target accuracy" },
  { key: "compound_coverage", color: "#2471a3", label: "compound coverage" },
];

export function drawCurves(canvas: HTMLCanvasElement, metrics: MetricsRecord[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(24, 24, width - 48, height - 48);

  for (const curve of CURVES) {
    const points = curvePoints(metrics, curve.key, width, height);
    if (points.length === 0) continue;
    ctx.strokeStyle = curve.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    points.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
    ctx.stroke();
    ctx.fillStyle = curve.color;
    for (const p of points) {
      ctx.beginPath();
      ctx.arc(p.x, p.y, 3, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  ctx.font = "12px sans-serif";
  CURVES.forEach((curve, i) => {
    ctx.fillStyle = curve.color;
    ctx.fillText(curve.label, 32, height - 6 - 14 * i);
  });
}
