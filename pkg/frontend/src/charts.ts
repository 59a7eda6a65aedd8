// Chart geometry as pure functions: rolling strip-chart polylines for the
// robot position axes and needle angles for the orientation dials. The DOM
// layer feeds these into SVG attributes.

import type { TracePoint } from "./state.js";

export interface StripRange {
  min: number;
  max: number;
}

// Padded envelope of the series; degenerate series get a symmetric band so
// a flat line renders mid-chart instead of collapsing the scale.
export function autoRange(values: number[], pad = 0.1): StripRange {
  if (values.length === 0) {
    return { min: -0.5, max: 0.5 };
  }
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === max) {
    return { min: min - 0.5, max: max + 0.5 };
  }
  const margin = (max - min) * pad;
  return { min: min - margin, max: max + margin };
}

// SVG polyline points for a right-aligned rolling window: the newest sample
// sits at x = width, and a full TRACE-sized series spans the whole chart.
export function stripPath(
  values: number[],
  width: number,
  height: number,
  range: StripRange,
  capacity?: number,
): string {
  if (values.length === 0 || width <= 0 || height <= 0) {
    return "";
  }
  const span = range.max - range.min;
  if (span <= 0) {
    throw new Error("range must have max > min");
  }
  const slots = Math.max(capacity ?? values.length, values.length);
  const step = slots > 1 ? width / (slots - 1) : 0;
  const x0 = width - (values.length - 1) * step;
  const points: string[] = [];
  for (let i = 0; i < values.length; i++) {
    const frac = (values[i] - range.min) / span;
    const y = height - Math.min(Math.max(frac, 0), 1) * height;
    points.push(`${(x0 + i * step).toFixed(2)},${y.toFixed(2)}`);
  }
  return points.join(" ");
}

export function traceSeries(trace: TracePoint[], pick: (p: TracePoint) => number): number[] {
  return trace.map(pick);
}

// CSS rotation (degrees, clockwise) for an orientation dial needle; zero
// radians points straight up.
export function dialAngle(radians: number): number {
  return (radians * 180) / Math.PI;
}
