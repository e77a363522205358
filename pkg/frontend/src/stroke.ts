/** Pointer capture: traces to stroke commands, mode-aware. */

import type { Command, Mode, StrokePoint } from "./protocol.js";

export const MAX_STROKE_POINTS = 60;

/** Thin a pointer trace to at most `max` points, keeping both endpoints
 * exactly; short traces pass through verbatim. */
export function downsample(points: StrokePoint[],
                           max: number = MAX_STROKE_POINTS): StrokePoint[] {
  if (points.length <= max) {
    return points.slice();
  }
  const out: StrokePoint[] = [];
  const last = points.length - 1;
  for (let i = 0; i < max; i += 1) {
    out.push(points[Math.round((i * last) / (max - 1))]);
  }
  out[0] = points[0];
  out[max - 1] = points[last];
  return out;
}

/** Map a finished pointer trace to the command the current mode implies:
 * a tap at the release point in select mode, a stroke while sketching. */
export function traceToCommand(mode: Mode, points: StrokePoint[]): Command | null {
  if (points.length === 0) {
    return null;
  }
  if (mode === "select") {
    const p = points[points.length - 1];
    return { type: "tap", u: p[0], v: p[1] };
  }
  if (mode === "sketch" || mode === "annotation") {
    if (points.length < 2) {
      return null;
    }
    return { type: "stroke", points: downsample(points) };
  }
  return null;
}

/** Accumulates pointer samples between pointerdown and pointerup. */
export class StrokeRecorder {
  private points: StrokePoint[] = [];
  private active = false;
  private started = 0;

  begin(u: number, v: number, now: number): void {
    this.active = true;
    this.started = now;
    this.points = [[u, v, 0]];
  }

  move(u: number, v: number, now: number): void {
    if (this.active) {
      this.points.push([u, v, (now - this.started) / 1000]);
    }
  }

  end(u: number, v: number, now: number): StrokePoint[] {
    if (!this.active) {
      return [];
    }
    this.move(u, v, now);
    this.active = false;
    return this.points;
  }
}
