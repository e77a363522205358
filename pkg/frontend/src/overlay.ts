/** Overlay rendering: state -> display list -> canvas.
 *
 * The display list is plain data so the render path is testable without
 * a DOM; the painter at the bottom executes it on a 2D context.
 */

import { planeToWorld, projectToScreen, type PlaneDef, type Vec3 } from "./project.js";
import type { CameraState } from "./protocol.js";
import type { ClientState } from "./state.js";

export type DisplayOp =
  | { kind: "line"; a: [number, number]; b: [number, number]; style: string }
  | { kind: "disc"; at: [number, number]; r: number; style: string }
  | { kind: "polygon"; points: [number, number][]; style: string }
  | { kind: "label"; at: [number, number]; text: string }
  | { kind: "polyline"; points: [number, number][]; style: string };

/** "name = value" with a compact number: 40 not 40.00, else 2 decimals. */
export function formatLabel(name: string, value: number | null): string {
  if (value === null || !Number.isFinite(value)) {
    return `${name} = ?`;
  }
  const rounded = Math.round(value);
  const text = Math.abs(value - rounded) < 5e-3 ? String(rounded) : value.toFixed(2);
  return `${name} = ${text}`;
}

function project(camera: CameraState | null, p: Vec3): [number, number] | null {
  return camera ? projectToScreen(camera, p) : null;
}

/** Build the overlay display list for the current state (pure). */
export function buildDisplayList(state: ClientState,
                                 plane: PlaneDef | null = null): DisplayOp[] {
  const ops: DisplayOp[] = [];
  const camera = state.camera;

  for (const [id, entity] of Object.entries(state.entities).sort()) {
    if (!entity.screen) {
      continue;
    }
    const style = entity.found ? "entity" : "entity-stale";
    ops.push({ kind: "disc", at: [entity.screen[0], entity.screen[1]], r: 9, style });
    ops.push({ kind: "label", at: [entity.screen[0] + 12, entity.screen[1] - 12], text: id });
  }

  for (const [, line] of Object.entries(state.lines).sort()) {
    const a = project(camera, line.p1);
    const b = project(camera, line.p2);
    if (!a || !b) {
      continue;
    }
    ops.push({ kind: "line", a, b, style: line.kind });
    if (line.label) {
      ops.push({
        kind: "label",
        at: [(a[0] + b[0]) / 2 + 8, (a[1] + b[1]) / 2 - 8],
        text: formatLabel(line.label, line.value),
      });
    }
  }

  for (const [, arc] of Object.entries(state.arcs).sort()) {
    const v = project(camera, arc.vertex);
    if (!v) {
      continue;
    }
    ops.push({ kind: "disc", at: v, r: 14, style: "arc" });
    if (arc.label) {
      ops.push({ kind: "label", at: [v[0] + 16, v[1] + 16],
                 text: formatLabel(arc.label, arc.value) });
    }
  }

  for (const [, area] of Object.entries(state.areas).sort()) {
    const pts: [number, number][] = [];
    for (const vertex of area.vertices) {
      const p = project(camera, vertex);
      if (p) {
        pts.push(p);
      }
    }
    if (pts.length >= 3) {
      ops.push({ kind: "polygon", points: pts, style: "area" });
      if (area.label) {
        const cx = pts.reduce((s, p) => s + p[0], 0) / pts.length;
        const cy = pts.reduce((s, p) => s + p[1], 0) / pts.length;
        ops.push({ kind: "label", at: [cx, cy], text: formatLabel(area.label, area.value) });
      }
    }
  }

  for (const [, trace] of Object.entries(state.traces).sort()) {
    const pts: [number, number][] = [];
    for (const sample of trace) {
      const p = project(camera, [sample[1], sample[2], sample[3]]);
      if (p) {
        pts.push(p);
      }
    }
    if (pts.length >= 2) {
      ops.push({ kind: "polyline", points: pts, style: "trace" });
    }
  }

  for (const [, strobe] of Object.entries(state.strobes).sort()) {
    for (const marker of strobe.markers) {
      const p = project(camera, marker);
      if (p) {
        ops.push({ kind: "disc", at: p, r: 5, style: "strobe" });
      }
    }
  }

  if (plane) {
    ops.push(...plotOps(state, plane));
  }
  return ops;
}

/** Plot panels live on the reference plane; series autoscale with 10% pad. */
function plotOps(state: ClientState, plane: PlaneDef): DisplayOp[] {
  const ops: DisplayOp[] = [];
  const camera = state.camera;
  for (const [, plot] of Object.entries(state.plots).sort()) {
    if (!plot.rect || !camera) {
      continue;
    }
    const [a0, b0, w, h] = plot.rect;
    const corner = (da: number, db: number) =>
      project(camera, planeToWorld(plane, a0 + da * w, b0 + db * h));
    const c00 = corner(0, 0), c10 = corner(1, 0), c11 = corner(1, 1), c01 = corner(0, 1);
    if (!c00 || !c10 || !c11 || !c01) {
      continue;
    }
    ops.push({ kind: "polygon", points: [c00, c10, c11, c01], style: "plot-frame" });
    const series = Object.entries(plot.buffers).sort();
    let xMin = Infinity, xMax = -Infinity, yMin = Infinity, yMax = -Infinity;
    for (const [, buf] of series) {
      for (const [x, y] of buf) {
        xMin = Math.min(xMin, x); xMax = Math.max(xMax, x);
        yMin = Math.min(yMin, y); yMax = Math.max(yMax, y);
      }
    }
    if (!Number.isFinite(xMin) || xMax === xMin) {
      continue;
    }
    const pad = 0.1 * (yMax - yMin || 1);
    yMin -= pad; yMax += pad;
    for (const [name, buf] of series) {
      const pts: [number, number][] = [];
      for (const [x, y] of buf) {
        const fa = (x - xMin) / (xMax - xMin);
        const fb = (y - yMin) / (yMax - yMin);
        const p = project(camera, planeToWorld(plane, a0 + fa * w, b0 + fb * h));
        if (p) {
          pts.push(p);
        }
      }
      if (pts.length >= 2) {
        ops.push({ kind: "polyline", points: pts, style: `series:${name}` });
      }
    }
  }
  return ops;
}

/** Minimal structural slice of CanvasRenderingContext2D the painter needs. */
export interface Painter {
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
}

const STYLE_COLORS: Record<string, string> = {
  "static": "#1b6ef3",
  "dynamic": "#e8590c",
  "annotation": "#c2255c",
  "entity": "#ffffff",
  "entity-stale": "#adb5bd",
  "arc": "#7048e8",
  "area": "#2b8a3e",
  "strobe": "#e8590c",
  "trace": "#fab005",
  "plot-frame": "#343a40",
};

function colorFor(style: string): string {
  if (style.startsWith("series:")) {
    const palette = ["#1b6ef3", "#e8590c", "#2b8a3e", "#7048e8", "#c2255c"];
    let hash = 0;
    for (const ch of style) {
      hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
    }
    return palette[hash % palette.length];
  }
  return STYLE_COLORS[style] ?? "#212529";
}

export function drawDisplayList(ctx: Painter, ops: DisplayOp[]): void {
  ctx.font = "13px sans-serif";
  for (const op of ops) {
    switch (op.kind) {
      case "line":
        ctx.strokeStyle = colorFor(op.style);
        ctx.lineWidth = op.style === "annotation" ? 1.5 : 2.5;
        ctx.beginPath();
        ctx.moveTo(op.a[0], op.a[1]);
        ctx.lineTo(op.b[0], op.b[1]);
        ctx.stroke();
        break;
      case "disc":
        ctx.fillStyle = colorFor(op.style);
        ctx.beginPath();
        ctx.arc(op.at[0], op.at[1], op.r, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "polygon":
        ctx.strokeStyle = colorFor(op.style);
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        op.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
        ctx.closePath();
        ctx.stroke();
        break;
      case "polyline":
        ctx.strokeStyle = colorFor(op.style);
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        op.points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
        ctx.stroke();
        break;
      case "label":
        ctx.fillStyle = "#111111";
        ctx.fillText(op.text, op.at[0], op.at[1]);
        break;
    }
  }
}
