/** Wire types for the session protocol (see ../../protocol.md). */

export type Mode = "select" | "sketch" | "annotation" | "graph" | "record" | "play";

export interface CameraState {
  pos: [number, number, number];
  quat: [number, number, number, number]; // (w, x, y, z), camera -> world
  fx: number;
  fy: number;
  cx: number;
  cy: number;
  width: number;
  height: number;
}

export type StrokePoint = [number, number, number]; // u, v, t

export type Command =
  | { type: "hello"; protocolVersion: number; id?: number }
  | { type: "tap"; u: number; v: number; id?: number }
  | { type: "stroke"; points: StrokePoint[]; id?: number }
  | { type: "labelEdit"; target: string; text: string; id?: number }
  | { type: "mode"; mode: Mode; id?: number }
  | { type: "placeGraph"; rect: [number, number, number, number]; id?: number }
  | { type: "scrub"; t: number; id?: number }
  | { type: "play"; id?: number }
  | { type: "pause"; id?: number };

export interface EntityState {
  screen: [number, number] | null;
  world: [number, number, number] | null;
  found: boolean;
  staleSince: number | null;
}

export interface LineState {
  p1: [number, number, number];
  p2: [number, number, number];
  kind: "static" | "dynamic" | "annotation";
  label: string | null;
  value: number;
  perpendicularTo: string | null;
}

export interface ArcState {
  lineA: string;
  lineB: string;
  vertex: [number, number, number];
  label: string | null;
  value: number | null;
}

export interface AreaState {
  boundary: string[];
  vertices: [number, number, number][];
  label: string | null;
  value: number | null;
}

export interface PlotAppend {
  x: string; // "time" or a variable name
  samples: Record<string, [number, number]>;
}

export interface PlotSnapshot {
  rect: [number, number, number, number];
  x: string;
  window: number;
  buffers: Record<string, [number, number][]>;
}

export interface StrobeState {
  spacing: number;
  markers: [number, number, number][];
}

/** `null` entries in incremental categories are removal tombstones. */
export interface StateEventMsg {
  event: "state";
  frame: number;
  t: number;
  full?: boolean;
  camera?: CameraState;
  entities?: Record<string, EntityState | null>;
  lines?: Record<string, LineState | null>;
  arcs?: Record<string, ArcState | null>;
  areas?: Record<string, AreaState | null>;
  variables?: Record<string, number | null>;
  channels?: Record<string, number | null>;
  recording_flags?: Record<string, boolean | null>;
  plots?: Record<string, PlotSnapshot>;
  plot_appends?: Record<string, PlotAppend>;
  recording_appends?: Record<string, [number, number, number, number]>;
  strobes?: Record<string, StrobeState>;
  faults?: Record<string, string | null>;
}

export interface AckEventMsg {
  event: "ack";
  commandId: number | null;
}

export interface FaultEventMsg {
  event: "fault";
  code: string;
  message: string;
  subjectId: string | null;
}

export type EventMsg = StateEventMsg | AckEventMsg | FaultEventMsg;

export function parseEvent(text: string): EventMsg {
  const data = JSON.parse(text) as Record<string, unknown>;
  if (data.event !== "state" && data.event !== "ack" && data.event !== "fault") {
    throw new Error(`unknown event ${String(data.event)}`);
  }
  if (data.event === "state" && typeof data.frame !== "number") {
    throw new Error("state event without a frame number");
  }
  return data as unknown as EventMsg;
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
