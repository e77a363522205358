/** Client-side state store: a pure fold over state events.
 *
 * The view renders only server-acknowledged state; this module applies
 * incremental diffs (null values are removal tombstones) and full
 * snapshots. Replaying the same event log always rebuilds the same
 * state, so reconnecting reproduces the identical view.
 */

import type {
  ArcState,
  AreaState,
  CameraState,
  EntityState,
  LineState,
  PlotSnapshot,
  StateEventMsg,
  StrobeState,
} from "./protocol.js";

export interface PlotView {
  rect: [number, number, number, number] | null;
  x: string;
  window: number;
  buffers: Record<string, [number, number][]>;
}

export interface ClientState {
  frame: number;
  t: number;
  camera: CameraState | null;
  entities: Record<string, EntityState>;
  lines: Record<string, LineState>;
  arcs: Record<string, ArcState>;
  areas: Record<string, AreaState>;
  variables: Record<string, number>;
  channels: Record<string, number>;
  recordingFlags: Record<string, boolean>;
  plots: Record<string, PlotView>;
  traces: Record<string, [number, number, number, number][]>;
  strobes: Record<string, StrobeState>;
  faults: Record<string, string>;
}

export function emptyState(): ClientState {
  return {
    frame: -1, t: 0, camera: null,
    entities: {}, lines: {}, arcs: {}, areas: {},
    variables: {}, channels: {}, recordingFlags: {},
    plots: {}, traces: {}, strobes: {}, faults: {},
  };
}

function mergeCategory<T>(target: Record<string, T>,
                          patch: Record<string, T | null> | undefined): boolean {
  if (!patch) {
    return false;
  }
  let changed = false;
  for (const [key, value] of Object.entries(patch)) {
    if (value === null) {
      if (key in target) {
        delete target[key];
        changed = true;
      }
    } else {
      target[key] = value;
      changed = true;
    }
  }
  return changed;
}

function replaceCategory<T>(table: Record<string, T | null> | undefined): Record<string, T> {
  const out: Record<string, T> = {};
  for (const [key, value] of Object.entries(table ?? {})) {
    if (value !== null) {
      out[key] = value;
    }
  }
  return out;
}

function plotFromSnapshot(snap: PlotSnapshot): PlotView {
  const buffers: Record<string, [number, number][]> = {};
  for (const [name, samples] of Object.entries(snap.buffers)) {
    buffers[name] = samples.map((s) => [s[0], s[1]]);
  }
  return { rect: snap.rect, x: snap.x, window: snap.window, buffers };
}

/** Apply one state event; returns whether anything visible changed. */
export function applyDiff(state: ClientState, msg: StateEventMsg): boolean {
  if (msg.event !== "state" || typeof msg.frame !== "number"
      || typeof msg.t !== "number") {
    throw new Error("malformed state event");
  }
  let changed = false;
  if (msg.full) {
    state.entities = replaceCategory(msg.entities);
    state.lines = replaceCategory(msg.lines);
    state.arcs = replaceCategory(msg.arcs);
    state.areas = replaceCategory(msg.areas);
    state.variables = replaceCategory(msg.variables);
    state.channels = replaceCategory(msg.channels);
    state.recordingFlags = replaceCategory(msg.recording_flags);
    state.faults = replaceCategory(msg.faults);
    state.plots = {};
    for (const [id, snap] of Object.entries(msg.plots ?? {})) {
      state.plots[id] = plotFromSnapshot(snap);
    }
    state.strobes = { ...(msg.strobes ?? {}) };
    state.traces = {};
    changed = true;
  } else {
    changed = mergeCategory(state.entities, msg.entities) || changed;
    changed = mergeCategory(state.lines, msg.lines) || changed;
    changed = mergeCategory(state.arcs, msg.arcs) || changed;
    changed = mergeCategory(state.areas, msg.areas) || changed;
    changed = mergeCategory(state.variables, msg.variables) || changed;
    changed = mergeCategory(state.channels, msg.channels) || changed;
    changed = mergeCategory(state.recordingFlags, msg.recording_flags) || changed;
    changed = mergeCategory(state.faults, msg.faults) || changed;
    if (msg.strobes && Object.keys(msg.strobes).length) {
      state.strobes = { ...state.strobes, ...msg.strobes };
      changed = true;
    }
    for (const [graphId, append] of Object.entries(msg.plot_appends ?? {})) {
      const plot = state.plots[graphId]
        ?? (state.plots[graphId] = { rect: null, x: append.x, window: 10, buffers: {} });
      plot.x = append.x;
      for (const [series, sample] of Object.entries(append.samples)) {
        const buf = plot.buffers[series] ?? (plot.buffers[series] = []);
        buf.push([sample[0], sample[1]]);
        if (plot.x === "time") {
          // same trim rule as the engine: keep the rolling window
          const cutoff = msg.t - plot.window;
          while (buf.length && buf[0][0] < cutoff) {
            buf.shift();
          }
        }
      }
      changed = true;
    }
    for (const [entityId, sample] of Object.entries(msg.recording_appends ?? {})) {
      const trace = state.traces[entityId] ?? (state.traces[entityId] = []);
      trace.push(sample);
      changed = true;
    }
  }
  if (msg.camera) {
    state.camera = msg.camera;
    changed = true;
  }
  state.frame = msg.frame;
  state.t = msg.t;
  return changed;
}

/** Fold a whole event log (state events only) into a fresh state. */
export function replayLog(events: Iterable<unknown>): ClientState {
  const state = emptyState();
  for (const event of events) {
    const msg = event as StateEventMsg;
    if (msg && (msg as { event?: string }).event === "state") {
      applyDiff(state, msg);
    }
  }
  return state;
}
