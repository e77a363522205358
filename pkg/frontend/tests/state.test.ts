import { expect, test } from "vitest";

import type { StateEventMsg } from "../src/protocol.js";
import { applyDiff, emptyState, replayLog } from "../src/state.js";

const CAMERA = {
  pos: [0, 0, 1.5] as [number, number, number],
  quat: [0, 1, 0, 0] as [number, number, number, number],
  fx: 600, fy: 600, cx: 320, cy: 240, width: 640, height: 480,
};

function tick(frame: number, patch: Partial<StateEventMsg>): StateEventMsg {
  return { event: "state", frame, t: frame / 20, ...patch };
}

test("incremental diffs merge and tombstones delete", () => {
  const state = emptyState();
  applyDiff(state, tick(0, {
    camera: CAMERA,
    variables: { angle: 30 },
    faults: { "channel:bad": "DivisionByZero" },
  }));
  expect(state.variables.angle).toBe(30);
  expect(state.faults["channel:bad"]).toBe("DivisionByZero");

  applyDiff(state, tick(1, { variables: { angle: 28 }, faults: { "channel:bad": null } }));
  expect(state.variables.angle).toBe(28);
  expect("channel:bad" in state.faults).toBe(false);
  expect(state.camera).toEqual(CAMERA);
  expect(state.frame).toBe(1);
});

test("an empty diff changes nothing (no repaint)", () => {
  const state = emptyState();
  applyDiff(state, tick(0, { camera: CAMERA, variables: { angle: 30 } }));
  const before = JSON.stringify(state);
  const changed = applyDiff(state, tick(1, {}));
  expect(changed).toBe(false);
  const after = JSON.parse(JSON.stringify(state));
  expect(JSON.stringify({ ...after, frame: 0, t: 0 }))
    .toBe(JSON.stringify({ ...JSON.parse(before), frame: 0, t: 0 }));
});

test("full snapshots replace everything", () => {
  const state = emptyState();
  applyDiff(state, tick(0, { variables: { stale: 1 }, camera: CAMERA }));
  applyDiff(state, {
    ...tick(5, {}),
    full: true,
    camera: CAMERA,
    variables: { angle: 10 },
    plots: { "graph-1": { rect: [0, 0, 0.5, 0.3], x: "time", window: 10,
                          buffers: { angle: [[0, 30], [0.05, 29]] } } },
    strobes: { "entity-1": { spacing: 0, markers: [[0, 0, 0]] } },
  });
  expect("stale" in state.variables).toBe(false);
  expect(state.variables.angle).toBe(10);
  expect(state.plots["graph-1"].buffers.angle.length).toBe(2);
  expect(state.strobes["entity-1"].markers.length).toBe(1);
});

test("plot appends accumulate and trim to the window", () => {
  const state = emptyState();
  for (let i = 0; i < 300; i += 1) {
    applyDiff(state, tick(i, {
      plot_appends: { "graph-1": { x: "time", samples: { a: [i / 20, i] } } },
    }));
  }
  const buf = state.plots["graph-1"].buffers.a;
  expect(buf.length).toBeLessThanOrEqual(10 * 20 + 1);
  expect(buf[buf.length - 1]).toEqual([299 / 20, 299]);
  expect(buf[0][0]).toBeGreaterThanOrEqual(299 / 20 - 10);
});

test("replaying the same event log reproduces the identical state", () => {
  const log: StateEventMsg[] = [
    tick(0, { camera: CAMERA, variables: { a: 1 }, entities: {
      "entity-1": { screen: [320, 240], world: [0, 0, 0], found: true, staleSince: null } } }),
    tick(1, { variables: { a: 2 } }),
    tick(2, { variables: { a: null }, channels: { out: 5 } }),
  ];
  const first = replayLog(log);
  const second = replayLog(log);
  expect(JSON.stringify(first)).toBe(JSON.stringify(second));
  expect("a" in first.variables).toBe(false);
  expect(first.channels.out).toBe(5);
});

test("malformed events throw for the caller to log and skip", () => {
  expect(() => applyDiff(emptyState(), { event: "state" } as never)).toThrow();
});
