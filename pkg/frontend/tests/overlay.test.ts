import { expect, test } from "vitest";

import { buildDisplayList, drawDisplayList, formatLabel, type Painter } from "../src/overlay.js";
import type { StateEventMsg } from "../src/protocol.js";
import { applyDiff, emptyState } from "../src/state.js";

const CAMERA = {
  pos: [0, 0, 1.5] as [number, number, number],
  quat: [0, 1, 0, 0] as [number, number, number, number],
  fx: 600, fy: 600, cx: 320, cy: 240, width: 640, height: 480,
};

function stateWith(patch: Partial<StateEventMsg>) {
  const state = emptyState();
  applyDiff(state, { event: "state", frame: 0, t: 0, camera: CAMERA, ...patch });
  return state;
}

test("labels render as 'name = value'", () => {
  expect(formatLabel("angle", 40)).toBe("angle = 40");
  expect(formatLabel("angle", 40.0004)).toBe("angle = 40");
  expect(formatLabel("length", 0.35)).toBe("length = 0.35");
  expect(formatLabel("x", null)).toBe("x = ?");
  const state = stateWith({
    arcs: { "arc-1": { lineA: "line-1", lineB: "line-2",
                       vertex: [0, 0.45, 0], label: "angle", value: 40 } },
  });
  const labels = buildDisplayList(state).filter((op) => op.kind === "label");
  expect(labels.some((op) => op.kind === "label" && op.text === "angle = 40")).toBe(true);
});

test("a strobe set of 200 markers draws 200 discs", () => {
  const markers: [number, number, number][] = [];
  for (let i = 0; i < 200; i += 1) {
    markers.push([i / 1000, 0, 0]);
  }
  const state = stateWith({ strobes: { "entity-1": { spacing: 0, markers } } });
  const discs = buildDisplayList(state).filter(
    (op) => op.kind === "disc" && op.style === "strobe");
  expect(discs.length).toBe(200);
});

test("lines project through the event camera", () => {
  const state = stateWith({
    lines: { "line-1": { p1: [0, 0, 0], p2: [0.1, 0, 0], kind: "static",
                         label: "width", value: 0.1, perpendicularTo: null } },
  });
  const [line] = buildDisplayList(state).filter((op) => op.kind === "line");
  expect(line.kind).toBe("line");
  if (line.kind === "line") {
    // straight-down camera at 1.5 m with fx 600: 400 px per meter
    expect(line.a[0]).toBeCloseTo(320, 6);
    expect(line.a[1]).toBeCloseTo(240, 6);
    expect(line.b[0]).toBeCloseTo(360, 6);
  }
});

test("display lists are a pure function of state", () => {
  const state = stateWith({
    entities: { "entity-1": { screen: [320, 240], world: [0, 0, 0],
                              found: true, staleSince: null } },
    variables: { angle: 12.5 },
  });
  const a = JSON.stringify(buildDisplayList(state));
  const b = JSON.stringify(buildDisplayList(state));
  expect(a).toBe(b);
});

test("the painter executes every op kind", () => {
  const calls: string[] = [];
  const ctx: Painter = {
    strokeStyle: "", fillStyle: "", lineWidth: 0, font: "",
    beginPath: () => calls.push("beginPath"),
    moveTo: () => calls.push("moveTo"),
    lineTo: () => calls.push("lineTo"),
    arc: () => calls.push("arc"),
    closePath: () => calls.push("closePath"),
    stroke: () => calls.push("stroke"),
    fill: () => calls.push("fill"),
    fillText: (text) => calls.push(`text:${text}`),
  };
  drawDisplayList(ctx, [
    { kind: "line", a: [0, 0], b: [1, 1], style: "static" },
    { kind: "disc", at: [5, 5], r: 3, style: "strobe" },
    { kind: "polygon", points: [[0, 0], [1, 0], [0, 1]], style: "area" },
    { kind: "polyline", points: [[0, 0], [1, 2]], style: "series:a" },
    { kind: "label", at: [2, 2], text: "angle = 40" },
  ]);
  expect(calls).toContain("arc");
  expect(calls).toContain("closePath");
  expect(calls).toContain("text:angle = 40");
});
