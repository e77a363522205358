/** Browser wiring: scene frames + overlay canvas + toolbar + timeline.
 *
 * The scene container is fetched statically (scene.json, frames/*.ppm);
 * the engine connection only carries commands and state events. Query
 * parameters: ?ws=ws://host:port&scene=http://host:port
 */

import { SessionClient } from "./client.js";
import { buildDisplayList, drawDisplayList } from "./overlay.js";
import { decodePpm, frameUrl } from "./ppm.js";
import type { Mode, StateEventMsg } from "./protocol.js";
import type { PlaneDef } from "./project.js";
import { applyDiff, emptyState } from "./state.js";
import { StrokeRecorder, traceToCommand } from "./stroke.js";
import { frameForTime, timeAtBarPosition, type SceneTiming } from "./timeline.js";

interface SceneManifest {
  fps: number;
  resolution: [number, number];
  plane: { origin: number[]; normal: number[]; basisU: number[]; basisV: number[] };
}

const MODES: Mode[] = ["select", "sketch", "annotation", "graph", "record", "play"];

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const wsUrl = params.get("ws") ?? "ws://127.0.0.1:8765";
  const sceneBase = params.get("scene") ?? "http://127.0.0.1:8080";

  const manifest = (await (await fetch(`${sceneBase}/scene.json`)).json()) as SceneManifest;
  const metaText = await (await fetch(`${sceneBase}/meta.jsonl`)).text();
  const frameCount = metaText.split("\n").filter((line) => line.trim()).length;
  const timing: SceneTiming = { fps: manifest.fps, frames: frameCount };
  const [width, height] = manifest.resolution;
  const plane: PlaneDef = {
    origin: manifest.plane.origin as [number, number, number],
    normal: manifest.plane.normal as [number, number, number],
    basisU: manifest.plane.basisU as [number, number, number],
    basisV: manifest.plane.basisV as [number, number, number],
  };

  const frameCanvas = document.getElementById("frame") as HTMLCanvasElement;
  const overlayCanvas = document.getElementById("overlay") as HTMLCanvasElement;
  frameCanvas.width = overlayCanvas.width = width;
  frameCanvas.height = overlayCanvas.height = height;
  const frameCtx = frameCanvas.getContext("2d")!;
  const overlayCtx = overlayCanvas.getContext("2d")!;
  const toolbar = document.getElementById("toolbar")!;
  const timelineBar = document.getElementById("timeline") as HTMLInputElement;
  timelineBar.max = String(Math.max(0, frameCount - 1));
  const labelBox = document.getElementById("label-editor") as HTMLInputElement;
  const status = document.getElementById("status")!;

  const state = emptyState();
  let mode: Mode = "select";
  let labelTarget: string | null = null;
  let shownFrame = -1;

  const frameCache = new Map<number, ImageData>();
  async function showFrame(index: number): Promise<void> {
    if (index === shownFrame || index < 0) {
      return;
    }
    let image = frameCache.get(index);
    if (!image) {
      const bytes = new Uint8Array(await (await fetch(frameUrl(sceneBase, index))).arrayBuffer());
      const decoded = decodePpm(bytes);
      image = new ImageData(decoded.rgba, decoded.width, decoded.height);
      if (frameCache.size > 64) {
        frameCache.clear();
      }
      frameCache.set(index, image);
    }
    frameCtx.putImageData(image, 0, 0);
    shownFrame = index;
  }

  function repaint(): void {
    overlayCtx.clearRect(0, 0, width, height);
    drawDisplayList(overlayCtx, buildDisplayList(state, plane));
  }

  const client = new SessionClient(new WebSocket(wsUrl) as unknown as never, {
    onEvent: (event) => {
      if (event.event === "fault") {
        status.textContent = `fault: ${event.code}: ${event.message}`;
        return;
      }
      if (event.event === "state") {
        const changed = applyDiff(state, event as StateEventMsg);
        void showFrame(state.frame);
        timelineBar.value = String(state.frame);
        if (changed) {
          repaint(); // empty diffs skip the repaint
        }
      }
    },
    onError: (error) => {
      status.textContent = `skipped malformed event: ${String(error)}`;
    },
    onOpen: () => {
      status.textContent = "connected";
    },
  });

  for (const name of MODES) {
    const button = document.createElement("button");
    button.textContent = name;
    button.onclick = () => {
      mode = name;
      client.send({ type: "mode", mode: name });
      toolbar.querySelectorAll("button").forEach((b) =>
        b.classList.toggle("active", b.textContent === name));
    };
    toolbar.appendChild(button);
  }

  const recorder = new StrokeRecorder();
  const toCanvas = (ev: PointerEvent): [number, number] => {
    const rect = overlayCanvas.getBoundingClientRect();
    return [
      ((ev.clientX - rect.left) / rect.width) * width,
      ((ev.clientY - rect.top) / rect.height) * height,
    ];
  };
  overlayCanvas.onpointerdown = (ev) => {
    const [u, v] = toCanvas(ev);
    recorder.begin(u, v, performance.now());
  };
  overlayCanvas.onpointermove = (ev) => {
    const [u, v] = toCanvas(ev);
    recorder.move(u, v, performance.now());
  };
  overlayCanvas.onpointerup = (ev) => {
    const [u, v] = toCanvas(ev);
    const trace = recorder.end(u, v, performance.now());
    if (mode === "graph") {
      // drag a rectangle on the surface: approximate via plane scale at center
      client.send({ type: "placeGraph", rect: [0.45, -0.5, 0.5, 0.3] });
      return;
    }
    const cmd = traceToCommand(mode, trace);
    if (cmd) {
      client.send(cmd);
    }
  };

  // in-place label editing: click selects the nearest labeled thing,
  // Enter submits the text as a labelEdit
  overlayCanvas.ondblclick = () => {
    labelTarget = window.prompt("label target id (e.g. arc-1, graph-1:y, channel:dino-size)");
    if (labelTarget) {
      labelBox.style.display = "inline-block";
      labelBox.focus();
    }
  };
  labelBox.onkeydown = (ev) => {
    if (ev.key === "Enter" && labelTarget) {
      client.send({ type: "labelEdit", target: labelTarget, text: labelBox.value });
      labelBox.value = "";
      labelBox.style.display = "none";
      labelTarget = null;
    }
  };

  timelineBar.oninput = () => {
    const t = timeAtBarPosition(Number(timelineBar.value),
                                Number(timelineBar.max) || 1,
                                { fps: timing.fps, frames: timing.frames });
    client.send({ type: "scrub", t });
  };
  (document.getElementById("play") as HTMLButtonElement).onclick = () =>
    client.send({ type: "play" });
  (document.getElementById("pause") as HTMLButtonElement).onclick = () =>
    client.send({ type: "pause" });

  void showFrame(frameForTime(0, timing));
}

boot().catch((error) => {
  document.getElementById("status")!.textContent = `boot failed: ${String(error)}`;
});
