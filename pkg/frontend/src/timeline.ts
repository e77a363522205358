/** Timeline scrubber math (pure; the DOM part lives in app.ts). */

export interface SceneTiming {
  fps: number;
  frames: number;
}

export function duration(timing: SceneTiming): number {
  return timing.frames / timing.fps;
}

/** Click position along the bar -> scrub time, clamped to the scene. */
export function timeAtBarPosition(x: number, barWidth: number,
                                  timing: SceneTiming): number {
  const f = Math.min(1, Math.max(0, x / barWidth));
  return f * duration(timing);
}

export function frameForTime(t: number, timing: SceneTiming): number {
  const i = Math.floor(t * timing.fps + 1e-9);
  return Math.min(Math.max(i, 0), timing.frames - 1);
}

export function barPositionForTime(t: number, barWidth: number,
                                   timing: SceneTiming): number {
  return (t / duration(timing)) * barWidth;
}
