// Mouse-as-hand input: viewport position maps to the operator-frame X/Y
// plane, the wheel (or keys) drives height, and the left button is the
// clutch. Outbound hand messages are rate limited to the simulation rate.

import type { Vec3 } from "./protocol.js";

export interface Workspace {
  min: Vec3;
  max: Vec3;
}

// Operator reach box matching the gateway's simulation preset: the room
// shrunk by the goal clearance, divided by the scale factor of 8.
export const DEFAULT_WORKSPACE: Workspace = {
  min: [-0.6, -0.6, 0.025],
  max: [0.6, 0.6, 0.475],
};

export const MAX_INPUT_HZ = 120;

function lerp(lo: number, hi: number, f: number): number {
  return lo + (hi - lo) * f;
}

function clamp01(v: number): number {
  return v < 0 ? 0 : v > 1 ? 1 : v;
}

/**
 * Viewport pixels to an operator-frame hand position.
 *
 * Top-down metaphor: moving the mouse up pushes the hand forward (+X),
 * moving it right moves the hand to the operator's right (-Y). `heightFrac`
 * in [0, 1] selects Z inside the workspace. The viewport center at mid
 * height lands exactly on the workspace center.
 */
export function mouseToHand(
  px: number,
  py: number,
  width: number,
  height: number,
  heightFrac: number,
  ws: Workspace = DEFAULT_WORKSPACE,
): Vec3 {
  const fx = clamp01(px / width);
  const fy = clamp01(py / height);
  const x = lerp(ws.min[0], ws.max[0], 1 - fy); // screen up = forward
  const y = lerp(ws.max[1], ws.min[1], fx);     // screen right = operator right (-Y)
  const z = lerp(ws.min[2], ws.max[2], clamp01(heightFrac));
  return [x, y, z];
}

export function workspaceCenter(ws: Workspace = DEFAULT_WORKSPACE): Vec3 {
  return [
    (ws.min[0] + ws.max[0]) / 2,
    (ws.min[1] + ws.max[1]) / 2,
    (ws.min[2] + ws.max[2]) / 2,
  ];
}

/** Height accumulator for wheel clicks / key presses, as a [0, 1] fraction. */
export class HeightControl {
  private frac = 0.5;

  constructor(private stepFrac = 0.04) {}

  get fraction(): number {
    return this.frac;
  }

  bump(steps: number): number {
    this.frac = clamp01(this.frac + steps * this.stepFrac);
    return this.frac;
  }
}

/**
 * Token gate keeping the outbound hand-input stream at or below the
 * simulation rate. `allow(nowMs)` returns true when a message may be sent.
 */
export class RateLimiter {
  private lastMs = -Infinity;
  readonly minIntervalMs: number;

  constructor(maxHz: number = MAX_INPUT_HZ) {
    if (maxHz <= 0) throw new Error("maxHz must be positive");
    this.minIntervalMs = 1000 / maxHz;
  }

  allow(nowMs: number): boolean {
    if (nowMs - this.lastMs >= this.minIntervalMs - 1e-9) {
      this.lastMs = nowMs;
      return true;
    }
    return false;
  }
}

/** Left-button clutch: emits engage/release transitions exactly once each. */
export class ClutchTracker {
  private engaged = false;

  get isEngaged(): boolean {
    return this.engaged;
  }

  /** Returns the transition to send, or null when nothing changed. */
  update(buttonDown: boolean): boolean | null {
    if (buttonDown === this.engaged) return null;
    this.engaged = buttonDown;
    return this.engaged;
  }
}
