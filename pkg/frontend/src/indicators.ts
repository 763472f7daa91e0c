// Six on-screen direction indicators stand in for the glove tactors:
// opacity tracks the latest cue intensity exactly; an optional blink mode
// modulates visibility at a rate that grows with intensity, and a
// rumble-capable gamepad mirrors the strongest cue.

import type { CueUpdate } from "./protocol.js";

export const INDICATOR_ORDER = ["front", "back", "left", "right", "up", "down"] as const;
export type IndicatorName = (typeof INDICATOR_ORDER)[number];

/** Normalized [0, 1] opacity per direction, mirroring the cue exactly. */
export function indicatorLevels(cue: CueUpdate): number[] {
  const m = cue.max_intensity > 0 ? cue.max_intensity : 1;
  return cue.intensities.map((v) => Math.min(Math.max(v / m, 0), 1));
}

/** Strongest normalized intensity; drives gamepad rumble when available. */
export function rumbleLevel(cue: CueUpdate): number {
  return Math.max(...indicatorLevels(cue));
}

/**
 * Blink gate for the optional frequency mode: full intensity stays solid,
 * weaker cues flash proportionally faster the stronger they are.
 */
export function blinkVisible(level: number, timeMs: number): boolean {
  if (level <= 0) return false;
  if (level >= 0.999) return true;
  const hz = 1 + 7 * level;
  const phase = (timeMs / 1000) * hz;
  return phase - Math.floor(phase) < 0.6;
}

export interface GamepadLike {
  vibrationActuator?: {
    playEffect(type: string, params: Record<string, unknown>): Promise<unknown>;
  };
}

export function pulseGamepad(pad: GamepadLike | null, cue: CueUpdate, durationMs = 50): void {
  const actuator = pad?.vibrationActuator;
  if (!actuator) return;
  const magnitude = rumbleLevel(cue);
  if (magnitude <= 0) return;
  void actuator.playEffect("dual-rumble", {
    duration: durationMs,
    strongMagnitude: magnitude,
    weakMagnitude: magnitude,
  });
}
