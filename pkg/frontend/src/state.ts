// Cockpit view state: purely a mirror of what the gateway last said.
// Closing and reopening the page never changes simulation truth.

import type { CueUpdate, Envelope, ServerKind, StateUpdate } from "./protocol.js";
import { asCueUpdate, asStateUpdate } from "./protocol.js";

export const STALE_AFTER_MS = 500;

export type ConnectionStatus = "connecting" | "connected" | "closed";

export interface ScenarioBox {
  min: [number, number, number];
  max: [number, number, number];
}

export interface ScenarioDoc {
  task: string;
  room: ScenarioBox;
  obstacles: ScenarioBox[];
  gates: { frame: ScenarioBox[] }[];
  spawn: [number, number, number];
}

export class CockpitState {
  status: ConnectionStatus = "connecting";
  lastState: StateUpdate | null = null;
  lastCue: CueUpdate | null = null;
  lastUpdateMs = -Infinity;
  scenario: ScenarioDoc | null = null;
  events: string[] = [];

  ingest(env: Envelope<ServerKind>, nowMs: number): void {
    const state = asStateUpdate(env);
    if (state) {
      this.lastState = state;
      this.lastUpdateMs = nowMs;
      return;
    }
    const cue = asCueUpdate(env);
    if (cue) {
      this.lastCue = cue;
      this.lastUpdateMs = nowMs;
      return;
    }
    if (env.kind === "event") {
      const name = String(env.payload.event ?? "event");
      if (name === "scenario_loaded" && env.payload.scenario) {
        this.scenario = env.payload.scenario as unknown as ScenarioDoc;
      }
      this.events.push(name);
      if (this.events.length > 50) this.events.shift();
    }
  }

  isStale(nowMs: number): boolean {
    return this.status === "connected" && nowMs - this.lastUpdateMs > STALE_AFTER_MS;
  }
}
