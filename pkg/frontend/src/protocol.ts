// Wire protocol: JSON envelopes {kind, seq, t, payload} over a WebSocket.
// Mirrors the gateway's schema; unknown kinds and malformed envelopes are
// rejected rather than guessed at.

export const PROTOCOL_VERSION = 1;

export const CLIENT_KINDS = [
  "hello",
  "load_scenario",
  "hand_input",
  "clutch_input",
  "reset_goal",
] as const;

export const SERVER_KINDS = ["hello", "state_update", "cue_update", "event", "error"] as const;

export type ClientKind = (typeof CLIENT_KINDS)[number];
export type ServerKind = (typeof SERVER_KINDS)[number];

export interface Envelope<K extends string = string> {
  kind: K;
  seq: number;
  t: number;
  payload: Record<string, unknown>;
}

export type Vec3 = [number, number, number];

export interface StateUpdate {
  tick: number;
  position: Vec3;
  velocity: Vec3;
  goal: Vec3;
  clutch_engaged: boolean;
}

export interface CueUpdate {
  intensities: [number, number, number, number, number, number];
  max_intensity: number;
}

export class ProtocolError extends Error {}

/** Outbound message factory holding the strictly increasing sequence number. */
export class MessageEncoder {
  private seq = 0;

  next(kind: ClientKind, payload: Record<string, unknown>, t?: number): Envelope<ClientKind> {
    this.seq += 1;
    return { kind, seq: this.seq, t: t ?? Date.now() / 1000, payload };
  }

  hello(): Envelope<ClientKind> {
    return this.next("hello", { version: PROTOCOL_VERSION, client: "cockpit" });
  }

  loadScenario(task: string): Envelope<ClientKind> {
    return this.next("load_scenario", { task });
  }

  handInput(position: Vec3, timestamp: number): Envelope<ClientKind> {
    return this.next("hand_input", { position, timestamp });
  }

  clutch(engaged: boolean): Envelope<ClientKind> {
    return this.next("clutch_input", { engaged });
  }

  resetGoal(): Envelope<ClientKind> {
    return this.next("reset_goal", {});
  }
}

export function encode(message: Envelope<ClientKind>): string {
  return JSON.stringify(message);
}

function isVec3(value: unknown): value is Vec3 {
  return (
    Array.isArray(value) && value.length === 3 && value.every((c) => typeof c === "number")
  );
}

export function parseServerMessage(text: string): Envelope<ServerKind> {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    throw new ProtocolError("not valid JSON");
  }
  if (typeof doc !== "object" || doc === null) {
    throw new ProtocolError("message must be an object");
  }
  const env = doc as Record<string, unknown>;
  const kind = env.kind;
  if (typeof kind !== "string" || !(SERVER_KINDS as readonly string[]).includes(kind)) {
    throw new ProtocolError(`unknown server kind ${String(kind)}`);
  }
  if (typeof env.seq !== "number" || typeof env.t !== "number") {
    throw new ProtocolError("bad envelope: seq and t must be numbers");
  }
  const payload = env.payload ?? {};
  if (typeof payload !== "object" || Array.isArray(payload)) {
    throw new ProtocolError("payload must be an object");
  }
  return {
    kind: kind as ServerKind,
    seq: env.seq,
    t: env.t,
    payload: payload as Record<string, unknown>,
  };
}

export function asStateUpdate(env: Envelope<ServerKind>): StateUpdate | null {
  if (env.kind !== "state_update") return null;
  const p = env.payload;
  if (
    typeof p.tick !== "number" ||
    !isVec3(p.position) ||
    !isVec3(p.velocity) ||
    !isVec3(p.goal) ||
    typeof p.clutch_engaged !== "boolean"
  ) {
    throw new ProtocolError("malformed state_update");
  }
  return {
    tick: p.tick,
    position: p.position,
    velocity: p.velocity,
    goal: p.goal,
    clutch_engaged: p.clutch_engaged,
  };
}

export function asCueUpdate(env: Envelope<ServerKind>): CueUpdate | null {
  if (env.kind !== "cue_update") return null;
  const p = env.payload;
  if (
    !Array.isArray(p.intensities) ||
    p.intensities.length !== 6 ||
    !p.intensities.every((v) => typeof v === "number") ||
    typeof p.max_intensity !== "number"
  ) {
    throw new ProtocolError("malformed cue_update");
  }
  return {
    intensities: p.intensities as CueUpdate["intensities"],
    max_intensity: p.max_intensity,
  };
}
