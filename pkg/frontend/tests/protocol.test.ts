import { describe, expect, it } from "vitest";

import {
  MessageEncoder,
  PROTOCOL_VERSION,
  ProtocolError,
  asCueUpdate,
  asStateUpdate,
  encode,
  parseServerMessage,
} from "../src/protocol.js";

describe("message encoder", () => {
  it("assigns strictly increasing seq numbers", () => {
    const enc = new MessageEncoder();
    const seqs = [
      enc.hello().seq,
      enc.clutch(true).seq,
      enc.handInput([0, 0, 0], 0).seq,
      enc.resetGoal().seq,
    ];
    expect(seqs).toEqual([1, 2, 3, 4]);
  });

  it("hello carries the protocol version", () => {
    const env = new MessageEncoder().hello();
    expect(env.kind).toBe("hello");
    expect(env.payload.version).toBe(PROTOCOL_VERSION);
  });

  it("hand input carries position and timestamp", () => {
    const env = new MessageEncoder().handInput([0.1, -0.2, 0.3], 1.5);
    expect(env.payload).toEqual({ position: [0.1, -0.2, 0.3], timestamp: 1.5 });
    const text = encode(env);
    expect(JSON.parse(text).kind).toBe("hand_input");
  });
});

describe("server message parsing", () => {
  const frame = (overrides: Record<string, unknown>) =>
    JSON.stringify({ kind: "state_update", seq: 1, t: 0, payload: {}, ...overrides });

  it("rejects garbage and unknown kinds", () => {
    expect(() => parseServerMessage("{oops")).toThrow(ProtocolError);
    expect(() => parseServerMessage(frame({ kind: "teleport" }))).toThrow(ProtocolError);
    expect(() => parseServerMessage(frame({ seq: "one" }))).toThrow(ProtocolError);
  });

  it("accepts well-formed envelopes", () => {
    const env = parseServerMessage(
      JSON.stringify({ kind: "error", seq: 3, t: 1.25, payload: { code: "bad_seq" } }),
    );
    expect(env.kind).toBe("error");
    expect(env.payload.code).toBe("bad_seq");
  });

  it("narrows state updates with full validation", () => {
    const good = parseServerMessage(
      JSON.stringify({
        kind: "state_update",
        seq: 9,
        t: 0.5,
        payload: {
          tick: 60,
          position: [1, 2, 3],
          velocity: [0, 0, 0],
          goal: [1, 2, 3],
          clutch_engaged: true,
        },
      }),
    );
    const state = asStateUpdate(good);
    expect(state?.tick).toBe(60);
    expect(state?.goal).toEqual([1, 2, 3]);

    const bad = parseServerMessage(
      JSON.stringify({ kind: "state_update", seq: 10, t: 0.5, payload: { tick: 1 } }),
    );
    expect(() => asStateUpdate(bad)).toThrow(ProtocolError);
    expect(asStateUpdate(parseServerMessage(frame({ kind: "event" })))).toBeNull();
  });

  it("narrows cue updates", () => {
    const env = parseServerMessage(
      JSON.stringify({
        kind: "cue_update",
        seq: 2,
        t: 0,
        payload: { intensities: [0, 0.5, 0, 0, 1, 0], max_intensity: 1 },
      }),
    );
    const cue = asCueUpdate(env);
    expect(cue?.intensities[1]).toBe(0.5);
    const short = parseServerMessage(
      JSON.stringify({ kind: "cue_update", seq: 3, t: 0, payload: { intensities: [1], max_intensity: 1 } }),
    );
    expect(() => asCueUpdate(short)).toThrow(ProtocolError);
  });
});
