// Protocol-level checks against the real gateway: the clutch actually gates
// the goal, and the cockpit's cue indicators mirror the live cue stream.
// Starts `hapticopter serve` as a child process on a scratch port.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { indicatorLevels } from "../src/indicators.js";
import {
  MessageEncoder,
  PROTOCOL_VERSION,
  asCueUpdate,
  asStateUpdate,
  encode,
  parseServerMessage,
  type CueUpdate,
  type Envelope,
  type ServerKind,
} from "../src/protocol.js";

const PORT = 8931;
let server: ChildProcess | null = null;

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/healthz`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("gateway never came up");
}

class TestSession {
  readonly encoder = new MessageEncoder();
  private inbox: Envelope<ServerKind>[] = [];
  private waiters: ((env: Envelope<ServerKind>) => void)[] = [];

  constructor(private ws: WebSocket) {
    ws.on("message", (data) => {
      const env = parseServerMessage(String(data));
      const waiter = this.waiters.shift();
      if (waiter) waiter(env);
      else this.inbox.push(env);
    });
  }

  static async connect(): Promise<TestSession> {
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/session`);
    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });
    return new TestSession(ws);
  }

  send(env: Envelope<string>): void {
    this.ws.send(encode(env as never));
  }

  async next(): Promise<Envelope<ServerKind>> {
    const queued = this.inbox.shift();
    if (queued) return queued;
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for message")), 10000);
      this.waiters.push((env) => {
        clearTimeout(timer);
        resolve(env);
      });
    });
  }

  async nextOfKind(kind: ServerKind): Promise<Envelope<ServerKind>> {
    for (let i = 0; i < 2000; i++) {
      const env = await this.next();
      if (env.kind === kind) return env;
    }
    throw new Error(`no ${kind} message arrived`);
  }

  close(): void {
    this.ws.close();
  }
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "hapticopter.cli", "serve", "--port", String(PORT), "--scenario", "wall_approach"],
    { stdio: "ignore" },
  );
  await waitForHealth(20000);
});

afterAll(() => {
  server?.kill();
});

describe("cockpit against the live gateway", () => {
  it("handshakes and receives scenario geometry plus streaming state", async () => {
    const session = await TestSession.connect();
    try {
      session.send(session.encoder.hello());
      const ack = await session.nextOfKind("hello");
      expect(ack.payload.version).toBe(PROTOCOL_VERSION);

      const loaded = await session.nextOfKind("event");
      expect(loaded.payload.event).toBe("scenario_loaded");
      const scenario = loaded.payload.scenario as { room: unknown; spawn: number[] };
      expect(scenario.room).toBeDefined();

      const state = asStateUpdate(await session.nextOfKind("state_update"));
      expect(state).not.toBeNull();
      expect(state!.clutch_engaged).toBe(false);
    } finally {
      session.close();
    }
  });

  it("button-up mouse motion never changes the goal; engaging does", async () => {
    const session = await TestSession.connect();
    try {
      session.send(session.encoder.hello());
      await session.nextOfKind("hello");
      const first = asStateUpdate(await session.nextOfKind("state_update"))!;
      const spawnGoal = first.goal;

      // clutch released: a burst of wandering hand input
      for (let i = 0; i < 30; i++) {
        session.send(
          session.encoder.handInput([0.3 + i * 0.005, -0.2, 0.3], i / 120),
        );
      }
      for (let i = 0; i < 20; i++) {
        const state = asStateUpdate(await session.nextOfKind("state_update"))!;
        expect(state.goal).toEqual(spawnGoal);
        expect(state.clutch_engaged).toBe(false);
      }

      // engage and send one pose: the goal snaps to scale * hand
      session.send(session.encoder.clutch(true));
      session.send(session.encoder.handInput([0.1, -0.2, 0.15], 1.0));
      let moved = false;
      for (let i = 0; i < 120 && !moved; i++) {
        const state = asStateUpdate(await session.nextOfKind("state_update"))!;
        if (state.clutch_engaged && state.goal[0] !== spawnGoal[0]) {
          expect(state.goal[0]).toBeCloseTo(0.8, 9);
          expect(state.goal[1]).toBeCloseTo(-1.6, 9);
          expect(state.goal[2]).toBeCloseTo(1.2, 9);
          moved = true;
        }
      }
      expect(moved).toBe(true);
    } finally {
      session.close();
    }
  });

  it("indicator levels mirror the live cue stream exactly", async () => {
    const session = await TestSession.connect();
    try {
      session.send(session.encoder.hello());
      await session.nextOfKind("hello");
      for (let i = 0; i < 5; i++) {
        const cue = asCueUpdate(await session.nextOfKind("cue_update"))!;
        const levels = indicatorLevels(cue);
        cue.intensities.forEach((v, k) => {
          expect(levels[k]).toBeCloseTo(v / cue.max_intensity, 12);
        });
      }
    } finally {
      session.close();
    }
  });

  it("rejects malformed input without dropping the session", async () => {
    const session = await TestSession.connect();
    try {
      session.send(session.encoder.hello());
      await session.nextOfKind("hello");
      session.send(session.encoder.next("hand_input", { position: [1] }));
      const err = await session.nextOfKind("error");
      expect(err.payload.code).toBe("bad_payload");
      // still alive afterwards
      const state = await session.nextOfKind("state_update");
      expect(state.payload.tick).toBeTypeOf("number");
    } finally {
      session.close();
    }
  });
});
