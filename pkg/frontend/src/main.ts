// Cockpit wiring: connect to the gateway, stream mouse-as-hand input with
// the left button as clutch, render the scene and the six cue indicators.

import { HeightControl, MAX_INPUT_HZ, RateLimiter, ClutchTracker, mouseToHand } from "./input.js";
import { INDICATOR_ORDER, blinkVisible, indicatorLevels, pulseGamepad } from "./indicators.js";
import { GatewayClient } from "./net.js";
import { MessageEncoder, encode } from "./protocol.js";
import { drawScene } from "./scene.js";
import { CockpitState } from "./state.js";

const params = new URLSearchParams(location.search);
const serverUrl =
  params.get("server") ?? `ws://${location.host || "127.0.0.1:8000"}/session`;
const scenarioName = params.get("scenario");

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const staleBadge = document.getElementById("stale")!;
const reconnectBanner = document.getElementById("reconnect")!;
const indicatorEls = new Map(
  INDICATOR_ORDER.map((name) => [name, document.getElementById(`cue-${name}`)!]),
);

const state = new CockpitState();
const encoder = new MessageEncoder();
const limiter = new RateLimiter(MAX_INPUT_HZ);
const clutch = new ClutchTracker();
const heightControl = new HeightControl();

let shadows = false;
let blinkMode = false;
let mouse: { x: number; y: number } | null = null;

const client = new GatewayClient(serverUrl, {
  onOpen() {
    state.status = "connected";
    reconnectBanner.hidden = true;
    client.send(encode(encoder.hello()));
    if (scenarioName) client.send(encode(encoder.loadScenario(scenarioName)));
  },
  onMessage(env) {
    state.ingest(env, performance.now());
    if (env.kind === "error") {
      console.warn("gateway error:", env.payload);
    }
  },
  onClose(willRetry) {
    state.status = willRetry ? "connecting" : "closed";
    reconnectBanner.hidden = !willRetry;
  },
  onParseError(error) {
    console.error("bad server message", error);
  },
});
client.connect();

function sendHand(nowMs: number): void {
  if (!mouse || !clutch.isEngaged) return;
  if (!limiter.allow(nowMs)) return;
  const rect = canvas.getBoundingClientRect();
  const hand = mouseToHand(
    mouse.x - rect.left,
    mouse.y - rect.top,
    rect.width,
    rect.height,
    heightControl.fraction,
  );
  client.send(encode(encoder.handInput(hand, nowMs / 1000)));
}

canvas.addEventListener("mousemove", (ev) => {
  mouse = { x: ev.clientX, y: ev.clientY };
  sendHand(performance.now());
});

canvas.addEventListener("mousedown", (ev) => {
  if (ev.button !== 0) return;
  const change = clutch.update(true);
  if (change !== null) client.send(encode(encoder.clutch(change)));
});

window.addEventListener("mouseup", (ev) => {
  if (ev.button !== 0) return;
  const change = clutch.update(false);
  if (change !== null) client.send(encode(encoder.clutch(change)));
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  heightControl.bump(ev.deltaY < 0 ? 1 : -1);
  sendHand(performance.now());
});

window.addEventListener("keydown", (ev) => {
  if (ev.key === "w" || ev.key === "ArrowUp") heightControl.bump(1);
  else if (ev.key === "s" || ev.key === "ArrowDown") heightControl.bump(-1);
  else if (ev.key === "r") client.send(encode(encoder.resetGoal()));
  else return;
  sendHand(performance.now());
});

(document.getElementById("toggle-shadows") as HTMLInputElement).addEventListener(
  "change",
  (ev) => {
    shadows = (ev.target as HTMLInputElement).checked;
  },
);
(document.getElementById("toggle-blink") as HTMLInputElement).addEventListener(
  "change",
  (ev) => {
    blinkMode = (ev.target as HTMLInputElement).checked;
  },
);
document.getElementById("reset-goal")!.addEventListener("click", () => {
  client.send(encode(encoder.resetGoal()));
});

function frame(nowMs: number): void {
  const stale = state.isStale(nowMs);
  staleBadge.hidden = !stale;
  canvas.classList.toggle("dimmed", stale);
  statusEl.textContent =
    `${state.status}` +
    (state.lastState ? ` | tick ${state.lastState.tick}` : "") +
    (clutch.isEngaged ? " | clutch ENGAGED" : " | clutch released") +
    ` | height ${(heightControl.fraction * 100).toFixed(0)}%`;

  drawScene(ctx, canvas.width, canvas.height, state.scenario, state.lastState, { shadows });

  if (state.lastCue) {
    const levels = indicatorLevels(state.lastCue);
    INDICATOR_ORDER.forEach((name, i) => {
      const el = indicatorEls.get(name)!;
      const level = levels[i] ?? 0;
      const visible = blinkMode ? blinkVisible(level, nowMs) : true;
      el.style.opacity = String(visible ? level : 0);
      el.classList.toggle("hot", level > 0.8);
    });
    const pads = typeof navigator.getGamepads === "function" ? navigator.getGamepads() : [];
    pulseGamepad(pads && pads[0] ? pads[0] : null, state.lastCue);
  }
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
