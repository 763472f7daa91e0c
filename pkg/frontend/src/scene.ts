// Plain-box scene rendering on a 2D canvas: a third-person front pane
// (operator's line of sight along +X) and a top-down pane for depth.
// No shadows by default, matching the visibility-limited task condition;
// a toggle re-enables a simple ground shadow.

import type { StateUpdate } from "./protocol.js";
import type { ScenarioBox, ScenarioDoc } from "./state.js";

export interface SceneOptions {
  shadows: boolean;
}

interface PaneMap {
  toX(wx: number): number;
  toY(wy: number): number;
}

function paneMapper(
  worldMinA: number, worldMaxA: number, worldMinB: number, worldMaxB: number,
  x0: number, y0: number, w: number, h: number, flipB = true,
): { mapA(a: number): number; mapB(b: number): number } {
  const sa = w / (worldMaxA - worldMinA);
  const sb = h / (worldMaxB - worldMinB);
  return {
    mapA: (a: number) => x0 + (a - worldMinA) * sa,
    mapB: (b: number) =>
      flipB ? y0 + h - (b - worldMinB) * sb : y0 + (b - worldMinB) * sb,
  };
}

export function drawScene(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  scenario: ScenarioDoc | null,
  state: StateUpdate | null,
  options: SceneOptions,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, width, height);
  if (!scenario) {
    ctx.fillStyle = "#8a93a0";
    ctx.font = "14px system-ui";
    ctx.fillText("waiting for scenario…", 16, 24);
    return;
  }
  const room = scenario.room;
  const margin = 12;
  const paneW = width - 2 * margin;
  const frontH = Math.round(height * 0.58);
  const topH = height - frontH - 3 * margin;

  // front pane: operator looks along +X, so horizontal = -Y (right = operator right)
  const front = paneMapper(
    -room.max[1], -room.min[1], room.min[2], room.max[2],
    margin, margin, paneW, frontH,
  );
  // top pane: X forward (up on screen), Y left
  const top = paneMapper(
    -room.max[1], -room.min[1], room.min[0], room.max[0],
    margin, frontH + 2 * margin, paneW, topH,
  );

  const boxes: ScenarioBox[] = [
    ...scenario.obstacles,
    ...scenario.gates.flatMap((g) => g.frame),
  ];

  ctx.strokeStyle = "#2d3642";
  ctx.strokeRect(margin, margin, paneW, frontH);
  ctx.strokeRect(margin, frontH + 2 * margin, paneW, topH);

  ctx.fillStyle = "#46525f";
  for (const b of boxes) {
    const x = front.mapA(-b.max[1]);
    const w = front.mapA(-b.min[1]) - x;
    const yTop = front.mapB(b.max[2]);
    const h = front.mapB(b.min[2]) - yTop;
    ctx.fillRect(x, yTop, w, h);
  }
  for (const b of boxes) {
    const x = top.mapA(-b.max[1]);
    const w = top.mapA(-b.min[1]) - x;
    const yTop = top.mapB(b.max[0]);
    const h = top.mapB(b.min[0]) - yTop;
    ctx.fillStyle = "#3a4450";
    ctx.fillRect(x, yTop, w, h);
  }

  if (state) {
    const [dx, dy, dz] = state.position;
    const [gx, gy, gz] = state.goal;

    if (options.shadows) {
      const sx = front.mapA(-dy);
      const sy = front.mapB(room.min[2]);
      ctx.fillStyle = "rgba(0,0,0,0.45)";
      ctx.beginPath();
      ctx.ellipse(sx, sy - 2, 10, 3, 0, 0, Math.PI * 2);
      ctx.fill();
    }

    ctx.fillStyle = "#d8791e";
    ctx.beginPath();
    ctx.arc(front.mapA(-gy), front.mapB(gz), 4, 0, Math.PI * 2);
    ctx.fill();
    ctx.beginPath();
    ctx.arc(top.mapA(-gy), top.mapB(gx), 4, 0, Math.PI * 2);
    ctx.fill();

    ctx.fillStyle = state.clutch_engaged ? "#7fd65a" : "#b9c2cc";
    ctx.beginPath();
    ctx.arc(front.mapA(-dy), front.mapB(dz), 7, 0, Math.PI * 2);
    ctx.fill();
    ctx.beginPath();
    ctx.arc(top.mapA(-dy), top.mapB(dx), 7, 0, Math.PI * 2);
    ctx.fill();
  }

  ctx.fillStyle = "#8a93a0";
  ctx.font = "11px system-ui";
  ctx.fillText("front view (line of sight)", margin + 4, margin + 14);
  ctx.fillText("top view", margin + 4, frontH + 2 * margin + 14);
}
