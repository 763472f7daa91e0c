"""Live WebSocket service around the gateway sessions.

Each connection owns one simulation loop paced at the tick rate. Outbound
traffic flows through a per-client queue that, under backpressure, collapses
runs of state/cue updates to the freshest one; events are never dropped or
reordered past each other.
"""
from __future__ import annotations

import asyncio
import os
import time
from collections import deque

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .gateway import GatewaySession, SessionSettings, WireMessage, default_record_dir
from .world import Scenario

COALESCIBLE = ("state_update", "cue_update")


class OutboundQueue:
    """Order-preserving send queue with backpressure coalescing.

    While the queue is saturated, a new state/cue update overwrites the last
    queued update of its kind as long as no event sits after it; everything
    else simply appends.
    """

    def __init__(self, maxsize: int = 64):
        self.maxsize = maxsize
        self._items: deque[WireMessage] = deque()

    def __len__(self) -> int:
        return len(self._items)

    def push(self, msg: WireMessage) -> None:
        if len(self._items) >= self.maxsize and msg.kind in COALESCIBLE:
            for i in range(len(self._items) - 1, -1, -1):
                item = self._items[i]
                if item.kind not in COALESCIBLE:
                    break
                if item.kind == msg.kind:
                    self._items[i] = msg
                    return
        self._items.append(msg)

    def drain(self) -> list[WireMessage]:
        out = list(self._items)
        self._items.clear()
        return out


def create_app(
    default_scenario: Scenario | None = None,
    *,
    settings: SessionSettings | None = None,
    record_dir: str | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="hapticopter gateway")
    app.state.record_dir = record_dir
    app.state.session_count = 0

    @app.get("/healthz")
    async def healthz():
        return {"ok": True}

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        gw = GatewaySession(default_scenario=default_scenario, settings=settings)
        queue = OutboundQueue()
        wakeup = asyncio.Event()
        dt = gw.settings.dt

        def enqueue(messages: list[WireMessage]) -> None:
            for m in messages:
                queue.push(m)
            if messages:
                wakeup.set()

        async def reader() -> None:
            while True:
                text = await ws.receive_text()
                enqueue(gw.handle_text(text))
                if gw.closed:
                    return

        async def ticker() -> None:
            next_deadline = time.monotonic() + dt
            while True:
                delay = next_deadline - time.monotonic()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    await asyncio.sleep(0)  # behind schedule: yield, then catch up
                next_deadline += dt
                enqueue(gw.tick())

        async def writer() -> None:
            while True:
                await wakeup.wait()
                wakeup.clear()
                for m in queue.drain():
                    await ws.send_text(m.to_json())

        tasks = [
            asyncio.create_task(reader()),
            asyncio.create_task(ticker()),
            asyncio.create_task(writer()),
        ]
        try:
            done, pending = await asyncio.wait(tasks, return_when=asyncio.FIRST_COMPLETED)
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            for task in tasks:
                task.cancel()
            _save_record(app, gw)
            try:
                await ws.close()
            except Exception:
                pass

    if ui_dir is not None and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="cockpit")

    return app


def _save_record(app: FastAPI, gw: GatewaySession) -> None:
    record_dir = app.state.record_dir
    if record_dir is None or gw.record is None or gw.record.total_ticks == 0:
        return
    os.makedirs(record_dir, exist_ok=True)
    app.state.session_count += 1
    name = f"session-{int(time.time())}-{app.state.session_count}.ndjson"
    path = os.path.join(record_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(gw.record.dumps())


def serve(
    scenario: Scenario | None,
    *,
    host: str = "127.0.0.1",
    port: int = 8000,
    record_dir: str | None = None,
    ui_dir: str | None = None,
) -> None:
    import uvicorn

    if record_dir is None and os.environ.get("HAPTICOPTER_LOG_DIR"):
        record_dir = default_record_dir()
    app = create_app(scenario, record_dir=record_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")
