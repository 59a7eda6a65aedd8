"""HTTP and WebSocket surface around a loaded cascade.

GET /health, /model, and /templates serve metadata; /session is a persistent
channel where each client frame message yields exactly one spot reply in
arrival order. Incoming messages land on an unbounded per-session queue, so a
client outrunning the pipeline backs up honestly and sees the depth in each
reply rather than losing frames.

Wire shapes: client sends {"type": "frame", "t": int, "sensors": [22 floats],
"button": bool} or {"type": "reset"}; the server answers frames with
{"type": "spot", "t", "decision", "label", "confidence", "command", "robot",
"queue_depth"}. Malformed input gets a {"type": "error"} reply and the
session lives on.
"""

from __future__ import annotations

import asyncio
import json
from typing import Optional, Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from .domain import SensorFrame
from .errors import GlovespotError
from .session import SessionDriver
from .spotter import CascadeModel
from .synth import GestureTemplate, templates_to_obj

DEFAULT_BIND = "127.0.0.1:8765"
BIND_ENV_VAR = "GLOVESPOT_BIND"


def _frame_from_message(msg: dict) -> SensorFrame:
    for key in ("t", "sensors"):
        if key not in msg:
            raise ValueError(f"frame message missing field {key!r}")
    return SensorFrame(t=int(msg["t"]), sensors=msg["sensors"],
                       button=bool(msg.get("button", False)))


def _handle_message(driver: SessionDriver, text: str, queue_depth: int) -> dict:
    try:
        msg = json.loads(text)
    except json.JSONDecodeError as exc:
        return {"type": "error", "message": f"invalid JSON: {exc}", "queue_depth": queue_depth}
    if not isinstance(msg, dict):
        return {"type": "error", "message": "message must be a JSON object",
                "queue_depth": queue_depth}
    kind = msg.get("type")
    if kind == "reset":
        driver.reset()
        return {"type": "reset_done", "queue_depth": queue_depth}
    if kind != "frame":
        return {"type": "error", "message": f"unknown message type {kind!r}",
                "queue_depth": queue_depth}
    try:
        reply = driver.process(_frame_from_message(msg))
    except (GlovespotError, ValueError, TypeError) as exc:
        return {"type": "error", "message": str(exc), "queue_depth": queue_depth}
    return {"type": "spot", **reply, "queue_depth": queue_depth}


def create_app(
    cascade: CascadeModel,
    templates: Optional[Sequence[GestureTemplate]] = None,
) -> FastAPI:
    """Application serving one immutable cascade; sessions are isolated.

    CORS is wide open: the browser console is served as a static page from
    wherever is convenient and only ever reads metadata over HTTP.
    """
    app = FastAPI(title="glovespot", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/model")
    def model():
        return {
            "library_size": cascade.library_size,
            "lag": cascade.lag,
            "accept_threshold": cascade.accept_threshold,
            "debounce_frames": cascade.debounce_frames,
            "one_shot_edge": cascade.one_shot_edge,
            "layers_comm": list(cascade.net_comm.layer_sizes),
            "layers_non": None if cascade.net_non is None else list(cascade.net_non.layer_sizes),
        }

    @app.get("/templates")
    def template_poses():
        if templates is None:
            return {"templates": []}
        return templates_to_obj(list(templates))

    @app.websocket("/session")
    async def session(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue()

        async def pump():
            # feed the queue until the client goes away; None is the sentinel
            try:
                while True:
                    queue.put_nowait(await ws.receive_text())
            except WebSocketDisconnect:
                queue.put_nowait(None)

        pump_task = asyncio.create_task(pump())
        driver = SessionDriver(cascade)
        try:
            while True:
                text = await queue.get()
                if text is None:
                    break
                reply = _handle_message(driver, text, queue.qsize())
                await ws.send_text(json.dumps(reply))
        finally:
            pump_task.cancel()

    return app


def parse_bind(bind: str) -> tuple[str, int]:
    """Split host:port, allowing a bare port."""
    host, sep, port = bind.rpartition(":")
    if not sep:
        host, port = "127.0.0.1", bind
    try:
        return (host or "127.0.0.1"), int(port)
    except ValueError as exc:
        raise ValueError(f"invalid bind address {bind!r}, expected host:port") from exc
