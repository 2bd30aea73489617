"""HTTP + WebSocket service around the pipeline.

Endpoints: GET /healthz, GET /profiles, POST /simulate (one-shot), and
the duplex WS /session described in protocol.py. Sessions are isolated;
within a session one worker drains a FIFO of control and frame items,
so replies come back in request order and a control message always
takes effect on every frame received after it. When a client floods
frames faster than processing, the oldest queued frames are dropped and
their ids reported in the next reply's trailer.
"""

from __future__ import annotations

import asyncio
import json
import time
import uuid
from collections import deque
from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, Request, Response, WebSocket, WebSocketDisconnect

from . import __version__, protocol
from .imageio import ImageDecodeError, decode_image, encode_image
from .pipeline import DEFAULT_BUDGET_US, process_frame
from .profile import (PRESET_DESCRIPTIONS, ProfileValidationError,
                      SimulationProfile, load_profile, preset,
                      profile_to_dict, with_param, with_stage)


@dataclass
class ServiceConfig:
    max_frame_bytes: int = 4 * 2 ** 20
    max_pending_frames: int = 8
    budget_us: int = DEFAULT_BUDGET_US


@dataclass
class Session:
    """Per-connection state; profile changes apply to subsequent frames."""

    id: str
    profile: SimulationProfile
    epoch: float
    frames_seen: int = 0
    dropped: list = dc_field(default_factory=list)


def handle_control(session: Session, msg: dict) -> dict:
    """Apply one control message to the session; returns the JSON reply.

    On validation failure the session is left untouched and the reply
    carries ok=false with the offending field where known.
    """
    mtype = msg.get("type")
    try:
        msg = protocol.validate_control(msg)
        if mtype == "ping":
            return {"ok": True, "type": "ping", "pong": True,
                    "version": __version__}
        if mtype == "set_stage":
            session.profile = with_stage(session.profile, msg["stage"])
        elif mtype == "set_profile":
            session.profile = load_profile(json.dumps(msg["profile"]))
        elif mtype == "set_fixation":
            session.profile = with_param(
                session.profile, "field.fixation",
                (float(msg["x"]), float(msg["y"])))
        elif mtype == "set_param":
            session.profile = with_param(
                session.profile, msg["path"], msg["value"])
        # get_profile falls through: the ack already echoes the profile.
        return {"ok": True, "type": mtype,
                "profile": profile_to_dict(session.profile)}
    except (protocol.ProtocolError, ProfileValidationError, ValueError) as exc:
        field = getattr(exc, "field", None)
        return {"ok": False, "type": mtype,
                "error": {"message": str(exc), "field": field}}


def _frame_error(frame_id, message: str) -> dict:
    return {"ok": False, "type": "frame", "frame_id": frame_id,
            "error": {"message": message, "field": None}}


def _process_frame_bytes(session: Session, data: bytes, budget_us: int):
    """Decode, simulate and re-encode one frame message (thread worker)."""
    msg = protocol.unpack_frame(data)
    frame = decode_image(msg.payload)
    t = time.monotonic() - session.epoch
    out, report = process_frame(frame, session.profile, t=t,
                                budget_us=budget_us)
    codec = protocol.CODEC_NAMES[msg.codec]
    payload = encode_image(out, codec)
    # Snapshot-and-swap: ids dropped while this frame is in flight stay
    # queued for the next trailer instead of getting lost.
    dropped = session.dropped
    session.dropped = []
    trailer = {
        "frame_id": msg.frame_id,
        "timing": report.to_dict(),
        "dropped": dropped,
        "warnings": [],
    }
    return protocol.pack_reply(msg.frame_id, msg.codec, payload,
                               json.dumps(trailer).encode("utf-8"))


def _enqueue_frame(queue: deque, session: Session, data: bytes,
                   config: ServiceConfig) -> None:
    """Queue one binary frame, applying size and backpressure policy.

    Oversized frames become queued error items so replies keep request
    order. Past max_pending_frames the oldest queued frame is dropped
    and its id recorded for the next reply's trailer (never silently).
    """
    if len(data) > config.max_frame_bytes:
        fid = protocol.peek_frame_id(data)
        queue.append(("error", json.dumps(_frame_error(
            fid, f"frame exceeds {config.max_frame_bytes} bytes"))))
        return
    pending = sum(1 for kind, _ in queue if kind == "frame")
    if pending >= config.max_pending_frames:
        for i, (kind, item) in enumerate(queue):
            if kind == "frame":
                dropped_id = protocol.peek_frame_id(item)
                if dropped_id is not None:
                    session.dropped.append(dropped_id)
                del queue[i]
                break
    session.frames_seen += 1
    queue.append(("frame", data))


async def _session_worker(ws: WebSocket, session: Session, queue: deque,
                          wakeup: asyncio.Event, config: ServiceConfig):
    while True:
        while not queue:
            wakeup.clear()
            await wakeup.wait()
        kind, data = queue.popleft()
        if kind == "error":
            await ws.send_text(data)
        elif kind == "control":
            try:
                msg = json.loads(data)
            except json.JSONDecodeError as exc:
                reply = {"ok": False, "type": None,
                         "error": {"message": f"malformed JSON: {exc}",
                                   "field": None}}
            else:
                reply = handle_control(session, msg)
            await ws.send_text(json.dumps(reply))
        else:
            try:
                reply = await asyncio.to_thread(
                    _process_frame_bytes, session, data, config.budget_us)
            except (protocol.ProtocolError, ImageDecodeError) as exc:
                await ws.send_text(json.dumps(
                    _frame_error(protocol.peek_frame_id(data), str(exc))))
            else:
                await ws.send_bytes(reply)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="vsim", version=__version__)

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "version": __version__}

    @app.get("/profiles")
    async def profiles():
        return {"profiles": [
            {"stage": i, "name": preset(i).name,
             "description": PRESET_DESCRIPTIONS[i],
             "profile": profile_to_dict(preset(i))}
            for i in range(5)
        ]}

    @app.post("/simulate")
    async def simulate(request: Request, stage: int | None = None,
                       time_s: float = 0.0, format: str | None = None):
        body = await request.body()
        if len(body) > config.max_frame_bytes:
            return Response(content=json.dumps({"detail": {
                "message": f"image exceeds {config.max_frame_bytes} bytes",
                "field": None}}), status_code=413,
                media_type="application/json")
        header = request.headers.get("x-vsim-profile")
        try:
            if header is not None:
                prof = load_profile(header)
            elif stage is not None:
                prof = preset(stage)
            else:
                prof = preset(0)
        except (ProfileValidationError, ValueError) as exc:
            detail = {"message": str(exc),
                      "field": getattr(exc, "field", None)}
            return Response(content=json.dumps({"detail": detail}),
                            status_code=422, media_type="application/json")
        try:
            frame = decode_image(body)
        except ImageDecodeError as exc:
            return Response(content=json.dumps({"detail": {
                "message": str(exc), "field": None}}), status_code=400,
                media_type="application/json")
        out, report = await asyncio.to_thread(
            process_frame, frame, prof, time_s, config.budget_us)
        codec = format or "png"
        if codec not in ("png", "jpeg"):
            return Response(content=json.dumps({"detail": {
                "message": f"format must be png or jpeg, got {codec!r}",
                "field": "format"}}), status_code=422,
                media_type="application/json")
        payload = encode_image(out, codec)
        return Response(content=payload, media_type=f"image/{codec}",
                        headers={"x-vsim-timing": json.dumps(report.to_dict())})

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        session = Session(id=uuid.uuid4().hex, profile=preset(0),
                          epoch=time.monotonic())
        queue: deque = deque()
        wakeup = asyncio.Event()
        worker = asyncio.create_task(
            _session_worker(ws, session, queue, wakeup, config))
        try:
            while True:
                msg = await ws.receive()
                if msg["type"] == "websocket.disconnect":
                    break
                if msg.get("text") is not None:
                    queue.append(("control", msg["text"]))
                elif msg.get("bytes") is not None:
                    _enqueue_frame(queue, session, msg["bytes"], config)
                wakeup.set()
        except WebSocketDisconnect:
            pass
        finally:
            worker.cancel()

    return app


def serve(host: str = "127.0.0.1", port: int = 8080,
          config: ServiceConfig | None = None):
    """Run the service until interrupted; raises OSError on bind failure
    with the address in the message."""
    import uvicorn

    app = create_app(config)
    try:
        uvicorn.run(app, host=host, port=port, log_level="info")
    except OSError as exc:
        raise OSError(f"cannot bind {host}:{port}: {exc}") from exc
