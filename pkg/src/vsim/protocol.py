"""The streaming wire protocol: binary frames and JSON control messages.

Version 1. Frame messages are binary WebSocket messages:

    offset  size  field
    0       4     magic, ASCII "VSIM"
    4       1     version, u8 = 1
    5       1     codec, u8: 1 = PNG, 2 = JPEG
    6       8     frame_id, u64 little-endian
    14      4     payload length, u32 little-endian
    18      n     payload (encoded image bytes)

Replies from the server reuse the same layout and append:

    18+n    4     trailer length, u32 little-endian
    22+n    m     trailer, UTF-8 JSON

The trailer object carries {"frame_id", "timing", "dropped", "warnings"}:
timing is a TimingReport (see pipeline.TimingReport.to_dict), dropped is
the list of frame_ids discarded under backpressure since the previous
reply, warnings a list of strings.

Control messages are UTF-8 JSON text messages {"type": ..., ...}:

    {"type": "set_stage", "stage": 0..4}
    {"type": "set_profile", "profile": {...full profile document...}}
    {"type": "set_fixation", "x": 0..1, "y": 0..1}
    {"type": "set_param", "path": "cvd.severity", "value": 0.7}
    {"type": "get_profile"}
    {"type": "ping"}

Every control message gets a JSON text reply: on success
{"ok": true, "type": <echoed>, "profile": {...}} ("pong": true and no
profile for ping); on failure {"ok": false, "type": <echoed>, "error":
{"message": ..., "field": <dotted path or null>}} and the session state
is unchanged. Frame-level failures (bad magic, oversized or undecodable
payload) produce {"ok": false, "type": "frame", "frame_id": id or null,
"error": {...}} text replies.

Shared binary/JSON fixtures for client implementations live in
fixtures/protocol/.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

MAGIC = b"VSIM"
VERSION = 1
CODEC_PNG = 1
CODEC_JPEG = 2
CODEC_NAMES = {CODEC_PNG: "png", CODEC_JPEG: "jpeg"}

_HEADER = struct.Struct("<4sBBQI")
_U32 = struct.Struct("<I")
HEADER_SIZE = _HEADER.size

CONTROL_TYPES = ("set_stage", "set_profile", "set_fixation", "set_param",
                 "get_profile", "ping")


class ProtocolError(ValueError):
    """Malformed frame message or control message."""


@dataclass(frozen=True)
class FrameMessage:
    frame_id: int
    codec: int
    payload: bytes


def pack_frame(frame_id: int, codec: int, payload: bytes) -> bytes:
    """Serialize a client->server frame message."""
    if codec not in CODEC_NAMES:
        raise ProtocolError(f"codec must be 1 (PNG) or 2 (JPEG), got {codec}")
    if not 0 <= frame_id < 2 ** 64:
        raise ProtocolError(f"frame_id must fit u64, got {frame_id}")
    return _HEADER.pack(MAGIC, VERSION, codec, frame_id, len(payload)) + payload


def _unpack_header(data: bytes) -> FrameMessage:
    if len(data) < HEADER_SIZE:
        raise ProtocolError(
            f"frame message too short: {len(data)} < {HEADER_SIZE} bytes")
    magic, version, codec, frame_id, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ProtocolError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ProtocolError(f"unsupported protocol version {version}")
    if codec not in CODEC_NAMES:
        raise ProtocolError(f"unknown codec {codec}")
    if len(data) < HEADER_SIZE + length:
        raise ProtocolError(
            f"truncated payload: header says {length} bytes, "
            f"{len(data) - HEADER_SIZE} present")
    return FrameMessage(frame_id=frame_id, codec=codec,
                        payload=data[HEADER_SIZE:HEADER_SIZE + length])


def unpack_frame(data: bytes) -> FrameMessage:
    """Parse a frame message; rejects trailing garbage."""
    msg = _unpack_header(data)
    if len(data) != HEADER_SIZE + len(msg.payload):
        raise ProtocolError("trailing bytes after payload")
    return msg


def peek_frame_id(data: bytes) -> int | None:
    """Best-effort frame_id for error replies about malformed messages."""
    if len(data) >= HEADER_SIZE and data[:4] == MAGIC:
        return _HEADER.unpack_from(data)[3]
    return None


def pack_reply(frame_id: int, codec: int, payload: bytes,
               trailer_json: bytes) -> bytes:
    """Serialize a server->client reply (frame + JSON trailer)."""
    head = pack_frame(frame_id, codec, payload)
    return head + _U32.pack(len(trailer_json)) + trailer_json


def unpack_reply(data: bytes) -> tuple[FrameMessage, bytes]:
    """Parse a reply into its frame message and raw trailer bytes."""
    msg = _unpack_header(data)
    off = HEADER_SIZE + len(msg.payload)
    if len(data) < off + 4:
        raise ProtocolError("reply missing trailer length")
    (tlen,) = _U32.unpack_from(data, off)
    if len(data) != off + 4 + tlen:
        raise ProtocolError(
            f"trailer length mismatch: header says {tlen}, "
            f"{len(data) - off - 4} present")
    return msg, data[off + 4:off + 4 + tlen]


def validate_control(obj) -> dict:
    """Check a parsed control message against its schema.

    Returns the message; raises ProtocolError with a readable message
    (the session must remain unchanged on failure).
    """
    if not isinstance(obj, dict):
        raise ProtocolError("control message must be a JSON object")
    mtype = obj.get("type")
    if mtype not in CONTROL_TYPES:
        raise ProtocolError(
            f"unknown control type {mtype!r}; expected one of {CONTROL_TYPES}")
    def need(key, types):
        if key not in obj:
            raise ProtocolError(f"{mtype} requires field {key!r}")
        if not isinstance(obj[key], types) or isinstance(obj[key], bool):
            raise ProtocolError(f"{mtype}.{key} has the wrong type")
        return obj[key]
    if mtype == "set_stage":
        need("stage", int)
    elif mtype == "set_profile":
        if not isinstance(obj.get("profile"), dict):
            raise ProtocolError("set_profile requires an object field 'profile'")
    elif mtype == "set_fixation":
        need("x", (int, float))
        need("y", (int, float))
    elif mtype == "set_param":
        if not isinstance(obj.get("path"), str):
            raise ProtocolError("set_param requires a string field 'path'")
        if "value" not in obj:
            raise ProtocolError("set_param requires field 'value'")
    return obj
