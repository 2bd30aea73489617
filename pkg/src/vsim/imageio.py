"""PNG/JPEG codecs and file I/O for 8-bit RGB frames."""

from __future__ import annotations

import os

import cv2
import numpy as np

from .validation import check_frame


class ImageDecodeError(ValueError):
    """The byte stream is not a decodable PNG/JPEG image."""


_EXTENSIONS = {
    "png": ".png",
    "jpeg": ".jpg",
}


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or JPEG bytes to an (H, W, 3) uint8 RGB frame."""
    buf = np.frombuffer(data, np.uint8)
    if buf.size == 0:
        raise ImageDecodeError("empty image payload")
    bgr = cv2.imdecode(buf, cv2.IMREAD_COLOR)
    if bgr is None:
        raise ImageDecodeError("payload is not a decodable PNG/JPEG image")
    return np.ascontiguousarray(bgr[:, :, ::-1])


def encode_image(frame, codec: str = "png", quality: int = 90) -> bytes:
    """Encode an RGB frame; PNG is lossless, JPEG honors ``quality``."""
    frame = check_frame(frame)
    if codec not in _EXTENSIONS:
        raise ValueError(f"codec must be one of {sorted(_EXTENSIONS)}, "
                         f"got {codec!r}")
    params = [] if codec == "png" else [cv2.IMWRITE_JPEG_QUALITY, int(quality)]
    ok, buf = cv2.imencode(_EXTENSIONS[codec], frame[:, :, ::-1], params)
    if not ok:
        raise ValueError(f"{codec} encoding failed")
    return buf.tobytes()


def codec_for_path(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        return "png"
    if ext in (".jpg", ".jpeg"):
        return "jpeg"
    raise ValueError(f"unsupported image extension {ext!r} (use png/jpg)")


def read_image(path: str) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read image {path}: {exc}") from exc
    try:
        return decode_image(data)
    except ImageDecodeError as exc:
        raise ImageDecodeError(f"{path}: {exc}") from exc


def write_image(path: str, frame, quality: int = 90):
    data = encode_image(frame, codec_for_path(path), quality)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write image {path}: {exc}") from exc
