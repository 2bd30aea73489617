"""Regenerate the committed fixtures under fixtures/ and profiles/.

Run from the repository root after changing the protocol, the PRNG, or
the preset definitions:

    python tools/make_fixtures.py

Fixtures are deterministic; a clean run must reproduce the committed
bytes exactly (the test suite checks this for the JSON goldens).
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from vsim import protocol  # noqa: E402
from vsim.filters import generate_floaters, generate_patches  # noqa: E402
from vsim.imageio import encode_image  # noqa: E402
from vsim.profile import preset, save_profile  # noqa: E402
from vsim.rng import SplitMix64  # noqa: E402

ROOT = os.path.normpath(os.path.join(os.path.dirname(__file__), ".."))
FIXTURES = os.path.join(ROOT, "fixtures")
PROTOCOL_DIR = os.path.join(FIXTURES, "protocol")
PROFILES_DIR = os.path.join(ROOT, "profiles")


def _write(path: str, data: bytes) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(data)
    print(f"wrote {os.path.relpath(path, ROOT)} ({len(data)} bytes)")


def _write_json(path: str, obj) -> None:
    _write(path, (json.dumps(obj, indent=2) + "\n").encode("utf-8"))


def test_card(width: int = 8, height: int = 8) -> np.ndarray:
    """Tiny deterministic RGB pattern used by the protocol fixtures."""
    y, x = np.mgrid[0:height, 0:width]
    card = np.stack([
        (x * 255 // max(width - 1, 1)),
        (y * 255 // max(height - 1, 1)),
        ((x + y) % 2) * 255,
    ], axis=-1).astype(np.uint8)
    return card


def make_protocol_fixtures() -> None:
    card = test_card()
    png = encode_image(card, "png")
    jpeg = encode_image(card, "jpeg")

    frame_png = protocol.pack_frame(7, protocol.CODEC_PNG, png)
    frame_jpeg = protocol.pack_frame(8, protocol.CODEC_JPEG, jpeg)

    trailer = {
        "frame_id": 7,
        "timing": {
            "width": 8, "height": 8,
            "filters": [{"name": "eccentric_blur", "us": 1200}],
            "total_us": 2100, "budget_us": 33333, "over_budget": False,
        },
        "dropped": [5, 6],
        "warnings": [],
    }
    reply_png = protocol.pack_reply(
        7, protocol.CODEC_PNG, png,
        json.dumps(trailer, separators=(",", ":")).encode("utf-8"))

    bad_magic = b"XSIM" + frame_png[4:]
    bad_version = frame_png[:4] + bytes([9]) + frame_png[5:]
    bad_codec = frame_png[:5] + bytes([9]) + frame_png[6:]
    truncated = frame_png[:-1]
    trailing = frame_png + b"\x00"

    _write(os.path.join(PROTOCOL_DIR, "test_card.png"), png)
    _write(os.path.join(PROTOCOL_DIR, "frame_png_id7.bin"), frame_png)
    _write(os.path.join(PROTOCOL_DIR, "frame_jpeg_id8.bin"), frame_jpeg)
    _write(os.path.join(PROTOCOL_DIR, "reply_png_id7.bin"), reply_png)
    _write(os.path.join(PROTOCOL_DIR, "bad_magic.bin"), bad_magic)
    _write(os.path.join(PROTOCOL_DIR, "bad_version.bin"), bad_version)
    _write(os.path.join(PROTOCOL_DIR, "bad_codec.bin"), bad_codec)
    _write(os.path.join(PROTOCOL_DIR, "truncated.bin"), truncated)
    _write(os.path.join(PROTOCOL_DIR, "trailing_garbage.bin"), trailing)

    manifest = {
        "version": protocol.VERSION,
        "header_size": protocol.HEADER_SIZE,
        "frames": [
            {"file": "frame_png_id7.bin", "valid": True, "frame_id": 7,
             "codec": "png", "payload_file": "test_card.png"},
            {"file": "frame_jpeg_id8.bin", "valid": True, "frame_id": 8,
             "codec": "jpeg"},
            {"file": "bad_magic.bin", "valid": False, "error": "magic"},
            {"file": "bad_version.bin", "valid": False, "error": "version"},
            {"file": "bad_codec.bin", "valid": False, "error": "codec"},
            {"file": "truncated.bin", "valid": False, "error": "length"},
            {"file": "trailing_garbage.bin", "valid": False,
             "error": "length"},
        ],
        "replies": [
            {"file": "reply_png_id7.bin", "frame_id": 7, "codec": "png",
             "payload_file": "test_card.png", "trailer": trailer},
        ],
        "controls": {
            "valid": [
                {"type": "ping"},
                {"type": "get_profile"},
                {"type": "set_stage", "stage": 2},
                {"type": "set_fixation", "x": 0.25, "y": 0.75},
                {"type": "set_param", "path": "cvd.severity",
                 "value": 0.7},
            ],
            "invalid": [
                {"msg": {"type": "warp_speed"}, "reason": "unknown type"},
                {"msg": {"type": "set_stage"}, "reason": "missing stage"},
                {"msg": {"type": "set_stage", "stage": "two"},
                 "reason": "stage not an integer"},
                {"msg": {"type": "set_fixation", "x": 0.5},
                 "reason": "missing y"},
                {"msg": {"type": "set_param", "path": "cvd.severity"},
                 "reason": "missing value"},
            ],
        },
    }
    _write_json(os.path.join(PROTOCOL_DIR, "manifest.json"), manifest)


def make_cards() -> None:
    # Blue/yellow chart for eyeballing (and testing) tritan collapse.
    card = np.zeros((48, 64, 3), np.uint8)
    card[:, :32] = (255, 255, 0)
    card[:, 32:] = (0, 0, 255)
    _write(os.path.join(FIXTURES, "cards", "blue_yellow.png"),
           encode_image(card, "png"))


def make_rng_vectors() -> None:
    vectors = []
    for seed in (0, 1, 7, 42, 123456789):
        gen = SplitMix64(seed)
        u64 = [gen.next_u64() for _ in range(8)]
        gen = SplitMix64(seed)
        floats = [gen.next_float() for _ in range(8)]
        vectors.append({
            "seed": seed,
            "u64_hex": [f"{v:016x}" for v in u64],
            "float": floats,
        })
    doc = {"algorithm": "vsim-splitmix64", "version": 1, "vectors": vectors}
    _write_json(os.path.join(FIXTURES, "rng_vectors.json"), doc)


def make_field_goldens() -> None:
    floaters = generate_floaters(42, 7)
    doc = {
        "seed": floaters.seed,
        "count": len(floaters.blobs),
        "blobs": [
            {"center": list(b.center), "radius": b.radius,
             "opacity": b.opacity, "drift_amp": b.drift_amp,
             "drift_freq": b.drift_freq, "phase": b.phase}
            for b in floaters.blobs
        ],
    }
    _write_json(os.path.join(FIXTURES, "floaters_seed42_count7.json"), doc)

    patches = generate_patches(7, 4, 0.2)
    doc = {
        "seed": patches.seed,
        "count": len(patches.patches),
        "coverage_target": 0.2,
        "patches": [
            {"center": list(p.center), "semi_axes": list(p.semi_axes),
             "rotation": p.rotation, "floor": p.floor}
            for p in patches.patches
        ],
    }
    _write_json(os.path.join(FIXTURES, "patches_seed7_count4.json"), doc)


def make_profile_goldens() -> None:
    for stage in range(5):
        path = os.path.join(PROFILES_DIR, f"stage{stage}.vsim.json")
        _write(path, save_profile(preset(stage)))


def main() -> None:
    make_protocol_fixtures()
    make_cards()
    make_rng_vectors()
    make_field_goldens()
    make_profile_goldens()


if __name__ == "__main__":
    main()
