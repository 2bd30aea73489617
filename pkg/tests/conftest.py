"""Shared fixtures: deterministic frames, repo paths, warm JIT kernels."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

REPO_ROOT = os.path.normpath(os.path.join(os.path.dirname(__file__), ".."))
FIXTURES = os.path.join(REPO_ROOT, "fixtures")
PROFILES_DIR = os.path.join(REPO_ROOT, "profiles")


@pytest.fixture(scope="session")
def fixtures_dir() -> str:
    return FIXTURES


@pytest.fixture(scope="session")
def profiles_dir() -> str:
    return PROFILES_DIR


def load_fixture_json(name: str):
    with open(os.path.join(FIXTURES, name), "rb") as fh:
        return json.load(fh)


def load_fixture_bytes(name: str) -> bytes:
    with open(os.path.join(FIXTURES, name), "rb") as fh:
        return fh.read()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_frame(rng) -> np.ndarray:
    return rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8)


def make_card(width: int = 64, height: int = 48) -> np.ndarray:
    """Deterministic colorful chart: gradients, rings and a checker."""
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    r = np.hypot(x - cx, y - cy)
    card = np.stack([
        255.0 * x / max(width - 1, 1),
        255.0 * (0.5 + 0.5 * np.sin(r / 2.0)),
        255.0 * (((x // 4 + y // 4) % 2)),
    ], axis=-1)
    return np.clip(card + 0.5, 0, 255).astype(np.uint8)


# One line per acceptance criterion, echoed after the run so the
# verdicts survive in plain pytest output (see test_acceptance.py).
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_jit_kernels():
    """Compile the jitted kernels once so timed tests measure math, not JIT."""
    from vsim.filters import eccentric_blur, eccentric_blur_reference
    from vsim.geometry import AcuityModel, FieldConfig, eccentricity_map

    frame = np.full((16, 16, 3), 0.5, np.float32)
    emap = eccentricity_map(16, 16, FieldConfig())
    model = AcuityModel()
    eccentric_blur(frame, emap, model)
    eccentric_blur_reference(frame, emap, model)
    eccentric_blur_reference(frame, emap, model, boundary="wrap")
