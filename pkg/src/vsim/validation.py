"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def check_frame(frame, *, name: str = "frame") -> np.ndarray:
    """Validate an 8-bit RGB frame and return it as a C-contiguous array.

    Accepts (H, W, 3) uint8. Raises ValueError otherwise.
    """
    arr = np.asarray(frame)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"{name} must be uint8, got {arr.dtype}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be at least 1x1, got {arr.shape}")
    return np.ascontiguousarray(arr)


def check_linear_image(img, *, name: str = "img") -> np.ndarray:
    """Validate a linear-light image and return it as C-contiguous float32.

    Accepts (H, W, 3) float32 or float64; values are expected in [0, 1]
    but are not clipped here (filters clip where the math requires it).
    """
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if arr.dtype == np.float32:
        return np.ascontiguousarray(arr)
    if arr.dtype == np.float64:
        return np.ascontiguousarray(arr, dtype=np.float32)
    raise ValueError(f"{name} must be float32 or float64, got {arr.dtype}")


def check_in_range(value, low, high, name: str, *, low_open: bool = False,
                   high_open: bool = False) -> float:
    """Validate a scalar against a closed or half-open interval."""
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    lo_ok = v > low if low_open else v >= low
    hi_ok = v < high if high_open else v <= high
    if not (lo_ok and hi_ok):
        lo_b = "(" if low_open else "["
        hi_b = ")" if high_open else "]"
        raise ValueError(
            f"{name} must be within {lo_b}{low}, {high}{hi_b}, got {value!r}")
    return v


def check_positive(value, name: str) -> float:
    """Validate a strictly positive finite scalar."""
    v = float(value)
    if not np.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")
    return v
