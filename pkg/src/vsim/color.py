"""sRGB transfer functions and color-vision-deficiency simulation.

Images decode from 8-bit sRGB to linear light, get processed there, and
encode back. The CVD simulation is the physiologically-based model of
Machado, Oliveira and Fernandes (2009): one 3x3 matrix in linear RGB per
(deficiency, severity), tabulated at severity steps of 0.1 and linearly
interpolated element-wise in between. The table ships as a versioned
text file in vsim/data/cvd_matrices.txt.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import cv2
import numpy as np

from . import kernels
from .validation import check_frame, check_linear_image

DEFICIENCIES = ("protan", "deutan", "tritan")

#: Linear value of each 8-bit sRGB code, exact transfer function in float64.
_DECODE_LUT64 = None
_DECODE_LUT32 = None
#: bounds[c] = decoded (c + 0.5) / 255; code of v = count of bounds <= v.
_ENCODE_BOUNDS = None
_ENCODE_COARSE = None
_ENCODE_NBINS = 4096


def srgb_decode(s):
    """Exact sRGB electro-optical transfer: encoded [0,1] -> linear [0,1]."""
    s = np.asarray(s, dtype=np.float64)
    return np.where(s <= 0.04045, s / 12.92, ((s + 0.055) / 1.055) ** 2.4)


def srgb_encode(v):
    """Exact inverse transfer: linear [0,1] -> encoded [0,1]."""
    v = np.asarray(v, dtype=np.float64)
    return np.where(v <= 0.0031308, v * 12.92, 1.055 * v ** (1 / 2.4) - 0.055)


def _tables():
    global _DECODE_LUT64, _DECODE_LUT32, _ENCODE_BOUNDS, _ENCODE_COARSE
    if _DECODE_LUT32 is None:
        codes = np.arange(256, dtype=np.float64) / 255.0
        _DECODE_LUT64 = srgb_decode(codes)
        _DECODE_LUT32 = _DECODE_LUT64.astype(np.float32)
        halves = (np.arange(255, dtype=np.float64) + 0.5) / 255.0
        # float64 boundaries keep the code decision exact for any float32
        # input (the comparison promotes losslessly).
        _ENCODE_BOUNDS = srgb_decode(halves)
        starts = np.arange(_ENCODE_NBINS, dtype=np.float64) / _ENCODE_NBINS
        # Guard band: float32(v * nbins) can land in bin i although v sits
        # a few ulps below the bin start. Underestimating the coarse code
        # is safe (the walk only moves up), overestimating is not.
        starts *= 1.0 - 2.0 ** -22
        _ENCODE_COARSE = np.searchsorted(
            _ENCODE_BOUNDS, starts, side="right").astype(np.uint8)
    return _DECODE_LUT32, _ENCODE_BOUNDS, _ENCODE_COARSE


def srgb_to_linear(frame) -> np.ndarray:
    """Decode an (H, W, 3) uint8 sRGB frame to linear-light float32."""
    frame = check_frame(frame)
    lut, _, _ = _tables()
    # cv2.LUT is a SIMD gather; bit-identical to lut[frame] and much faster.
    return cv2.LUT(frame, lut.reshape(1, 256))


def linear_to_srgb(img) -> np.ndarray:
    """Encode linear-light float32 back to uint8 sRGB.

    Values are clamped to [0, 1]; quantization rounds half up, so the
    256 code values round-trip exactly through srgb_to_linear.
    """
    img = check_linear_image(img)
    _, bounds, coarse = _tables()
    out = np.empty(img.shape, np.uint8)
    kernels.encode_srgb_u8(img.ravel(), bounds, coarse,
                           np.float32(_ENCODE_NBINS), out.ravel())
    return out


@dataclass(frozen=True, eq=False)
class CvdMatrix:
    """A 3x3 linear-RGB simulation matrix with its provenance."""

    m: np.ndarray
    deficiency: str
    severity: float


@lru_cache(maxsize=1)
def _matrix_table():
    """Parse the shipped table into {deficiency: (11, 3, 3) float64}."""
    text = (resources.files("vsim") / "data" / "cvd_matrices.txt").read_text()
    table = {d: np.full((11, 3, 3), np.nan) for d in DEFICIENCIES}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        d, sev, vals = parts[0], float(parts[1]), [float(p) for p in parts[2:]]
        if d not in table or len(vals) != 9:
            raise ValueError(f"malformed matrix table line: {line!r}")
        idx = round(sev * 10)
        table[d][idx] = np.array(vals).reshape(3, 3)
    for d, grid in table.items():
        if np.isnan(grid).any():
            raise ValueError(f"matrix table is missing entries for {d}")
        sums = grid.sum(axis=2)
        if not np.allclose(sums, 1.0, atol=1e-4):
            raise ValueError(f"matrix table rows for {d} do not sum to 1")
    return table


def cvd_matrix(deficiency: str, severity: float) -> CvdMatrix:
    """Simulation matrix for a deficiency at a severity in [0, 1].

    Severities between the tabulated 0.1 steps interpolate element-wise
    between the bracketing matrices. Severity 0 is the exact identity.
    """
    if deficiency not in DEFICIENCIES:
        raise ValueError(
            f"deficiency must be one of {DEFICIENCIES}, got {deficiency!r}")
    severity = float(severity)
    if not (0.0 <= severity <= 1.0):
        raise ValueError(f"severity must be within [0, 1], got {severity!r}")
    if severity == 0.0:
        m = np.eye(3)
    else:
        grid = _matrix_table()[deficiency]
        # Snap to the 0.1 grid despite binary-float noise (0.3 * 10 != 3.0)
        # so tabulated severities return the table matrix exactly.
        pos = round(severity * 10.0, 9)
        lo = min(int(pos), 9)
        t = pos - lo
        m = grid[lo].copy() if t == 0.0 else (1.0 - t) * grid[lo] + t * grid[lo + 1]
    m.setflags(write=False)
    return CvdMatrix(m=m, deficiency=deficiency, severity=severity)


def apply_cvd(img, matrix: CvdMatrix | np.ndarray) -> np.ndarray:
    """Apply a simulation matrix to a linear image, clipping to [0, 1].

    The Machado matrices can push saturated colors slightly outside the
    RGB cube; out-of-range results clip. With the identity matrix the
    output is bit-identical to the input.
    """
    img = check_linear_image(img)
    m = matrix.m if isinstance(matrix, CvdMatrix) else np.asarray(matrix)
    out = cv2.transform(img, m.astype(np.float32))
    np.clip(out, 0.0, 1.0, out=out)
    return out
