"""Visual-field geometry: eccentricity maps and the acuity model.

A frame is treated as a pinhole view with a given horizontal field of
view. Every pixel gets an eccentricity (angular distance from the
fixation point, in degrees); peripheral acuity loss turns eccentricity
into a Gaussian blur radius in pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .validation import check_in_range, check_positive


@dataclass(frozen=True)
class FieldConfig:
    """Viewing geometry: horizontal FOV in degrees, fixation in [0,1]^2.

    The fixation point is given as a fraction of the frame (0.5, 0.5 is
    the center); it maps to pixel (fx * (w - 1), fy * (h - 1)).
    """

    fov_h: float = 60.0
    fixation: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        check_in_range(self.fov_h, 0.0, 180.0, "fov_h",
                       low_open=True, high_open=True)
        if not isinstance(self.fixation, (tuple, list)) \
                or len(self.fixation) != 2:
            raise ValueError(f"fixation must be (x, y), got {self.fixation!r}")
        fx, fy = self.fixation
        check_in_range(fx, 0.0, 1.0, "fixation[0]")
        check_in_range(fy, 0.0, 1.0, "fixation[1]")
        object.__setattr__(self, "fov_h", float(self.fov_h))
        object.__setattr__(self, "fixation", (float(fx), float(fy)))


@dataclass(frozen=True)
class AcuityModel:
    """Linear minimum-angle-of-resolution (MAR) model.

    MAR grows linearly with eccentricity: mar(e) = mar0 * e / e2 arcmin,
    so acuity halves every e2 degrees relative to a fovea resolving mar0.
    The blur sigma in pixels is capped at sigma_cap to bound kernel cost.
    """

    mar0: float = 1.0
    e2: float = 2.0
    sigma_cap: float = 12.0

    def __post_init__(self):
        check_positive(self.mar0, "mar0")
        check_positive(self.e2, "e2")
        check_positive(self.sigma_cap, "sigma_cap")


@dataclass(frozen=True, eq=False)
class EccentricityMap:
    """Per-pixel eccentricity in degrees plus the scale that produced it.

    ppd is pixels per degree at the image center; fixation_px is the
    fixation rounded to integer pixel coordinates (x, y). cache_key is
    set when the map came from the module cache and is None for ad-hoc
    maps; filters use it to memoize derived per-resolution artifacts.
    """

    e: np.ndarray
    ppd: float
    fixation_px: tuple[int, int]
    cache_key: tuple | None = None

    @property
    def height(self) -> int:
        return self.e.shape[0]

    @property
    def width(self) -> int:
        return self.e.shape[1]

    @property
    def focal_px(self) -> float:
        return self.ppd * 180.0 / math.pi


def focal_length_px(width: int, fov_h: float) -> float:
    """Pinhole focal length in pixels: (w / 2) / tan(fov_h / 2)."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    check_in_range(fov_h, 0.0, 180.0, "fov_h", low_open=True, high_open=True)
    return (width / 2.0) / math.tan(math.radians(fov_h) / 2.0)


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _compute_map(width: int, height: int, field: FieldConfig,
                 key: tuple | None) -> EccentricityMap:
    focal = focal_length_px(width, field.fov_h)
    # Distances are measured from the fixation pixel (the rounded one),
    # so eccentricity is exactly zero there: a one-pixel oasis of clarity.
    fx = _round_half_up(field.fixation[0] * (width - 1))
    fy = _round_half_up(field.fixation[1] * (height - 1))
    xs = np.arange(width, dtype=np.float64) - fx
    ys = np.arange(height, dtype=np.float64) - fy
    d = np.hypot(xs[None, :], ys[:, None])
    e = np.degrees(np.arctan(d / focal)).astype(np.float32)
    e.setflags(write=False)
    ppd = focal * math.pi / 180.0
    return EccentricityMap(e=e, ppd=ppd, fixation_px=(fx, fy), cache_key=key)


@lru_cache(maxsize=16)
def _cached_map(width: int, height: int, field: FieldConfig) -> EccentricityMap:
    return _compute_map(width, height, field, key=(width, height, field))


def eccentricity_map(width: int, height: int,
                     field: FieldConfig | None = None) -> EccentricityMap:
    """Eccentricity map for a frame size, cached per (size, field).

    Repeated calls with equal arguments return the identical object, so
    a video stream pays the trigonometry once per resolution.
    """
    if width < 1 or height < 1:
        raise ValueError(f"frame size must be >= 1x1, got {width}x{height}")
    return _cached_map(int(width), int(height), field or FieldConfig())


def blur_sigma_px(e, model: AcuityModel, ppd: float):
    """Blur sigma in pixels for eccentricity e (degrees, scalar or array).

    sigma_arcmin = mar0 * e / e2; sigma_px = sigma_arcmin / 60 * ppd,
    capped at model.sigma_cap. Zero at the fixation point by construction.
    """
    e = np.asarray(e)
    sigma = (model.mar0 / model.e2 / 60.0 * ppd) * e
    out = np.minimum(sigma, model.sigma_cap, dtype=np.float64
                     if sigma.dtype == np.float64 else np.float32)
    return float(out) if out.ndim == 0 else out


def field_to_pixel(emap: EccentricityMap, ex: float, ey: float) -> tuple[float, float]:
    """Map field coordinates (degrees from fixation; x right, y down) to
    fractional pixel coordinates via the pinhole projection."""
    focal = emap.focal_px
    px = emap.fixation_px[0] + focal * math.tan(math.radians(ex))
    py = emap.fixation_px[1] + focal * math.tan(math.radians(ey))
    return px, py
