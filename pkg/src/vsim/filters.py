"""The individual degradation effects.

Eccentric (foveated) blur, central haze, vitreous floaters, clouding
and dark patches. Every filter is a pure function from a linear-light
image to a new linear-light image of the same size, with outputs in
[0, 1]. Procedural content (floaters, patches) is generated from a
seed with the pinned PRNG in rng.py so fields reproduce bit-exactly
across runs and implementations.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import cv2
import numpy as np

from . import kernels
from .geometry import AcuityModel, EccentricityMap, blur_sigma_px, field_to_pixel
from .rng import SplitMix64
from .validation import check_in_range, check_linear_image, check_positive

# Foveated-blur internals: sigma below _SIGMA_BASE uses direct quantized
# kernels (the pyramid cannot represent fractional blur accurately there);
# sigma at or above it blends pyramid levels sigma_base * 2^j.
_SIGMA_BASE = 1.0
_LUT_BINS = 512
# Effective extra smoothing of one 2x area-downsample step, measured in
# destination pixels, and of the final bilinear upsample, measured in
# source pixels. Both calibrated numerically against true Gaussians.
_DOWNSAMPLE_SIGMA = 0.2887
_UPSAMPLE_SIGMA = 0.4082

_FLOATER_TINT = (0.10, 0.01, 0.01)
_FLOATER_EDGE = math.exp(-2.0)

_EMPTY_STACK = np.zeros((1, 1, 1, 3), np.float32)


def _check_dims(img: np.ndarray, emap: EccentricityMap):
    if img.shape[:2] != emap.e.shape:
        raise ValueError(
            f"image size {img.shape[1]}x{img.shape[0]} does not match "
            f"eccentricity map {emap.width}x{emap.height}")


def smoothstep(t):
    """Hermite smoothstep 3t^2 - 2t^3 on t clamped to [0, 1]."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


# --------------------------------------------------------------------------
# Eccentric blur


@lru_cache(maxsize=1)
def _small_sigma_kernels():
    """Quantized truncated-Gaussian kernels for sigma in (0, _SIGMA_BASE).

    Bin b holds the kernel for sigma at the bin center; with 512 bins the
    quantization error in sigma is under 0.001 px. Radius is ceil(3*sigma)
    (max 3), weights normalized over the full support.
    """
    kerns = np.zeros((_LUT_BINS, 7, 7), np.float32)
    radii = np.zeros(_LUT_BINS, np.int32)
    invsums = np.zeros(_LUT_BINS, np.float32)
    for b in range(_LUT_BINS):
        s = (b + 0.5) / _LUT_BINS * _SIGMA_BASE
        r = math.ceil(3.0 * s)
        ax = np.arange(-r, r + 1, dtype=np.float64)
        k = np.exp(-(ax ** 2) / (2.0 * s * s))
        k2 = np.outer(k, k)
        k2 /= k2.sum()
        # Anchored top-left: foveated_blend indexes [dy + r, dx + r].
        kerns[b, :2 * r + 1, :2 * r + 1] = k2
        radii[b] = r
        # Reciprocal of the float32 weights' true sum: interior pixels
        # normalize with one multiply instead of accumulating wsum.
        invsums[b] = 1.0 / float(
            kerns[b, :2 * r + 1, :2 * r + 1].astype(np.float64).sum())
    return kerns, radii, invsums


@lru_cache(maxsize=32)
def _blur_plan(emap: EccentricityMap, model: AcuityModel):
    """Per-pixel routing for foveated_blend plus the pyramid depth."""
    sigma = blur_sigma_px(emap.e, model, emap.ppd)
    route = np.zeros(sigma.shape, np.int32)
    frac = np.zeros(sigma.shape, np.float32)
    small = (sigma > 0) & (sigma < _SIGMA_BASE)
    if small.any():
        bins = (sigma[small] * (_LUT_BINS / _SIGMA_BASE)).astype(np.int32)
        route[small] = -(np.minimum(bins, _LUT_BINS - 1) + 1)
    levels = 0
    pyr = sigma >= _SIGMA_BASE
    if pyr.any():
        smax = float(sigma.max())
        levels = max(2, 1 + math.ceil(math.log2(smax / _SIGMA_BASE)))
        b = np.log2(sigma[pyr] / _SIGMA_BASE)
        lo = np.minimum(b.astype(np.int32), levels - 2)
        route[pyr] = lo + 1
        frac[pyr] = b - lo
    route.setflags(write=False)
    frac.setflags(write=False)
    return route, frac, levels


_scratch = threading.local()


def _stack_buffer(levels: int, h: int, w: int) -> np.ndarray:
    """Reusable per-thread stack storage (allocation at 720p costs ~ms)."""
    shape = (levels, h, w, 3)
    buf = getattr(_scratch, "stack", None)
    if buf is None or buf.shape != shape:
        buf = np.empty(shape, np.float32)
        _scratch.stack = buf
    return buf


def _build_stack(img: np.ndarray, levels: int) -> np.ndarray:
    """Gaussian stack: level j is img blurred to sigma_base * 2^j, full res.

    Deeper levels run at halved resolution (each halving accounts for the
    resampling blur of the area downsample and the final bilinear upsample)
    so total cost stays O(n) in pixels.
    """
    h, w = img.shape[:2]
    stack = _stack_buffer(levels, h, w)
    cv2.GaussianBlur(img, (0, 0), _SIGMA_BASE, dst=stack[0])
    cur = stack[0]
    cur_sigma = _SIGMA_BASE  # accumulated blur in current-res pixels
    scale = 1
    for j in range(1, levels):
        if min(cur.shape[0], cur.shape[1]) > 16:
            nh, nw = (cur.shape[0] + 1) // 2, (cur.shape[1] + 1) // 2
            cur = cv2.resize(cur, (nw, nh), interpolation=cv2.INTER_AREA)
            scale *= 2
            cur_sigma = math.hypot(cur_sigma / 2.0, _DOWNSAMPLE_SIGMA)
        target = _SIGMA_BASE * (2.0 ** j) / scale
        budget = target ** 2 - cur_sigma ** 2
        if scale > 1:
            budget -= (_UPSAMPLE_SIGMA) ** 2
        inc = math.sqrt(max(budget, 1e-4))
        cur = cv2.GaussianBlur(cur, (0, 0), inc)
        cur_sigma = math.sqrt(cur_sigma ** 2 + inc ** 2)
        if scale > 1:
            cv2.resize(cur, (w, h), dst=stack[j],
                       interpolation=cv2.INTER_LINEAR)
        else:
            stack[j] = cur
    return stack


def eccentric_blur(img, emap: EccentricityMap, model: AcuityModel) -> np.ndarray:
    """Spatially-varying Gaussian blur with sigma = blur_sigma_px(e(p)).

    Production path: per-pixel truncated kernels below 1 px sigma, linear
    blend between bracketing Gaussian-pyramid levels above. Matches
    eccentric_blur_reference within MAE 2/255 (see tests).
    """
    img = check_linear_image(img)
    _check_dims(img, emap)
    route, frac, levels = _blur_plan(emap, model)
    stack = _build_stack(img, levels) if levels else _EMPTY_STACK
    kerns, radii, invsums = _small_sigma_kernels()
    out = np.empty_like(img)
    kernels.foveated_blend(img, stack, route, frac, kerns, radii, invsums,
                           out)
    return out


def eccentric_blur_reference(img, emap: EccentricityMap, model: AcuityModel,
                             boundary: str = "renormalize") -> np.ndarray:
    """Oracle: direct per-pixel convolution, truncated at 3 sigma.

    The kernel is normalized over its in-bounds support ('renormalize',
    no energy loss at borders) or indexes periodically ('wrap'). Slow by
    design; use on small images.
    """
    if boundary not in ("renormalize", "wrap"):
        raise ValueError(f"unknown boundary mode {boundary!r}")
    img = check_linear_image(img)
    _check_dims(img, emap)
    img64 = img.astype(np.float64)
    sigma = blur_sigma_px(emap.e.astype(np.float64), model, emap.ppd)
    out = np.empty_like(img64)
    kernels.reference_blur(img64, sigma, boundary == "wrap", out)
    return out.astype(np.float32)


def uniform_blur(img, sigma: float) -> np.ndarray:
    """Uniform Gaussian blur; identity for sigma <= 0."""
    img = check_linear_image(img)
    if sigma <= 0:
        return img.copy()
    out = cv2.GaussianBlur(img, (0, 0), float(sigma))
    np.clip(out, 0.0, 1.0, out=out)
    return out


# --------------------------------------------------------------------------
# Central haze


@dataclass(frozen=True)
class HazeParams:
    """Central haze: a veiled, extra-blurred disc around fixation.

    Opacity ramps from alpha_max at fixation to 0 at `radius` degrees
    with a smoothstep profile; within the disc the image is additionally
    blurred by extra_blur pixels before the veil composites over it.
    """

    radius: float = 5.0
    alpha_max: float = 0.85
    veil: tuple[float, float, float] = (0.8, 0.8, 0.78)
    extra_blur: float = 4.0

    def __post_init__(self):
        check_positive(self.radius, "radius")
        check_in_range(self.alpha_max, 0.0, 1.0, "alpha_max")
        for v in self.veil:
            check_in_range(v, 0.0, 1.0, "veil")
        check_in_range(self.extra_blur, 0.0, 1e6, "extra_blur")


@lru_cache(maxsize=32)
def _haze_fields(emap: EccentricityMap, radius: float, alpha_max: float,
                 extra_blur: float):
    """Window bounds plus smoothstep and alpha maps for the haze support."""
    e = emap.e
    inside = e < radius
    if not inside.any():
        return None
    ys, xs = np.nonzero(inside)
    pad = int(math.ceil(3.0 * extra_blur)) + 1
    y0 = max(int(ys.min()) - pad, 0)
    y1 = min(int(ys.max()) + pad + 1, e.shape[0])
    x0 = max(int(xs.min()) - pad, 0)
    x1 = min(int(xs.max()) + pad + 1, e.shape[1])
    t = 1.0 - e[y0:y1, x0:x1].astype(np.float64) / radius
    s = smoothstep(t).astype(np.float32)[..., None]
    alpha = (alpha_max * s).astype(np.float32)
    s.setflags(write=False)
    alpha.setflags(write=False)
    return y0, y1, x0, x1, s, alpha


def central_haze(img, emap: EccentricityMap, p: HazeParams, *,
                 copy: bool = True) -> np.ndarray:
    """Composite the hazy spot over the image around fixation.

    With copy=False the input array is modified in place and returned.
    """
    img = check_linear_image(img)
    _check_dims(img, emap)
    fields = _haze_fields(emap, p.radius, p.alpha_max, p.extra_blur)
    out = img.copy() if copy else img
    if fields is None:
        return out
    y0, y1, x0, x1, s, alpha = fields
    win = img[y0:y1, x0:x1]
    blurred = cv2.GaussianBlur(win, (0, 0), p.extra_blur) \
        if p.extra_blur > 0 else win
    veil = np.asarray(p.veil, np.float32)
    base = win * (1.0 - s) + blurred * s
    hazed = base * (1.0 - alpha) + veil * alpha
    np.clip(hazed, 0.0, 1.0, out=hazed)
    out[y0:y1, x0:x1] = hazed
    return out


# --------------------------------------------------------------------------
# Clouding


@dataclass(frozen=True)
class CloudingParams:
    """Global contrast compression toward the frame mean plus a veil mix.

    out = mu + (in - mu) * contrast_factor, per channel around the
    per-channel frame mean, then out = (1 - c) * out + c * veil with
    c = veil_strength.
    """

    veil_strength: float = 0.25
    contrast_factor: float = 0.5
    veil: tuple[float, float, float] = (0.75, 0.75, 0.75)

    def __post_init__(self):
        check_in_range(self.veil_strength, 0.0, 1.0, "veil_strength")
        check_in_range(self.contrast_factor, 0.0, 1.0, "contrast_factor")
        for v in self.veil:
            check_in_range(v, 0.0, 1.0, "veil")


def clouding(img, p: CloudingParams) -> np.ndarray:
    """Apply contrast compression and veiling; identity at k=1, c=0."""
    img = check_linear_image(img)
    k = p.contrast_factor
    c = p.veil_strength
    if k == 1.0 and c == 0.0:
        return img.copy()
    mu = np.asarray(cv2.mean(img)[:3], np.float64)
    veil = np.asarray(p.veil, np.float64)
    gain = k * (1.0 - c)
    bias = (1.0 - k) * (1.0 - c) * mu + c * veil
    # One fused per-channel affine pass: out_c = gain * in_c + bias_c.
    m = np.hstack([np.eye(3) * gain, bias[:, None]]).astype(np.float32)
    out = cv2.transform(img, m)
    np.clip(out, 0.0, 1.0, out=out)
    return out


# --------------------------------------------------------------------------
# Floaters


@dataclass(frozen=True)
class FloaterBlob:
    """One drifting speck: soft disc in field coordinates (degrees)."""

    center: tuple[float, float]
    radius: float
    opacity: float
    tint: tuple[float, float, float]
    drift_amp: float
    drift_freq: float
    phase: float


@dataclass(frozen=True)
class FloaterField:
    seed: int
    blobs: tuple[FloaterBlob, ...]


def generate_floaters(seed: int, count: int, bounds: float = 10.0) -> FloaterField:
    """Deterministic floater field from the pinned PRNG.

    Draw order per blob (7 uniforms from vsim-splitmix64, in this order):
    disc radius u, disc angle u, radius, opacity, drift_amp, drift_freq,
    phase. Centers are uniform over the disc of `bounds` degrees around
    fixation: r = bounds * sqrt(u1), theta = 2*pi*u2, center =
    (r cos theta, r sin theta). Ranges: radius [0.2, 1.0] deg, opacity
    [0.5, 0.9], drift_amp [0.1, 0.4] deg, drift_freq [0.05, 0.2] Hz,
    phase [0, 2*pi). Tint is a fixed dark red.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    check_positive(bounds, "bounds")
    gen = SplitMix64(seed)
    blobs = []
    for _ in range(count):
        r = bounds * math.sqrt(gen.next_float())
        theta = 2.0 * math.pi * gen.next_float()
        center = (r * math.cos(theta), r * math.sin(theta))
        blobs.append(FloaterBlob(
            center=center,
            radius=gen.uniform(0.2, 1.0),
            opacity=gen.uniform(0.5, 0.9),
            tint=_FLOATER_TINT,
            drift_amp=gen.uniform(0.1, 0.4),
            drift_freq=gen.uniform(0.05, 0.2),
            phase=gen.uniform(0.0, 2.0 * math.pi),
        ))
    return FloaterField(seed=int(seed), blobs=tuple(blobs))


def render_floaters(img, field: FloaterField, t: float,
                    emap: EccentricityMap, *, copy: bool = True) -> np.ndarray:
    """Alpha-composite each blob at its drifted position at time t.

    A blob at field position c drifts to c + drift_amp * (sin(2 pi f t +
    phase), cos(2 pi f t + phase)). Falloff is a truncated Gaussian:
    opacity * (exp(-d^2 / 2r^2) - e^-2) / (1 - e^-2), zero from d = 2r
    outward, so a blob covers at most a 4r-wide disc.

    With copy=False the input array is modified in place and returned.
    """
    img = check_linear_image(img)
    _check_dims(img, emap)
    out = img.copy() if copy else img
    h, w = out.shape[:2]
    for blob in field.blobs:
        arg = 2.0 * math.pi * blob.drift_freq * t + blob.phase
        ex = blob.center[0] + blob.drift_amp * math.sin(arg)
        ey = blob.center[1] + blob.drift_amp * math.cos(arg)
        px, py = field_to_pixel(emap, ex, ey)
        r_px = blob.radius * emap.ppd
        ext = 2.0 * r_px
        x0 = max(int(math.floor(px - ext)), 0)
        x1 = min(int(math.ceil(px + ext)) + 1, w)
        y0 = max(int(math.floor(py - ext)), 0)
        y1 = min(int(math.ceil(py + ext)) + 1, h)
        if x0 >= x1 or y0 >= y1:
            continue
        xs = np.arange(x0, x1, dtype=np.float64) - px
        ys = np.arange(y0, y1, dtype=np.float64) - py
        d2 = xs[None, :] ** 2 + ys[:, None] ** 2
        g = (np.exp(-d2 / (2.0 * r_px * r_px)) - _FLOATER_EDGE) \
            / (1.0 - _FLOATER_EDGE)
        np.clip(g, 0.0, None, out=g)
        a = (blob.opacity * g).astype(np.float32)[..., None]
        tint = np.asarray(blob.tint, np.float32)
        win = out[y0:y1, x0:x1]
        mixed = win * (1.0 - a) + tint * a
        np.clip(mixed, 0.0, 1.0, out=mixed)
        out[y0:y1, x0:x1] = mixed
    return out


# --------------------------------------------------------------------------
# Patches (scotomas)


@dataclass(frozen=True)
class PatchEllipse:
    """One soft-edged dark ellipse in field coordinates (degrees)."""

    center: tuple[float, float]
    semi_axes: tuple[float, float]
    rotation: float
    floor: float


@dataclass(frozen=True)
class PatchField:
    seed: int
    patches: tuple[PatchEllipse, ...]


# Patch centers stay within this fraction of the field radius so most of
# each ellipse lands inside the visible field.
_PATCH_CENTER_FRACTION = 0.8
# E[jitter^2] for jitter ~ U[0.75, 1.25] and E[aspect] for U[0.5, 1]:
# normalization constants of the expected-coverage solve below.
_E_JITTER_SQ = (1.25 ** 3 - 0.75 ** 3) / 3.0 / 0.5
_E_ASPECT = 0.75


def generate_patches(seed: int, count: int, coverage_target: float,
                     field_radius: float = 15.0) -> PatchField:
    """Deterministic dark patches sized for an expected union coverage.

    Draw order per patch (6 uniforms): disc radius u, disc angle u,
    aspect, rotation, size jitter, floor. Centers are uniform over the
    disc of 0.8 * field_radius degrees; aspect (minor/major) is
    U[0.5, 1], rotation U[0, pi), size jitter U[0.75, 1.25], floor
    U[0.02, 0.12]. The base semi-major axis solves
    1 - (1 - coverage_target)^(1/count) = E[patch area] / field area,
    so the union of `count` independent patches covers about
    coverage_target of the field disc.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    check_in_range(coverage_target, 0.0, 0.6, "coverage_target")
    check_positive(field_radius, "field_radius")
    if count == 0:
        return PatchField(seed=int(seed), patches=())
    p_single = 1.0 - (1.0 - coverage_target) ** (1.0 / count)
    s0 = field_radius * math.sqrt(p_single / (_E_JITTER_SQ * _E_ASPECT))
    gen = SplitMix64(seed)
    patches = []
    for _ in range(count):
        r = _PATCH_CENTER_FRACTION * field_radius * math.sqrt(gen.next_float())
        theta = 2.0 * math.pi * gen.next_float()
        center = (r * math.cos(theta), r * math.sin(theta))
        aspect = gen.uniform(0.5, 1.0)
        rotation = gen.uniform(0.0, math.pi)
        jitter = gen.uniform(0.75, 1.25)
        floor = gen.uniform(0.02, 0.12)
        a = s0 * jitter
        patches.append(PatchEllipse(
            center=center,
            semi_axes=(a, a * aspect),
            rotation=rotation,
            floor=floor,
        ))
    return PatchField(seed=int(seed), patches=tuple(patches))


def render_patches(img, field: PatchField, emap: EccentricityMap, *,
                   copy: bool = True) -> np.ndarray:
    """Darken the image inside each patch toward its floor multiplier.

    The multiplier is `floor` deep inside an ellipse, rising to 1 with a
    smoothstep over the outer 10% of the (normalized) semi-axis;
    overlapping patches take the minimum multiplier.

    With copy=False the input array is modified in place and returned.
    """
    img = check_linear_image(img)
    _check_dims(img, emap)
    out = img.copy() if copy else img
    if not field.patches:
        return out
    h, w = out.shape[:2]
    boxes = []
    for patch in field.patches:
        px, py = field_to_pixel(emap, *patch.center)
        rmax = max(patch.semi_axes) * emap.ppd
        x0 = max(int(math.floor(px - rmax)) - 1, 0)
        x1 = min(int(math.ceil(px + rmax)) + 2, w)
        y0 = max(int(math.floor(py - rmax)) - 1, 0)
        y1 = min(int(math.ceil(py + rmax)) + 2, h)
        if x0 < x1 and y0 < y1:
            boxes.append((patch, px, py, x0, x1, y0, y1))
    if not boxes:
        return out
    ux0 = min(b[3] for b in boxes)
    ux1 = max(b[4] for b in boxes)
    uy0 = min(b[5] for b in boxes)
    uy1 = max(b[6] for b in boxes)
    mult = np.ones((uy1 - uy0, ux1 - ux0), np.float32)
    for patch, px, py, x0, x1, y0, y1 in boxes:
        a_px = patch.semi_axes[0] * emap.ppd
        b_px = patch.semi_axes[1] * emap.ppd
        xs = (np.arange(x0, x1, dtype=np.float32) - np.float32(px))
        ys = (np.arange(y0, y1, dtype=np.float32) - np.float32(py))
        cos_r = np.float32(math.cos(patch.rotation))
        sin_r = np.float32(math.sin(patch.rotation))
        xr = (xs[None, :] * cos_r + ys[:, None] * sin_r) * np.float32(1.0 / a_px)
        yr = (ys[:, None] * cos_r - xs[None, :] * sin_r) * np.float32(1.0 / b_px)
        rho = np.sqrt(xr * xr + yr * yr)
        edge = smoothstep((rho - np.float32(0.9)) * np.float32(10.0))
        m = np.float32(patch.floor) + np.float32(1.0 - patch.floor) * edge
        sub = mult[y0 - uy0:y1 - uy0, x0 - ux0:x1 - ux0]
        np.minimum(sub, m, out=sub)
    win = out[uy0:uy1, ux0:ux1]
    win *= mult[..., None]
    np.clip(win, 0.0, 1.0, out=win)
    return out
