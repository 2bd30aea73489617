"""Numba kernels for the per-pixel inner loops.

Everything here is deliberately dumb and explicit: plain loops the JIT
turns into tight machine code. The public API lives in color.py and
filters.py; these functions assume validated, contiguous inputs.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def encode_srgb_u8(flat, bounds, coarse, nbins, out):
    """Quantize linear-light floats to sRGB codes with round-half-up.

    ``bounds[c]`` is the linear value at which the output code steps from
    c to c+1, i.e. the decoded value of (c + 0.5) / 255. The coarse table
    maps ``int(v * nbins)`` to a code lower bound; the loop then walks at
    most a couple of boundaries. Exactly equivalent to
    floor(255 * encode(v) + 0.5) with clamping.
    """
    for i in range(flat.size):
        v = flat[i]
        if v <= 0.0:
            out[i] = 0
        elif v >= 1.0:
            out[i] = 255
        else:
            c = coarse[int(v * nbins)]
            while c < 255 and v >= bounds[c]:
                c += 1
            out[i] = c


@njit(inline="always")
def _clamp01(v):
    if v < np.float32(0.0):
        return np.float32(0.0)
    if v > np.float32(1.0):
        return np.float32(1.0)
    return v


@njit(cache=True, fastmath=True)
def foveated_blend(orig, stack, route, frac, kernels, radii, invsums, out):
    """Assemble the foveated image from per-pixel routing decisions.

    route[y, x] == 0   -> copy the source pixel (sigma == 0)
    route[y, x] == r>0 -> lerp stack[r - 1] and stack[r] with frac[y, x]
    route[y, x] == r<0 -> direct truncated-Gaussian tap from the source
                          using quantized kernel bin (-r - 1); the kernel
                          is renormalized over in-bounds taps.

    Interior pixels (kernel fully inside the frame) skip the per-tap
    bounds checks and normalize with the precomputed invsums[b].
    Blended outputs are clamped to [0, 1]; copies pass through untouched.
    """
    h, w, _ = orig.shape
    for y in range(h):
        for x in range(w):
            r = route[y, x]
            if r == 0:
                out[y, x, 0] = orig[y, x, 0]
                out[y, x, 1] = orig[y, x, 1]
                out[y, x, 2] = orig[y, x, 2]
            elif r > 0:
                lo = r - 1
                t = frac[y, x]
                s = np.float32(1.0) - t
                out[y, x, 0] = _clamp01(
                    s * stack[lo, y, x, 0] + t * stack[lo + 1, y, x, 0])
                out[y, x, 1] = _clamp01(
                    s * stack[lo, y, x, 1] + t * stack[lo + 1, y, x, 1])
                out[y, x, 2] = _clamp01(
                    s * stack[lo, y, x, 2] + t * stack[lo + 1, y, x, 2])
            else:
                b = -r - 1
                rad = radii[b]
                acc0 = np.float32(0.0)
                acc1 = np.float32(0.0)
                acc2 = np.float32(0.0)
                if rad <= y < h - rad and rad <= x < w - rad:
                    # Constant trip counts per radius so the JIT unrolls.
                    if rad == 1:
                        for dy in range(-1, 2):
                            yy = y + dy
                            for dx in range(-1, 2):
                                xx = x + dx
                                wgt = kernels[b, dy + 1, dx + 1]
                                acc0 += wgt * orig[yy, xx, 0]
                                acc1 += wgt * orig[yy, xx, 1]
                                acc2 += wgt * orig[yy, xx, 2]
                    elif rad == 2:
                        for dy in range(-2, 3):
                            yy = y + dy
                            for dx in range(-2, 3):
                                xx = x + dx
                                wgt = kernels[b, dy + 2, dx + 2]
                                acc0 += wgt * orig[yy, xx, 0]
                                acc1 += wgt * orig[yy, xx, 1]
                                acc2 += wgt * orig[yy, xx, 2]
                    else:
                        for dy in range(-3, 4):
                            yy = y + dy
                            for dx in range(-3, 4):
                                xx = x + dx
                                wgt = kernels[b, dy + 3, dx + 3]
                                acc0 += wgt * orig[yy, xx, 0]
                                acc1 += wgt * orig[yy, xx, 1]
                                acc2 += wgt * orig[yy, xx, 2]
                    inv = invsums[b]
                    out[y, x, 0] = _clamp01(acc0 * inv)
                    out[y, x, 1] = _clamp01(acc1 * inv)
                    out[y, x, 2] = _clamp01(acc2 * inv)
                else:
                    wsum = np.float32(0.0)
                    for dy in range(-rad, rad + 1):
                        yy = y + dy
                        if yy < 0 or yy >= h:
                            continue
                        for dx in range(-rad, rad + 1):
                            xx = x + dx
                            if xx < 0 or xx >= w:
                                continue
                            wgt = kernels[b, dy + rad, dx + rad]
                            acc0 += wgt * orig[yy, xx, 0]
                            acc1 += wgt * orig[yy, xx, 1]
                            acc2 += wgt * orig[yy, xx, 2]
                            wsum += wgt
                    out[y, x, 0] = _clamp01(acc0 / wsum)
                    out[y, x, 1] = _clamp01(acc1 / wsum)
                    out[y, x, 2] = _clamp01(acc2 / wsum)


@njit(cache=True)
def reference_blur(img, sigma, wrap, out):
    """Oracle spatially-varying blur: direct truncated convolution.

    Per pixel: a Gaussian truncated at +/- ceil(3 * sigma), normalized
    over its (in-bounds) support. ``wrap`` selects periodic indexing
    instead of border renormalization. Float64 throughout; no fastmath.
    """
    h, w, ch = img.shape
    for y in range(h):
        for x in range(w):
            s = sigma[y, x]
            if s <= 0.0:
                for c in range(ch):
                    out[y, x, c] = img[y, x, c]
                continue
            rad = int(math.ceil(3.0 * s))
            inv = 1.0 / (2.0 * s * s)
            acc = np.zeros(ch, np.float64)
            wsum = 0.0
            for dy in range(-rad, rad + 1):
                yy = y + dy
                if wrap:
                    yy %= h
                elif yy < 0 or yy >= h:
                    continue
                for dx in range(-rad, rad + 1):
                    xx = x + dx
                    if wrap:
                        xx %= w
                    elif xx < 0 or xx >= w:
                        continue
                    wgt = math.exp(-(dx * dx + dy * dy) * inv)
                    for c in range(ch):
                        acc[c] += wgt * img[yy, xx, c]
                    wsum += wgt
            for c in range(ch):
                out[y, x, c] = acc[c] / wsum
