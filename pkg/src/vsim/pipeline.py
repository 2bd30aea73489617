"""Frame processing: compose the filters per profile, with timing.

The filter order is fixed: decode to linear light, color deficit first
(it is a retinal-signal effect), then acuity loss (eccentric blur and
any global blur), then haze and clouding, and the occluders (floaters,
patches) last so they cover the already-degraded scene, then encode.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import filters
from .color import apply_cvd, cvd_matrix, linear_to_srgb, srgb_to_linear
from .geometry import eccentricity_map
from .profile import SimulationProfile
from .validation import check_frame

DEFAULT_BUDGET_US = 33_333  # 30 fps


@dataclass(frozen=True)
class TimingReport:
    """Wall time per executed filter, microseconds, in execution order.

    ``filters`` lists only the degradation filters that actually ran
    (decode/encode are part of ``total_us`` but not listed). The report
    is over budget iff total_us > budget_us.
    """

    width: int
    height: int
    filters: tuple[tuple[str, int], ...]
    total_us: int
    budget_us: int = DEFAULT_BUDGET_US

    @property
    def over_budget(self) -> bool:
        return self.total_us > self.budget_us

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "filters": [{"name": n, "us": us} for n, us in self.filters],
            "total_us": self.total_us,
            "budget_us": self.budget_us,
            "over_budget": self.over_budget,
        }


@lru_cache(maxsize=64)
def _floater_field(seed: int, count: int, bounds: float):
    return filters.generate_floaters(seed, count, bounds)


@lru_cache(maxsize=64)
def _patch_field(seed: int, count: int, coverage_target: float):
    return filters.generate_patches(seed, count, coverage_target)


def process_frame(frame, profile: SimulationProfile, t: float = 0.0,
                  budget_us: int | None = None
                  ) -> tuple[np.ndarray, TimingReport]:
    """Simulate one frame; returns the output frame and its timing.

    Pure: the same (frame, profile, t) always produces the same bytes.
    Disabled filters are skipped entirely and do not appear in the
    report. t drives floater drift; pass 0 for still images.
    """
    frame = check_frame(frame)
    h, w = frame.shape[:2]
    emap = eccentricity_map(w, h, profile.field)
    budget = DEFAULT_BUDGET_US if budget_us is None else int(budget_us)
    entries: list[tuple[str, int]] = []
    start = time.perf_counter_ns()

    def timed(name, fn, *args, **kwargs):
        nonlocal img
        t0 = time.perf_counter_ns()
        img = fn(*args, **kwargs)
        entries.append((name, (time.perf_counter_ns() - t0) // 1000))

    img = srgb_to_linear(frame)
    if profile.cvd.severity > 0:
        matrix = cvd_matrix(profile.cvd.deficiency, profile.cvd.severity)
        timed("cvd", apply_cvd, img, matrix)
    if profile.acuity.enabled:
        timed("eccentric_blur", filters.eccentric_blur, img, emap,
              profile.acuity)
    if profile.global_blur_sigma > 0:
        timed("global_blur", filters.uniform_blur, img,
              profile.global_blur_sigma)
    # img is a fresh buffer after decode, so window filters may edit it
    # in place instead of copying a full frame each.
    if profile.haze.enabled:
        timed("haze", filters.central_haze, img, emap, profile.haze,
              copy=False)
    if profile.clouding.enabled:
        timed("clouding", filters.clouding, img, profile.clouding)
    if profile.floaters.enabled:
        fl = profile.floaters
        blobs = _floater_field(fl.seed, fl.count, fl.bounds)
        timed("floaters", filters.render_floaters, img, blobs, t, emap,
              copy=False)
    if profile.patches.enabled:
        pa = profile.patches
        patches = _patch_field(pa.seed, pa.count, pa.coverage_target)
        timed("patches", filters.render_patches, img, patches, emap,
              copy=False)
    out = linear_to_srgb(img)

    total = (time.perf_counter_ns() - start) // 1000
    report = TimingReport(width=w, height=h, filters=tuple(entries),
                          total_us=total, budget_us=budget)
    return out, report
