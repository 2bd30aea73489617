"""Pixel-to-eccentricity mapping and the acuity (blur sigma) law."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vsim.geometry import (AcuityModel, EccentricityMap, FieldConfig,
                           blur_sigma_px, eccentricity_map, field_to_pixel,
                           focal_length_px)


class TestFocalLength:
    def test_example_1000px_60deg(self):
        assert focal_length_px(1000, 60.0) == pytest.approx(866.03, abs=0.01)

    def test_example_1000px_90deg(self):
        assert focal_length_px(1000, 90.0) == pytest.approx(500.0, abs=1e-9)

    def test_example_2px_60deg(self):
        assert focal_length_px(2, 60.0) == pytest.approx(1.732, abs=0.001)

    @pytest.mark.parametrize("fov", [0.0, -10.0, 180.0, 270.0])
    def test_fov_domain_error(self, fov):
        with pytest.raises(ValueError):
            focal_length_px(100, fov)

    def test_width_domain_error(self):
        with pytest.raises(ValueError):
            focal_length_px(0, 60.0)


class TestFieldConfig:
    def test_defaults(self):
        cfg = FieldConfig()
        assert cfg.fov_h == 60.0
        assert cfg.fixation == (0.5, 0.5)

    @pytest.mark.parametrize("fix", [(-0.1, 0.5), (0.5, 1.5)])
    def test_fixation_outside_unit_square(self, fix):
        with pytest.raises(ValueError):
            FieldConfig(fixation=fix)

    def test_frozen(self):
        cfg = FieldConfig()
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.fov_h = 90.0


class TestEccentricityMap:
    def test_zero_at_fixation_pixel(self):
        emap = eccentricity_map(1000, 800, FieldConfig())
        px, py = emap.fixation_px
        assert (px, py) == (int(0.5 * 999 + 0.5), int(0.5 * 799 + 0.5))
        assert emap.e[py, px] == 0.0

    def test_zero_at_nearest_pixel_for_offcenter_fixation(self):
        emap = eccentricity_map(11, 7, FieldConfig(fixation=(0.73, 0.24)))
        iy, ix = np.unravel_index(np.argmin(emap.e), emap.e.shape)
        assert emap.e[iy, ix] == 0.0
        # Nearest pixel to (0.73*10, 0.24*6) = (7.3, 1.44) is (7, 1).
        assert (ix, iy) == (7, 1)

    def test_example_100px_offset(self):
        emap = eccentricity_map(1000, 1000, FieldConfig())
        px, py = emap.fixation_px
        assert emap.e[py, px + 100] == pytest.approx(6.59, abs=0.01)

    def test_ppd_example(self):
        emap = eccentricity_map(1000, 1000, FieldConfig())
        assert emap.ppd == pytest.approx(15.12, abs=0.01)

    def test_radially_nondecreasing_along_rays(self):
        emap = eccentricity_map(65, 65, FieldConfig())
        cy, cx = 32, 32
        rows = [emap.e[cy, cx:], emap.e[cy, cx::-1],
                emap.e[cy:, cx], emap.e[cy::-1, cx],
                np.diagonal(emap.e[cy:, cx:])]
        for ray in rows:
            assert np.all(np.diff(ray) >= 0.0)

    def test_reflection_symmetry_centered_fixation(self):
        emap = eccentricity_map(33, 21, FieldConfig())
        np.testing.assert_array_equal(emap.e, emap.e[::-1, :])
        np.testing.assert_array_equal(emap.e, emap.e[:, ::-1])

    def test_cache_returns_identical_object(self):
        a = eccentricity_map(64, 48, FieldConfig())
        b = eccentricity_map(64, 48, FieldConfig())
        assert a is b

    def test_distinct_configs_not_shared(self):
        a = eccentricity_map(64, 48, FieldConfig())
        b = eccentricity_map(64, 48, FieldConfig(fov_h=90.0))
        assert a is not b
        assert not np.array_equal(a.e, b.e)

    def test_map_is_readonly(self):
        emap = eccentricity_map(32, 32, FieldConfig())
        with pytest.raises(ValueError):
            emap.e[0, 0] = 1.0

    def test_shape_and_metadata(self):
        emap = eccentricity_map(64, 48, FieldConfig())
        assert isinstance(emap, EccentricityMap)
        assert emap.e.shape == (48, 64)
        assert emap.width == 64 and emap.height == 48
        assert emap.ppd > 0


class TestBlurSigma:
    def test_zero_at_fixation(self):
        assert blur_sigma_px(0.0, AcuityModel(), 15.12) == 0.0

    def test_example_at_e2(self):
        sigma = blur_sigma_px(2.0, AcuityModel(mar0=1.0, e2=2.0), 15.12)
        assert sigma == pytest.approx(0.252, abs=0.001)

    def test_example_at_6_59deg(self):
        sigma = blur_sigma_px(6.59, AcuityModel(mar0=1.0, e2=2.0), 15.12)
        assert sigma == pytest.approx(0.830, abs=0.001)

    def test_linear_below_cap(self):
        model = AcuityModel(mar0=1.0, e2=2.0, sigma_cap=1e9)
        s1 = blur_sigma_px(5.0, model, 10.0)
        s2 = blur_sigma_px(10.0, model, 10.0)
        assert s2 == pytest.approx(2 * s1, rel=1e-12)

    def test_cap_applies(self):
        model = AcuityModel(sigma_cap=3.0)
        assert blur_sigma_px(1e6, model, 15.12) == 3.0

    def test_vectorized_matches_scalar(self):
        model = AcuityModel()
        es = np.linspace(0, 40, 41)
        vec = blur_sigma_px(es, model, 15.12)
        scl = [blur_sigma_px(float(e), model, 15.12) for e in es]
        np.testing.assert_allclose(vec, scl, rtol=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(e1=st.floats(0, 80), e2=st.floats(0, 80))
    def test_monotone_nondecreasing(self, e1, e2):
        model = AcuityModel()
        lo, hi = sorted((e1, e2))
        assert blur_sigma_px(lo, model, 15.12) <= \
            blur_sigma_px(hi, model, 15.12)

    def test_zero_iff_zero_eccentricity(self):
        model = AcuityModel()
        assert blur_sigma_px(1e-9, model, 15.12) > 0.0

    @pytest.mark.parametrize("kwargs", [
        {"mar0": 0.0}, {"e2": 0.0}, {"sigma_cap": -1.0}])
    def test_model_positivity(self, kwargs):
        with pytest.raises(ValueError):
            AcuityModel(**kwargs)


class TestFieldToPixel:
    def test_fixation_maps_to_fixation_pixel(self):
        emap = eccentricity_map(101, 101, FieldConfig())
        px, py = field_to_pixel(emap, 0.0, 0.0)
        assert (px, py) == (50.0, 50.0)

    def test_roundtrip_through_eccentricity(self):
        emap = eccentricity_map(201, 201, FieldConfig())
        px, py = field_to_pixel(emap, 5.0, 0.0)
        # The pixel 5 degrees to the right must have eccentricity 5.
        d = math.hypot(px - 100.0, py - 100.0)
        e = math.degrees(math.atan(d / emap.focal_px))
        assert e == pytest.approx(5.0, abs=1e-9)
