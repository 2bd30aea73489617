"""Frame pipeline: filter order, identity, timing reports, determinism."""

from __future__ import annotations

import json

import numpy as np
import pytest

from vsim.pipeline import DEFAULT_BUDGET_US, TimingReport, process_frame
from vsim.profile import (AcuitySettings, SimulationProfile, preset,
                          with_param)

from conftest import make_card


def identity_profile() -> SimulationProfile:
    return SimulationProfile(acuity=AcuitySettings(enabled=False))


class TestProcessFrame:
    def setup_method(self):
        self.frame = make_card(64, 48)

    def test_identity_profile_bit_exact(self):
        out, report = process_frame(self.frame, identity_profile())
        np.testing.assert_array_equal(out, self.frame)
        assert report.filters == ()

    def test_output_contract(self):
        out, report = process_frame(self.frame, preset(4), t=0.5)
        assert out.dtype == np.uint8
        assert out.shape == self.frame.shape
        assert isinstance(report, TimingReport)

    def test_filter_order_stage4(self):
        _, report = process_frame(self.frame, preset(4), t=0.5)
        assert [name for name, _ in report.filters] == [
            "cvd", "eccentric_blur", "global_blur", "haze", "clouding",
            "floaters", "patches"]

    def test_disabled_filters_absent(self):
        _, r0 = process_frame(self.frame, preset(0))
        assert [n for n, _ in r0.filters] == ["eccentric_blur"]
        _, r1 = process_frame(self.frame, preset(1))
        assert [n for n, _ in r1.filters] == ["eccentric_blur", "haze"]
        _, r2 = process_frame(self.frame, preset(2))
        assert [n for n, _ in r2.filters] == ["cvd", "eccentric_blur",
                                              "haze"]

    def test_severity_zero_runs_no_cvd(self):
        prof = with_param(preset(2), "cvd.severity", 0.0)
        _, report = process_frame(self.frame, prof)
        assert "cvd" not in [n for n, _ in report.filters]

    def test_deterministic_across_runs(self):
        a, _ = process_frame(self.frame, preset(4), t=0.75)
        b, _ = process_frame(self.frame, preset(4), t=0.75)
        np.testing.assert_array_equal(a, b)

    def test_time_moves_floaters(self):
        a, _ = process_frame(self.frame, preset(3), t=0.0)
        b, _ = process_frame(self.frame, preset(3), t=2.0)
        assert not np.array_equal(a, b)

    def test_input_frame_not_mutated(self):
        keep = self.frame.copy()
        process_frame(self.frame, preset(4), t=1.0)
        np.testing.assert_array_equal(self.frame, keep)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            process_frame(self.frame.astype(np.float32), preset(0))
        with pytest.raises(ValueError):
            process_frame(self.frame[..., 0], preset(0))

    def test_stage2_collapses_blue_yellow(self):
        # Blue/yellow card: channel distance shrinks under the tritan
        # deficit while an achromatic pair stays put.
        card = np.zeros((32, 32, 3), np.uint8)
        card[:, :16] = (255, 255, 0)
        card[:, 16:] = (0, 0, 255)
        prof = with_param(preset(2), "acuity.enabled", False)
        prof = with_param(prof, "haze.enabled", False)
        out, _ = process_frame(card, prof)
        din = np.linalg.norm(card[16, 0].astype(float)
                             - card[16, -1].astype(float))
        dout = np.linalg.norm(out[16, 0].astype(float)
                              - out[16, -1].astype(float))
        assert dout < din


class TestTimingReport:
    def test_totals_and_budget(self):
        _, report = process_frame(make_card(), preset(1))
        assert report.total_us >= sum(us for _, us in report.filters)
        assert report.budget_us == DEFAULT_BUDGET_US
        assert report.over_budget == (report.total_us > report.budget_us)

    def test_budget_override(self):
        _, report = process_frame(make_card(), preset(1), budget_us=1)
        assert report.budget_us == 1
        assert report.over_budget

    def test_to_dict_is_json_ready(self):
        _, report = process_frame(make_card(), preset(2), t=0.1)
        doc = json.loads(json.dumps(report.to_dict()))
        assert doc["width"] == 64 and doc["height"] == 48
        assert doc["budget_us"] == DEFAULT_BUDGET_US
        assert isinstance(doc["over_budget"], bool)
        names = [f["name"] for f in doc["filters"]]
        assert names == ["cvd", "eccentric_blur", "haze"]
        assert all(f["us"] >= 0 for f in doc["filters"])

    def test_report_frozen(self):
        _, report = process_frame(make_card(), preset(0))
        with pytest.raises(Exception):
            report.total_us = 0
