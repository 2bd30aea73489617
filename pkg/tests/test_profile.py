"""Profile documents: presets, canonical serialization, validation."""

from __future__ import annotations

import dataclasses
import json
import os

import pytest

from vsim.profile import (PRESET_DESCRIPTIONS, SCHEMA, AcuitySettings,
                          CloudingSettings, CvdConfig, FloaterSettings,
                          HazeSettings, PatchSettings, ProfileParseError,
                          ProfileValidationError, ProfileWarning,
                          SimulationProfile, load_profile, preset,
                          profile_to_dict, save_profile, with_param,
                          with_stage)


class TestPresets:
    def test_stage0_blur_only(self):
        p = preset(0)
        assert p.stage == 0
        assert p.acuity.enabled
        assert not p.haze.enabled
        assert p.cvd.severity == 0.0
        assert not p.floaters.enabled
        assert not p.clouding.enabled
        assert not p.patches.enabled
        assert p.global_blur_sigma == 0.0

    def test_stages_are_cumulative(self):
        assert preset(1).haze.enabled
        assert preset(2).haze.enabled
        assert preset(2).cvd == CvdConfig("tritan", 0.7)
        p3 = preset(3)
        assert p3.cvd.severity == 0.7 and p3.haze.enabled
        assert p3.floaters.enabled and p3.clouding.enabled
        assert not p3.patches.enabled
        p4 = preset(4)
        assert p4.floaters.enabled and p4.patches.enabled
        assert p4.global_blur_sigma > 0
        assert p4.clouding.contrast_factor < p3.clouding.contrast_factor

    def test_preset_names_and_descriptions(self):
        for stage in range(5):
            assert preset(stage).name == f"stage{stage}"
            assert PRESET_DESCRIPTIONS[stage]

    @pytest.mark.parametrize("bad", [-1, 5, 2.0, True, "2"])
    def test_invalid_stage(self, bad):
        with pytest.raises(ValueError):
            preset(bad)

    def test_preset_cached(self):
        assert preset(3) is preset(3)


class TestSerialization:
    def test_roundtrip_all_presets(self):
        for stage in range(5):
            p = preset(stage)
            assert load_profile(save_profile(p)) == p

    def test_canonical_bytes_stable(self):
        a = save_profile(preset(2))
        b = save_profile(load_profile(a))
        assert a == b

    def test_document_shape(self):
        doc = profile_to_dict(preset(1))
        assert doc["schema"] == SCHEMA
        assert list(doc)[:3] == ["schema", "name", "stage"]
        assert doc["haze"]["enabled"] is True
        assert doc["field"]["fixation"] == [0.5, 0.5]

    def test_golden_preset_files(self, profiles_dir):
        for stage in range(5):
            path = os.path.join(profiles_dir, f"stage{stage}.vsim.json")
            with open(path, "rb") as fh:
                blob = fh.read()
            assert blob == save_profile(preset(stage))
            assert load_profile(blob) == preset(stage)

    def test_save_ends_with_newline(self):
        assert save_profile(preset(0)).endswith(b"\n")

    def test_accepts_str_and_bytes(self):
        blob = save_profile(preset(1))
        assert load_profile(blob) == load_profile(blob.decode())


class TestLoadValidation:
    def test_malformed_json(self):
        with pytest.raises(ProfileParseError, match="malformed"):
            load_profile(b"{not json")

    def test_non_object(self):
        with pytest.raises(ProfileValidationError):
            load_profile(b"[1, 2]")

    def test_wrong_schema(self):
        doc = profile_to_dict(preset(0))
        doc["schema"] = "vsim-profile/999"
        with pytest.raises(ProfileValidationError, match="schema"):
            load_profile(json.dumps(doc))

    def test_unknown_top_level_field_strict(self):
        doc = profile_to_dict(preset(0))
        doc["sharpen"] = 2
        with pytest.raises(ProfileValidationError, match="sharpen"):
            load_profile(json.dumps(doc))

    def test_unknown_top_level_field_lenient_warns(self):
        doc = profile_to_dict(preset(0))
        doc["sharpen"] = 2
        with pytest.warns(ProfileWarning, match="sharpen"):
            p = load_profile(json.dumps(doc), strict=False)
        assert p == preset(0)

    def test_unknown_section_field(self):
        doc = profile_to_dict(preset(0))
        doc["cvd"]["protanomaly"] = 1
        with pytest.raises(ProfileValidationError) as err:
            load_profile(json.dumps(doc))
        assert "cvd.protanomaly" in str(err.value)

    def test_out_of_range_names_dotted_field(self):
        doc = profile_to_dict(preset(0))
        doc["cvd"]["severity"] = 2.0
        with pytest.raises(ProfileValidationError) as err:
            load_profile(json.dumps(doc))
        assert "cvd.severity" in str(err.value)
        assert err.value.field == "cvd.severity"

    def test_wrong_type_rejected(self):
        doc = profile_to_dict(preset(0))
        doc["stage"] = "two"
        with pytest.raises(ProfileValidationError, match="stage"):
            load_profile(json.dumps(doc))

    def test_bool_is_not_a_number(self):
        doc = profile_to_dict(preset(0))
        doc["global_blur_sigma"] = True
        with pytest.raises(ProfileValidationError):
            load_profile(json.dumps(doc))

    def test_fixation_length_checked(self):
        doc = profile_to_dict(preset(0))
        doc["field"]["fixation"] = [0.5, 0.5, 0.5]
        with pytest.raises(ProfileValidationError, match="fixation"):
            load_profile(json.dumps(doc))

    def test_partial_document_uses_defaults(self):
        p = load_profile(json.dumps({"schema": SCHEMA, "stage": 1}))
        assert p.stage == 1
        assert p.field == preset(0).field
        assert p.name == "custom"

    def test_session_state_unchanged_on_error(self):
        # Loading never mutates shared preset instances.
        before = preset(2)
        doc = profile_to_dict(preset(2))
        doc["cvd"]["severity"] = 9
        with pytest.raises(ProfileValidationError):
            load_profile(json.dumps(doc))
        assert preset(2) == before


class TestWithParam:
    def test_replace_nested_field(self):
        p = with_param(preset(2), "cvd.severity", 0.4)
        assert p.cvd.severity == 0.4
        assert preset(2).cvd.severity == 0.7

    def test_replace_top_level(self):
        p = with_param(preset(0), "global_blur_sigma", 2.5)
        assert p.global_blur_sigma == 2.5

    def test_replace_fixation_accepts_list(self):
        p = with_param(preset(0), "field.fixation", [0.25, 0.75])
        assert p.field.fixation == (0.25, 0.75)

    def test_unknown_path(self):
        with pytest.raises(ProfileValidationError) as err:
            with_param(preset(0), "nosuch.field", 1)
        assert err.value.field == "nosuch.field"

    def test_unknown_leaf(self):
        with pytest.raises(ProfileValidationError):
            with_param(preset(0), "cvd.sharpness", 1)

    def test_invalid_value_names_path(self):
        with pytest.raises(ProfileValidationError) as err:
            with_param(preset(0), "cvd.severity", 2.0)
        assert err.value.field == "cvd.severity"

    def test_original_untouched(self):
        p0 = preset(0)
        with_param(p0, "haze.enabled", True)
        assert not p0.haze.enabled


class TestWithStage:
    def test_swaps_preset_keeps_fixation(self):
        p = with_param(preset(0), "field.fixation", (0.2, 0.8))
        q = with_stage(p, 3)
        assert q.stage == 3
        assert q.floaters.enabled
        assert q.field.fixation == (0.2, 0.8)

    def test_other_settings_reset(self):
        p = with_param(preset(4), "cvd.severity", 0.1)
        q = with_stage(p, 4)
        assert q.cvd.severity == 0.7


class TestSettingsSections:
    def test_acuity_settings_extend_model(self):
        s = AcuitySettings()
        assert s.enabled is True
        assert s.mar0 == 1.0 and s.e2 == 2.0 and s.sigma_cap == 12.0

    def test_sections_frozen(self):
        with pytest.raises(dataclasses.FrozenInstanceError):
            preset(0).haze.enabled = True

    def test_cvd_config_validation(self):
        with pytest.raises(ValueError):
            CvdConfig("bluish", 0.5)
        with pytest.raises(ValueError):
            CvdConfig("tritan", 1.5)

    def test_floater_settings_validation(self):
        with pytest.raises(ValueError):
            FloaterSettings(count=-1)
        with pytest.raises(ValueError):
            FloaterSettings(bounds=0.0)

    def test_patch_settings_validation(self):
        with pytest.raises(ValueError):
            PatchSettings(coverage_target=0.9)

    def test_profile_stage_bounds(self):
        with pytest.raises(ValueError):
            SimulationProfile(stage=7)
        with pytest.raises(ValueError):
            SimulationProfile(stage=True)

    def test_clouding_haze_settings_inherit_validation(self):
        with pytest.raises(ValueError):
            HazeSettings(alpha_max=2.0)
        with pytest.raises(ValueError):
            CloudingSettings(contrast_factor=-0.5)
