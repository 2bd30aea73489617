"""Simulation profiles: the complete parameterization of one condition.

A profile bundles viewing geometry, the acuity model and every filter's
parameters plus enable flags. The five stage presets are profiles; any
profile round-trips losslessly through the canonical JSON form
(documented in docs/profile-format.md, extension ``.vsim.json``).
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

from .color import DEFICIENCIES
from .filters import CloudingParams, HazeParams
from .geometry import AcuityModel, FieldConfig
from .validation import check_in_range

SCHEMA = "vsim-profile/1"


class ProfileParseError(ValueError):
    """The bytes are not well-formed JSON."""


class ProfileValidationError(ValueError):
    """A field violates its constraint; the message names the field."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ProfileWarning(UserWarning):
    """Lenient-mode report of ignored unknown fields."""


@dataclass(frozen=True)
class AcuitySettings(AcuityModel):
    """Acuity model plus the eccentric-blur enable flag."""

    enabled: bool = True


@dataclass(frozen=True)
class HazeSettings(HazeParams):
    enabled: bool = False


@dataclass(frozen=True)
class CloudingSettings(CloudingParams):
    enabled: bool = False


@dataclass(frozen=True)
class CvdConfig:
    """Color-vision-deficiency selection; severity 0 disables the filter."""

    deficiency: str = "tritan"
    severity: float = 0.0

    def __post_init__(self):
        if self.deficiency not in DEFICIENCIES:
            raise ValueError(
                f"deficiency must be one of {DEFICIENCIES}, "
                f"got {self.deficiency!r}")
        check_in_range(self.severity, 0.0, 1.0, "severity")


@dataclass(frozen=True)
class FloaterSettings:
    enabled: bool = False
    seed: int = 7
    count: int = 7
    bounds: float = 10.0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")
        check_in_range(self.bounds, 0.0, 90.0, "bounds", low_open=True)


@dataclass(frozen=True)
class PatchSettings:
    enabled: bool = False
    seed: int = 7
    count: int = 4
    coverage_target: float = 0.2

    def __post_init__(self):
        if self.count < 0:
            raise ValueError(f"count must be >= 0, got {self.count}")
        check_in_range(self.coverage_target, 0.0, 0.6, "coverage_target")


@dataclass(frozen=True)
class SimulationProfile:
    name: str = "custom"
    stage: int = 0
    field: FieldConfig = dc_field(default_factory=FieldConfig)
    acuity: AcuitySettings = dc_field(default_factory=AcuitySettings)
    cvd: CvdConfig = dc_field(default_factory=CvdConfig)
    haze: HazeSettings = dc_field(default_factory=HazeSettings)
    floaters: FloaterSettings = dc_field(default_factory=FloaterSettings)
    clouding: CloudingSettings = dc_field(default_factory=CloudingSettings)
    patches: PatchSettings = dc_field(default_factory=PatchSettings)
    global_blur_sigma: float = 0.0

    def __post_init__(self):
        if (not isinstance(self.stage, int) or isinstance(self.stage, bool)
                or not 0 <= self.stage <= 4):
            raise ValueError(f"stage must be within [0, 4], got {self.stage!r}")
        check_in_range(self.global_blur_sigma, 0.0, 1e6, "global_blur_sigma")


PRESET_DESCRIPTIONS = {
    0: "no retinopathy: eccentric blur only, normal peripheral acuity falloff",
    1: "mild NPDR with macular edema: central hazy spot over fixation",
    2: "moderate NPDR: adds a blue-yellow (tritan-type) color deficit",
    3: "severe NPDR: adds blood specks (floaters) and overall clouding",
    4: "PDR: adds dark scotoma patches, stronger contrast loss and blur",
}


@lru_cache(maxsize=8)
def preset(stage: int) -> SimulationProfile:
    """The cumulative stage presets, 0 (none) through 4 (proliferative).

    Each stage keeps the previous stages' effects and adds its own. The
    numeric choices are tunable defaults, not clinical measurements.
    """
    if not isinstance(stage, int) or isinstance(stage, bool) \
            or not 0 <= stage <= 4:
        raise ValueError(f"stage must be within [0, 4], got {stage!r}")
    p = SimulationProfile(name=f"stage{stage}", stage=stage)
    if stage >= 1:
        p = dataclasses.replace(p, haze=HazeSettings(enabled=True))
    if stage >= 2:
        p = dataclasses.replace(p, cvd=CvdConfig("tritan", 0.7))
    if stage >= 3:
        p = dataclasses.replace(
            p,
            floaters=FloaterSettings(enabled=True, seed=7, count=7),
            clouding=CloudingSettings(
                enabled=True, veil_strength=0.25, contrast_factor=0.9))
    if stage >= 4:
        p = dataclasses.replace(
            p,
            patches=PatchSettings(enabled=True, seed=7, count=4,
                                  coverage_target=0.2),
            clouding=CloudingSettings(
                enabled=True, veil_strength=0.25, contrast_factor=0.5),
            haze=HazeSettings(enabled=True, alpha_max=0.95),
            global_blur_sigma=1.5)
    return p


# --------------------------------------------------------------------------
# Serialization

_SECTIONS = {
    "field": FieldConfig,
    "acuity": AcuitySettings,
    "cvd": CvdConfig,
    "haze": HazeSettings,
    "floaters": FloaterSettings,
    "clouding": CloudingSettings,
    "patches": PatchSettings,
}
_TOP_ORDER = ("schema", "name", "stage", "field", "acuity", "cvd", "haze",
              "floaters", "clouding", "patches", "global_blur_sigma")
_TUPLE_FIELDS = {"fixation", "veil"}


def _to_plain(value):
    if isinstance(value, tuple):
        return list(value)
    return value


def save_profile(p: SimulationProfile) -> bytes:
    """Canonical bytes: fixed key order, repr floats, newline-terminated.

    Deterministic: equal profiles serialize to identical bytes, and
    load_profile(save_profile(p)) == p.
    """
    doc = {"schema": SCHEMA, "name": p.name, "stage": p.stage}
    for section, cls in _SECTIONS.items():
        block = getattr(p, section)
        doc[section] = {
            f.name: _to_plain(getattr(block, f.name))
            for f in dataclasses.fields(cls)
        }
    doc["global_blur_sigma"] = p.global_blur_sigma
    assert tuple(doc) == _TOP_ORDER
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _check_scalar(path: str, value, want: type):
    ok = {
        float: lambda v: isinstance(v, (int, float))
        and not isinstance(v, bool),
        int: lambda v: isinstance(v, int) and not isinstance(v, bool),
        bool: lambda v: isinstance(v, bool),
        str: lambda v: isinstance(v, str),
    }[want]
    if not ok(value):
        raise ProfileValidationError(
            f"{path} must be a {want.__name__}, got {value!r}", field=path)
    return want(value) if want in (float, int) else value


_FIELD_TYPES = {bool: bool, int: int, float: float, str: str}


def _build_section(section: str, cls, data: dict, strict: bool):
    if not isinstance(data, dict):
        raise ProfileValidationError(
            f"{section} must be an object, got {data!r}", field=section)
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        path = f"{section}.{key}"
        if key not in fields:
            if strict:
                raise ProfileValidationError(
                    f"unknown field {path}", field=path)
            warnings.warn(f"ignoring unknown field {path}", ProfileWarning,
                          stacklevel=3)
            continue
        if key in _TUPLE_FIELDS:
            if (not isinstance(value, list)
                    or not all(isinstance(v, (int, float))
                               and not isinstance(v, bool) for v in value)):
                raise ProfileValidationError(
                    f"{path} must be a list of numbers, got {value!r}",
                    field=path)
            kwargs[key] = tuple(float(v) for v in value)
        elif key == "seed":
            kwargs[key] = _check_scalar(path, value, int)
        else:
            want = _FIELD_TYPES.get(type(getattr(cls(), key)), float)
            kwargs[key] = _check_scalar(path, value, want)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        # Our validators start the message with the field name; recover
        # it so the error points at the dotted path, not just the section.
        first = str(exc).split(" ", 1)[0].split("[", 1)[0]
        field = f"{section}.{first}" if first in fields else section
        raise ProfileValidationError(f"{section}.{exc}",
                                     field=field) from exc


def load_profile(data: bytes | str, *, strict: bool = True) -> SimulationProfile:
    """Parse profile bytes; unknown fields are rejected (or warned about
    with strict=False). Raises ProfileParseError for malformed JSON and
    ProfileValidationError (naming the offending field) for bad values.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProfileParseError(f"malformed profile JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProfileValidationError("profile must be a JSON object")
    kwargs = {}
    for key, value in doc.items():
        if key == "schema":
            if value != SCHEMA:
                raise ProfileValidationError(
                    f"schema must be {SCHEMA!r}, got {value!r}", field="schema")
        elif key == "name":
            kwargs["name"] = _check_scalar("name", value, str)
        elif key == "stage":
            kwargs["stage"] = _check_scalar("stage", value, int)
        elif key == "global_blur_sigma":
            kwargs["global_blur_sigma"] = _check_scalar(key, value, float)
        elif key in _SECTIONS:
            kwargs[key] = _build_section(key, _SECTIONS[key], value, strict)
        elif strict:
            raise ProfileValidationError(f"unknown field {key}", field=key)
        else:
            warnings.warn(f"ignoring unknown field {key}", ProfileWarning,
                          stacklevel=2)
    try:
        return SimulationProfile(**kwargs)
    except ValueError as exc:
        raise ProfileValidationError(str(exc)) from exc


def profile_to_dict(p: SimulationProfile) -> dict:
    """The canonical JSON document as a Python dict (see save_profile)."""
    return json.loads(save_profile(p).decode("utf-8"))


# --------------------------------------------------------------------------
# Live patching (service control messages, CLI overrides)


def with_param(p: SimulationProfile, path: str, value) -> SimulationProfile:
    """Return a copy of the profile with one dotted-path field replaced.

    Example: with_param(p, "cvd.severity", 0.4). Raises
    ProfileValidationError naming the path if the field does not exist
    or the value violates its constraint.
    """
    section, _, name = path.partition(".")
    if isinstance(value, list):
        value = tuple(value)
    try:
        if not name:
            if section not in ("name", "stage", "global_blur_sigma"):
                raise ProfileValidationError(
                    f"unknown field {path}", field=path)
            return dataclasses.replace(p, **{section: value})
        if section not in _SECTIONS:
            raise ProfileValidationError(f"unknown field {path}", field=path)
        block = getattr(p, section)
        if name not in {f.name for f in dataclasses.fields(block)}:
            raise ProfileValidationError(f"unknown field {path}", field=path)
        new_block = dataclasses.replace(block, **{name: value})
        return dataclasses.replace(p, **{section: new_block})
    except ProfileValidationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ProfileValidationError(f"{path}: {exc}", field=path) from exc


def with_stage(p: SimulationProfile, stage: int) -> SimulationProfile:
    """Swap in preset(stage) while preserving the current fixation."""
    new = preset(stage)
    field = dataclasses.replace(new.field, fixation=p.field.fixation)
    return dataclasses.replace(new, field=field)
