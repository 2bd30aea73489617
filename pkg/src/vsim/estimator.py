"""Scikit-learn style facade over the simulation pipeline.

RetinopathySimulator is a stateless-in-the-sklearn-sense transformer:
fit() resolves the configured parameters into a concrete profile
(``profile_``), transform() runs frames through the pipeline. It plugs
into sklearn Pipelines for batch screenshot studies and supports
get_params/set_params/clone like any estimator.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .pipeline import process_frame
from .profile import SimulationProfile, preset, with_param


class RetinopathySimulator(BaseEstimator, TransformerMixin):
    """Degrade frames the way a retinopathy patient at ``stage`` sees them.

    Parameters
    ----------
    stage : int, default=2
        Preset stage 0..4; ignored when ``profile`` is given.
    profile : SimulationProfile, optional
        Full profile; overrides ``stage``.
    severity : float, optional
        Override cvd.severity in [0, 1].
    fixation : tuple of (float, float), optional
        Override the normalized fixation point.
    fov_h : float, optional
        Override the horizontal field of view, degrees.
    floater_seed, patch_seed : int, optional
        Override the procedural-content seeds.
    time : float, default=0.0
        Simulation time in seconds (drives floater drift).

    Attributes
    ----------
    profile_ : SimulationProfile
        The resolved profile after fit().

    Examples
    --------
    >>> sim = RetinopathySimulator(stage=2, severity=0.5).fit()
    >>> out = sim.transform(frame)          # (H, W, 3) uint8
    >>> batch_out = sim.transform(frames)   # (N, H, W, 3) uint8
    """

    def __init__(self, stage: int = 2, profile: SimulationProfile | None = None,
                 severity: float | None = None,
                 fixation: tuple[float, float] | None = None,
                 fov_h: float | None = None, floater_seed: int | None = None,
                 patch_seed: int | None = None, time: float = 0.0):
        self.stage = stage
        self.profile = profile
        self.severity = severity
        self.fixation = fixation
        self.fov_h = fov_h
        self.floater_seed = floater_seed
        self.patch_seed = patch_seed
        self.time = time

    def fit(self, X=None, y=None):
        """Resolve parameters into ``profile_``. X and y are ignored."""
        p = self.profile if self.profile is not None else preset(self.stage)
        if self.severity is not None:
            p = with_param(p, "cvd.severity", self.severity)
        if self.fixation is not None:
            p = with_param(p, "field.fixation", tuple(self.fixation))
        if self.fov_h is not None:
            p = with_param(p, "field.fov_h", self.fov_h)
        if self.floater_seed is not None:
            p = with_param(p, "floaters.seed", int(self.floater_seed))
        if self.patch_seed is not None:
            p = with_param(p, "patches.seed", int(self.patch_seed))
        self.profile_ = p
        return self

    def transform(self, X) -> np.ndarray:
        """Simulate one (H, W, 3) frame or a (N, H, W, 3) batch of uint8."""
        if not hasattr(self, "profile_"):
            raise NotFittedError(
                "This RetinopathySimulator instance is not fitted yet; "
                "call fit() before transform().")
        X = np.asarray(X)
        if X.ndim == 3:
            out, _ = process_frame(X, self.profile_, t=self.time)
            return out
        if X.ndim == 4:
            return np.stack([
                process_frame(f, self.profile_, t=self.time)[0] for f in X])
        raise ValueError(
            f"X must have shape (H, W, 3) or (N, H, W, 3), got {X.shape}")

    def transform_with_timing(self, X):
        """Like transform() on a single frame, also returning the report."""
        if not hasattr(self, "profile_"):
            raise NotFittedError(
                "This RetinopathySimulator instance is not fitted yet; "
                "call fit() before transform_with_timing().")
        return process_frame(np.asarray(X), self.profile_, t=self.time)

    def _more_tags(self):
        return {"X_types": ["3darray"], "non_deterministic": False}

    def __sklearn_is_fitted__(self):
        return hasattr(self, "profile_")
