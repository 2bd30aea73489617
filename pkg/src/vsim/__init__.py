"""vsim: a real-time vision simulator for diabetic retinopathy.

Degrades images and video streams the way a person at a given stage of
diabetic retinopathy would see them: peripheral (eccentric) blur, central
haze, blue-yellow color deficit, vitreous floaters, clouding and scotoma
patches. Ships as a library, a CLI (``vsim``) and a streaming service.
"""

__version__ = "0.1.0"

_LAZY = {
    "RetinopathySimulator": "vsim.estimator",
    "process_frame": "vsim.pipeline",
    "TimingReport": "vsim.pipeline",
    "preset": "vsim.profile",
    "load_profile": "vsim.profile",
    "save_profile": "vsim.profile",
    "SimulationProfile": "vsim.profile",
    "srgb_to_linear": "vsim.color",
    "linear_to_srgb": "vsim.color",
    "cvd_matrix": "vsim.color",
    "apply_cvd": "vsim.color",
}

__all__ = sorted(_LAZY) + ["__version__"]


def __getattr__(name):
    # Defer heavy imports (cv2, numba, sklearn) until actually used.
    module = _LAZY.get(name)
    if module is None:
        raise AttributeError(f"module 'vsim' has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(module), name)
