"""Event-aware sensor fault detection: detectors, fault injection and metrics."""

import json

from ._sensorfault import (
    BandSide,
    DetectionResult,
    Deployment,
    EventWindow,
    FlaggedWindow,
    FlagSource,
    GroundTruthLabels,
    InjectionOutcome,
    InjectionPlan,
    LlseFit,
    Modality,
    NoiseBurst,
    NoiseModel,
    SensorFaultError,
    Series,
    event_sample_indices,
    inject_noise,
    inject_short,
    llse_fit,
    median_filter,
    mu_duration,
    mu_samples,
    noise_detect,
    noise_train,
    short_detect,
    smooth_pairs,
)
from . import _sensorfault

__all__ = [
    "BandSide",
    "DetectionResult",
    "Deployment",
    "EventWindow",
    "FlaggedWindow",
    "FlagSource",
    "GroundTruthLabels",
    "InjectionOutcome",
    "InjectionPlan",
    "LlseFit",
    "Modality",
    "NoiseBurst",
    "NoiseModel",
    "SensorFaultError",
    "Series",
    "event_sample_indices",
    "inject_noise",
    "inject_short",
    "llse_fit",
    "median_filter",
    "mu_duration",
    "mu_samples",
    "noise_detect",
    "noise_train",
    "run_sweep",
    "short_detect",
    "smooth_pairs",
    "synthesize",
]


def synthesize(config=None):
    """Generate the synthetic deployment described by a sweep config dict."""
    return _sensorfault._synthesize(json.dumps(config or {}))


def run_sweep(config=None):
    """Run a parameter sweep; returns (csv_text, report_dict)."""
    csv_text, report = _sensorfault._sweep(json.dumps(config or {}))
    return csv_text, json.loads(report)
