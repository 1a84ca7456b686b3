"""Conformal multi-source detection on networks (Python bindings)."""

from ._core import (
    ConformalModel,
    Graph,
    Sample,
    ValidationError,
    __version__,
    calibrate,
    check_equivalences,
    cli,
    cqioc_bruteforce,
    crc_predict,
    estimate,
    estimate_heuristic,
    evaluate_set,
    finite_sample_quantile,
    gamma,
    make_graph,
    run_experiment,
    score,
    shrink,
    simulate_dataset,
    spectral_radius,
)

__all__ = [
    "ConformalModel",
    "Graph",
    "Sample",
    "ValidationError",
    "__version__",
    "calibrate",
    "check_equivalences",
    "cli",
    "cqioc_bruteforce",
    "crc_predict",
    "estimate",
    "estimate_heuristic",
    "evaluate_set",
    "finite_sample_quantile",
    "gamma",
    "make_graph",
    "run_experiment",
    "score",
    "shrink",
    "simulate_dataset",
    "spectral_radius",
]
