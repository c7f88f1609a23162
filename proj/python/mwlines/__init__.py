"""Manhattan-world line depth observers."""

from ._core import (
    AggregateReport,
    MwlError,
    TrialConfig,
    TrialRecord,
    __version__,
    cayley_from_rotation,
    depth_error,
    direction_error,
    line_from_point_direction,
    mw_Q,
    mw_T,
    mw_X,
    preset,
    preset_names,
    project_moment,
    random_scene,
    reconstruct_moment,
    rotation_from_cayley,
    run_monte_carlo,
    run_noise_sweep,
    run_trial,
    trials_csv,
)

__all__ = [
    "AggregateReport",
    "MwlError",
    "TrialConfig",
    "TrialRecord",
    "__version__",
    "cayley_from_rotation",
    "depth_error",
    "direction_error",
    "line_from_point_direction",
    "mw_Q",
    "mw_T",
    "mw_X",
    "preset",
    "preset_names",
    "project_moment",
    "random_scene",
    "reconstruct_moment",
    "rotation_from_cayley",
    "run_monte_carlo",
    "run_noise_sweep",
    "run_trial",
    "trials_csv",
]
