from .gaussian import LinearScorer, demo_batch, disjoint_transform, gen_gaussian_mixture
from .io import TRIAL_COLUMNS, read_trials_csv, write_report_json, write_trials_csv
from .protocols import (
    gen_general_trials,
    gen_sensitive_trials,
    general_trial,
    mixture_masses,
    replay_sensitive,
    sample_mixing,
    sensitive_trial,
    trial_seed,
)
from .types import (
    DISJOINT_OFFSET,
    MAX_REJECTIONS,
    BucketGap,
    GaussianDataset,
    GaussianMixtureSpec,
    ShiftTrial,
    TrialPoint,
    ValidationReport,
)
from .validate import curve_bound, validate

__all__ = [
    "DISJOINT_OFFSET",
    "MAX_REJECTIONS",
    "TRIAL_COLUMNS",
    "BucketGap",
    "GaussianDataset",
    "GaussianMixtureSpec",
    "LinearScorer",
    "ShiftTrial",
    "TrialPoint",
    "ValidationReport",
    "curve_bound",
    "demo_batch",
    "disjoint_transform",
    "gen_gaussian_mixture",
    "gen_general_trials",
    "gen_sensitive_trials",
    "general_trial",
    "mixture_masses",
    "read_trials_csv",
    "replay_sensitive",
    "sample_mixing",
    "sensitive_trial",
    "trial_seed",
    "validate",
    "write_report_json",
    "write_trials_csv",
]
