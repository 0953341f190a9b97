"""Value of information for remotely sampled Ornstein-Uhlenbeck sources.

Quantifies, in nats, how much a window of noisy past samples tells you about
the current state of a mean-reverting Gaussian source, with exact closed
forms, high/low-SNR approximations, and the worst-case VoI distribution of
an FCFS M/M/1 status-update link.
"""

from .approx import (
    ApproxResult,
    turning_noise_var_poisson,
    turning_noise_var_uniform,
    voi_high_snr_poisson,
    voi_high_snr_uniform,
    voi_low_snr_uniform,
)
from .gauss_markov import OuParams, conditional_moments, covariance, sample_path, stationary_moments
from .montecarlo import (
    DataTable,
    ExperimentSpec,
    FIGURE_DEFAULTS,
    empirical_gaussian_mi,
    ks_distance,
    run_experiment,
    sample_windows,
)
from .queue_mm1 import (
    Mm1Params,
    fcfs_receptions,
    interval_system_pdf,
    peak_age_at_voi,
    peak_age_pdf,
    peak_age_sf,
    sample_worst_case,
    simulate_fcfs,
    voi_at_peak_age,
    voi_support_max,
    worst_case_cdf,
    worst_case_pdf,
)
from .tridiag import (
    DetPair,
    SymTridiag,
    correction_matrix,
    det_pair_recurrence,
    det_pair_uniform_closed,
    det_ratio,
    minor_series_coeffs,
    poisson_inverse_cov,
    uniform_inverse_cov,
)
from .voi_exact import (
    NOISELESS,
    NonPositiveDefiniteError,
    SingularCovarianceError,
    assemble_covariances,
    correction,
    gaussian_mi_oracle,
    markov_voi,
    snr_ratio,
    voi_closed_form,
    voi_single_obs,
)
from .window import (
    NoiseModel,
    ObservationWindow,
    Timeline,
    age_of_information,
    observe,
    poisson_timeline,
    timeline_from_csv,
    timeline_to_csv,
    uniform_timeline,
    window_at,
)

__version__ = "0.1.0"
