"""Measures induced by finite measurement systems and their fractal scales."""

__version__ = "0.1.0"

from .cylinder_measure import (  # noqa: E402
    NAdicInterval,
    TrajectorySampler,
    Word,
    cantor_self_similarity_residual,
    consistency_residual,
    log_scalar_measure,
    operator_measure,
    partition_identity_residual,
    sample_trajectory,
    scalar_measure,
    word_to_interval,
)
from .dominant_eigen import (  # noqa: E402
    DominantTriple,
    filter_principal_vector,
    power_limit_error,
    principal_right_vector,
    rate_envelope_check,
)
from .filter_bank import (  # noqa: E402
    FilterBank,
    beta_diagnostics,
    ell2_adjoint_apply,
    ell2_apply,
    highpass_taps,
    slanted_matrix,
    taps_from_beta,
    validate_taps,
)
from .fractal_scale import (  # noqa: E402
    check_two_sided_hypotheses,
    empirical_scale_profile,
    ifs_dimension,
    theoretical_scale,
    lower_scale_ratios,
    two_sided_limit_check,
)
from .measurement_system import (  # noqa: E402
    MeasurementSystem,
    builtin_system,
    column_isometry_residual,
    cuntz_residual,
    from_filter_bank,
)
from .wavelet_functions import cascade_phi, orthonormality_and_moments, packet, wavelet_psi  # noqa: E402
