"""Whispering-gallery mode laboratory for wave dispersion near a convex boundary.

The package evaluates the explicit gallery-mode solution of the model wave
equation on a half-space with a linearly tilted metric, and measures its
dispersive sup-norm decay, caustic returns, and mixed space-time norm
scalings against the predicted bounds.
"""

from .airy import (
    AiryZeroTable,
    GaussianBump,
    SmoothBump,
    airy_ai,
    airy_ai_prime,
    airy_poisson_pair,
    airy_zero,
    airy_zero_table,
    ai_square_tail,
    phase_L,
    phase_L_prime,
)
from .modes import GalleryMode, ModelMetric, dirac_partial_sum, eigenvalue, mode_eval, q_eval
from .green import (
    AccuracyError,
    CutoffSpec,
    FieldSlice,
    SemiclassicalConfig,
    field_slab,
    green_evaluate,
    mode_truncation,
    single_mode_wave,
)
from .dispersion import (
    CausticSchedule,
    DispersionEnvelope,
    caustic_times,
    detect_peaks,
    dispersion_bound,
    exponent_fit,
    gamma_bound,
    gamma_refined,
    sup_norm_envelope,
)
from .strichartz import (
    KernelSplit,
    StrichartzPair,
    admissible_check,
    kernel_split,
    mixed_norm,
    split_bounds_check,
    strichartz_exponents,
)

__version__ = "0.1.0"
