"""Multi-sequence change-point detection with sparsity-likelihood scores."""

from .calibrate import (
    CalibrationCurve,
    calibrate_null,
    find_critical,
    markov_envelope,
    max_screen_score,
    write_curve,
)
from .models import (
    DataPanel,
    DegenerateRowError,
    SegmentTriple,
    TripleRng,
    binomial_twosided_pvalue,
    conditional_binomial_pvalue,
    mad_normalize,
    normal_pvalue,
    poisson_pvalue,
    segment_mean,
)
from .score import (
    ScoreParams,
    bj_score,
    component_f1,
    component_f2,
    hc_score,
    penalized_score,
    sl_score,
    sl_term,
)
from .segment import (
    ChangePoint,
    ChangePointReport,
    SegmentationResult,
    SLConfig,
    single_changepoint,
    sl_detect,
    sl_estimate,
)
from .simulate import (
    MultiChangeScenario,
    PoissonScenario,
    SingleChangeScenario,
    ari,
    gen_multi_change,
    gen_poisson_change,
    gen_single_change,
    hit_rate,
    segment_labels,
)
from .theory import (
    BoundaryParams,
    boundary_constants,
    d_omega,
    g_omega,
    poisson_info,
    rho_poisson,
    rho_z,
    rho_z_segment,
)
from .windows import (
    WindowSchedule,
    approx_set,
    asymptotic_schedule,
    default_lambda2,
    default_schedule,
)

__version__ = "0.1.0"
