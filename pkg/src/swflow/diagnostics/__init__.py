from .blowup import curvature_ball_profile, curvature_scaling_profile, rescale_blowup
from .detector import (
    BALL_RTOL,
    DetectorConfig,
    DetectorReport,
    Detection,
    cover_is_valid,
    detect_singular_set,
    detector_density,
    local_energy,
    local_energy_map,
    torus_distance,
    vitali_cover,
)
from .energy import EnergyRecord, MaxPrincipleResult, energy_report, max_principle_check
from .monotonicity import (
    MonotonicityTable,
    DEFAULT_A_GRID,
    Probe,
    cutoff_value,
    fit_monotonicity_constants,
    heat_kernel,
    heat_kernel_r2,
    monotonicity_quantities,
    monotonicity_scan,
)
