from .butterworth import (
    ButterworthSpec,
    FilterType,
    InitMode,
    butterworth_filter,
    design_sos,
    frequency_response,
    sos_to_ba,
    sosfilt,
    steady_state_zi,
)
from .iir import (
    TrendStdParams,
    iir_first_order,
    individual_norm_deviation,
    std_estimate,
    trend_estimate,
)
from .morlet import MorletSpec, morlet_filter, morlet_kernel

__all__ = [
    "ButterworthSpec", "FilterType", "InitMode", "butterworth_filter", "design_sos",
    "frequency_response", "sos_to_ba", "sosfilt", "steady_state_zi",
    "TrendStdParams", "iir_first_order", "individual_norm_deviation", "std_estimate",
    "trend_estimate", "MorletSpec", "morlet_filter", "morlet_kernel",
]
