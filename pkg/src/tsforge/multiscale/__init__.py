"""Dataset-fitted models: PCA, membership functions, norm curves, and the
wavelet band split."""

from .membership import (
    DiscretizationMode,
    MembershipDesign,
    MembershipModel,
    discretization_frequencies,
    discretize_series,
    fit_membership,
    kmeans_1d,
    membership_eval,
)
from .norm import NormDeviationSeriesKind, NormModel, fit_norm, norm_deviation_series
from .pca import PcaModel, fit_pca, jacobi_eigh, pca_transform_channels
from .wavelets import BoundaryMode, WaveletFamily, WaveletSpec, wavedec, wavedec_bands

__all__ = [
    "DiscretizationMode", "MembershipDesign", "MembershipModel", "discretization_frequencies",
    "discretize_series", "fit_membership", "kmeans_1d", "membership_eval",
    "NormDeviationSeriesKind", "NormModel", "fit_norm", "norm_deviation_series",
    "PcaModel", "fit_pca", "jacobi_eigh", "pca_transform_channels",
    "BoundaryMode", "WaveletFamily", "WaveletSpec", "wavedec", "wavedec_bands",
]
