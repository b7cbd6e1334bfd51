"""Landmark-based shape comparison: registration, thin-plate splines,
polynomial trends, and grid diagnostics."""

from ._morphogrid import (
    MorphoError,
    PolynomialTrend,
    TpsModel,
    affine_fit,
    bilinear_map,
    gpa_mean,
    homography,
    load_dataset,
    procrustes_align,
    remove_affine,
    run_cli,
    segment_rotations,
    synthetic_vilmann,
    tps_fit,
    trend_fit,
    two_point_register,
)

__all__ = [
    "MorphoError",
    "PolynomialTrend",
    "TpsModel",
    "affine_fit",
    "bilinear_map",
    "gpa_mean",
    "homography",
    "load_dataset",
    "procrustes_align",
    "remove_affine",
    "run_cli",
    "segment_rotations",
    "synthetic_vilmann",
    "tps_fit",
    "trend_fit",
    "two_point_register",
]
