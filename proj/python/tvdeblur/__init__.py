"""Total-variation deblurring with reflective, anti-reflective and
reblurring transform preconditioners."""

from ._tvdeblur import (
    ConfigurationError,
    InvalidArgument,
    NumericalError,
    Psf,
    RestorationReport,
    ar_project,
    benchmark_1d,
    benchmark_2d,
    blur_apply,
    blur_eigenvalues,
    blur_matrix,
    cosine_project,
    gaussian_psf,
    out_of_focus_psf,
    restore,
    rre,
    set_quiet,
    sine_project,
    sinehat_project,
    transform,
)

__all__ = [
    "ConfigurationError",
    "InvalidArgument",
    "NumericalError",
    "Psf",
    "RestorationReport",
    "ar_project",
    "benchmark_1d",
    "benchmark_2d",
    "blur_apply",
    "blur_eigenvalues",
    "blur_matrix",
    "cosine_project",
    "gaussian_psf",
    "out_of_focus_psf",
    "restore",
    "rre",
    "set_quiet",
    "sine_project",
    "sinehat_project",
    "transform",
]
