"""Certified evaluation of normalized Bessel functions and Huygens-type ratios.

Every numerical routine returns an :class:`Enclosure`, a value paired with a
rigorous absolute error bound, so that the certification layer can tell a
genuine violation from floating point noise.
"""

__version__ = "0.1.0"

from .certify import (
    DEFAULT_NU_GRID,
    CertReport,
    Violation,
    certify_family,
    certify_identities,
    certify_monotone,
    merge_reports,
    render_report,
    scan_conjecture,
    write_report,
)
from .core import (
    DEFAULT_CONFIG,
    Enclosure,
    Order,
    SeriesConfig,
    deficit_J,
    deriv_Inorm,
    deriv_Jnorm,
    eval_Inorm,
    eval_Inorm_scaled,
    eval_Jnorm,
    excess_I,
    excess_I_scaled,
    gap_I,
)
from .errors import CancellationError, DomainError, NoSignChange, ToleranceNotReached
from .gamma import log_gamma
from .ratios import (
    Family,
    PointCheck,
    SharpConstants,
    aux_L,
    check_point,
    coeff_C,
    coeff_C_log_gap,
    coeff_c,
    mittag_leffler_residual,
    p_polynomial,
    ratio_F,
    ratio_G,
    ratio_H,
    ratio_H_complement,
    ratio_Phi,
    sharp_constants,
    turan_J,
)
from .zeros import ZeroTable, eval_Jnorm_product, first_zero, rayleigh_residual, zeros

__all__ = [name for name in dir() if not name.startswith("_")]
