"""Holomorphic functional calculus for pseudo-differential operators on the
flat torus T^n (n = 1, 2): quantization, parameter-parametrix construction,
contour-integral evaluation of f(A), and trace applications, all
cross-validated against a dense spectral oracle.
"""

from .grid import (
    GridField,
    TorusGrid,
    bessel_multiplier,
    dft_forward,
    dft_inverse,
    finite_difference_eta,
    param_bessel_multiplier,
    spectral_derivative_x,
)
from .symbols import (
    EllipticityReport,
    SectorSpec,
    SymbolClassSpec,
    SymbolField,
    builtin_family,
    hypoellipticity_check,
    parameter_ellipticity_check,
    positive_real_check,
    random_trig_symbol,
    seminorm_estimate,
)
from .quantize import (
    OperatorMatrix,
    apply_tau0,
    op_tau0,
    op_tau1,
    operator_norm,
    sobolev_operator_norm,
    symbol_of_matrix,
)
from .laurent import (
    ResolventPolynomial,
    cauchy_apply,
    compose_truncated,
    compose_with_base,
    deriv_eta,
    deriv_lambda,
    deriv_x,
    eval_at,
    from_resolvent,
    multiply,
)
from .calculus import (
    ParametrixExpansion,
    build_parametrix,
    compose_symbols,
    composition_remainder_norm,
    fit_loglog_slope,
    parametrix_symbol_estimates,
    ray_minimal_growth_check,
    residual_decay_sweep,
)
from .contour import ContourSpec, QuadratureSpec, nodes_and_weights, truncation_bound
from .funcalc import (
    HoloFunction,
    complex_power,
    exp_scaled,
    f_of_A_contour,
    f_of_A_spectral,
    f_of_symbol_expansion,
    heat_operator,
    log_fn,
    log_operator,
    power,
    power_group_check,
    rational,
)
from .traces import (
    TraceReport,
    heat_trace_sweep,
    kernel_diagonal,
    szego_logdet,
    trace_symbol,
    zeta_value,
)

__version__ = "0.1.0"
