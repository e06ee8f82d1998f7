"""Separation of variables for the periodic Toda chain.

Classical monodromy and SoV coordinates, spectral-curve cycle integrals
and action variables, integrated flows, Baxter Q-functions for the
quantized chain, and the determinant representation of matrix elements
between close states, with numerical checks for the algebraic identities
underlying each step.
"""

from .baxter import (
    MAX_LEVELS,
    AsymptoticsReport,
    EigenPair,
    QFunction,
    asymptotics_check,
    baxter_residual,
    bs_quantize,
    build_q,
    eigen_to_t,
    solve_relative_spectrum,
)
from .characters import (
    GradedCharacter,
    character_binomial,
    character_product,
    character_resolution,
    qfactorial,
)
from .dynamics import (
    AbelMap,
    AbelReport,
    PdeResidualReport,
    Trajectory,
    abel_linearization,
    em_residual,
    flow_endpoint,
    fourier_coefficient,
    hamiltonian_flow,
    pde_residual,
)
from .errors import (
    BracketFailure,
    ConvergenceFailure,
    DegenerateCurve,
    NonRealRoot,
    QuadratureFailure,
    ResolutionFailure,
    SignAmbiguity,
    StepFailure,
    TodaError,
)
from .exactpoly import (
    BiPoly,
    CFraction,
    MPoly,
    Poly,
    QSeries,
    delta,
    delta_inverse,
    divided_difference,
)
from .lax import (
    MonodromyData,
    PhasePoint,
    SovCoords,
    build_monodromy,
    conserved_poly,
    reality_check,
    sov_coords,
)
from .matrixelements import (
    CloseStateReport,
    DeformedIntegralSpec,
    QuantumIdentityPolys,
    QuasiClassicalState,
    ZoneWave,
    build_quantum_identity_polys,
    close_state_compare,
    contour_shift_residual,
    deformed_integral,
    matrix_element,
    quantum_prop_check,
    quasiclassical_q,
)
from .spectral import (
    PeriodData,
    SpectralData,
    build_spectral,
    classical_actions,
    cycle_integral,
    period_matrix,
    prop_check_classical,
)

__version__ = "0.1.0"

__all__ = [
    "AbelMap",
    "AbelReport",
    "AsymptoticsReport",
    "BiPoly",
    "BracketFailure",
    "CFraction",
    "CloseStateReport",
    "ConvergenceFailure",
    "DeformedIntegralSpec",
    "DegenerateCurve",
    "EigenPair",
    "GradedCharacter",
    "MAX_LEVELS",
    "MPoly",
    "MonodromyData",
    "NonRealRoot",
    "PdeResidualReport",
    "PeriodData",
    "PhasePoint",
    "Poly",
    "QFunction",
    "QSeries",
    "QuadratureFailure",
    "QuantumIdentityPolys",
    "QuasiClassicalState",
    "ResolutionFailure",
    "SignAmbiguity",
    "SovCoords",
    "SpectralData",
    "StepFailure",
    "TodaError",
    "Trajectory",
    "ZoneWave",
    "abel_linearization",
    "asymptotics_check",
    "baxter_residual",
    "bs_quantize",
    "build_monodromy",
    "build_q",
    "build_quantum_identity_polys",
    "character_binomial",
    "character_product",
    "character_resolution",
    "classical_actions",
    "close_state_compare",
    "conserved_poly",
    "contour_shift_residual",
    "cycle_integral",
    "deformed_integral",
    "delta",
    "delta_inverse",
    "divided_difference",
    "eigen_to_t",
    "em_residual",
    "flow_endpoint",
    "fourier_coefficient",
    "hamiltonian_flow",
    "matrix_element",
    "pde_residual",
    "period_matrix",
    "prop_check_classical",
    "qfactorial",
    "quantum_prop_check",
    "quasiclassical_q",
    "reality_check",
    "solve_relative_spectrum",
    "sov_coords",
    "__version__",
]
