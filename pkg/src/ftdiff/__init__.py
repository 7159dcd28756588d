"""Fixed-time differentiator toolbox.

Generating-function admissibility checks, convergence-time analysis and
bounds, prescribed-time gain tuning, and forward-Euler simulation of the
resulting differentiator, with a command-line front end (``ftdiff``).
"""
from .convtime import (
    GlobalConvtime,
    SystemMatrix,
    expm2,
    global_convtime_numeric,
    lbar,
    lbar_integral,
    lower_bound,
    single_exp_reduction,
    system_matrix,
    t0_exact,
    t_perturbed_bound,
    upper_bound_ttilde,
)
from .dgf import (
    AdmissibilityConstants,
    CheckItem,
    CheckReport,
    GeneratingFunction,
    ParamTriple,
    ScaledFamily,
    builtin_dgf,
    builtin_names,
    check_dgf,
    compute_admissibility,
    invert_phi,
    nu1,
    nu2,
    psi_prime,
    spow,
)
from .errors import (
    BoundNotApplicableError,
    ExpressionError,
    FtdiffError,
    InfeasibleError,
    InversionRangeError,
    NotAdmissibleError,
    QuadratureError,
    SetValuedPointError,
    SimulationDivergedError,
    SupremumSearchError,
)
from .expr import compile_expression
from .sim import (
    DifferentiatorState,
    Fig1Signal,
    NoiseSpec,
    NoiseSweepRow,
    SampledSignal,
    SimConfig,
    SimResult,
    SlopeSignal,
    SlopeSweepRow,
    noise_sweep,
    result_to_csv,
    run,
    step,
    sweep_slopes,
)
from .tuning import (
    Table1Row,
    TuningRequest,
    TuningResult,
    default_gamma,
    generate_table1,
    is_normalized,
    table1_csv,
    tightness_ratio_bound,
    tune,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityConstants",
    "BoundNotApplicableError",
    "CheckItem",
    "CheckReport",
    "DifferentiatorState",
    "ExpressionError",
    "Fig1Signal",
    "FtdiffError",
    "GeneratingFunction",
    "GlobalConvtime",
    "InfeasibleError",
    "InversionRangeError",
    "NoiseSpec",
    "NoiseSweepRow",
    "NotAdmissibleError",
    "ParamTriple",
    "QuadratureError",
    "SampledSignal",
    "ScaledFamily",
    "SetValuedPointError",
    "SimConfig",
    "SimResult",
    "SimulationDivergedError",
    "SlopeSignal",
    "SlopeSweepRow",
    "SupremumSearchError",
    "SystemMatrix",
    "Table1Row",
    "TuningRequest",
    "TuningResult",
    "builtin_dgf",
    "builtin_names",
    "check_dgf",
    "compile_expression",
    "compute_admissibility",
    "default_gamma",
    "expm2",
    "generate_table1",
    "global_convtime_numeric",
    "invert_phi",
    "is_normalized",
    "lbar",
    "lbar_integral",
    "lower_bound",
    "noise_sweep",
    "nu1",
    "nu2",
    "psi_prime",
    "result_to_csv",
    "run",
    "single_exp_reduction",
    "spow",
    "step",
    "sweep_slopes",
    "system_matrix",
    "t0_exact",
    "t_perturbed_bound",
    "table1_csv",
    "tightness_ratio_bound",
    "tune",
    "upper_bound_ttilde",
    "__version__",
]
