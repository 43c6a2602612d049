"""Identifiability analysis for blind gain and phase calibration, ``Y = diag(lam) A X``."""

from .checkers import CheckReport, algorithm1, algorithm2, build_G, check_jointsparse_dft, check_subspace
from .conditions import (
    ConditionReport,
    necessary_bound,
    necessary_N,
    row_space_decomposable,
    sufficient_jointsparse,
    sufficient_jointsparse_2d,
    sufficient_piecewise,
    sufficient_subspace,
    universal_sparsity_report,
)
from .errors import (
    BGPCError,
    DegenerateInputError,
    DimensionError,
    EnumerationGuardError,
    ParameterError,
    PreconditionError,
    RankError,
)
from .indexsets import IndexPairSet, IndexSet, is_friendly, periods, periods_2d
from .instances import ProblemInstance, counterexample, load_instance, save_instance
from .matcore import DEFAULT_TOL, Tolerance, numerical_rank
from .transgroup import DftShiftScale, Dft2dShiftScale, GammaOf, Scaling, orbit_equivalent

__version__ = "0.1.0"
