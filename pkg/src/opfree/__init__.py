"""
Operator-valued free probability checks on finite-dimensional models.

Non-crossing partitions, matrix-valued moment/cumulant inversion, free and
bosonic Wick formulas, truncated Fock space operators, matrix amplification
of semicircular families, standard polynomials and a JSON scenario CLI.
"""

from .amplify import (
    AmplifiedElement,
    AmplifiedMomentSource,
    block_expectation,
    complex_semicircular_check,
    detect_nonsemicircular,
    opvalued_cumulant,
    opvalued_moment,
    verify_semicircular_amplification,
    verify_theorem1_forward,
    verify_theorem2_chain,
)
from .exceptions import (
    CrossingPartitionError,
    DimensionError,
    OpFreeError,
    ScenarioError,
    SizeLimitError,
    TruncationError,
)
from .fock import (
    BosonBasis,
    FockOperator,
    FreeFockBasis,
    bosonic_family,
    free_family,
    gaussian_bosonic,
    gaussian_free,
    vacuum_expectation,
)
from .mcx import (
    CumulantFunction,
    MomentSource,
    OpWord,
    cumulants_to_moments,
    eta_functional,
    moments_to_cumulants,
    xi_functional,
)
from .ncpart import (
    NcPartition,
    SetPartition,
    enumerate_nc,
    enumerate_ncpp,
    enumerate_pairings,
    enumerate_set_partitions,
    is_noncrossing,
)
from .report import CheckRecord, Report
from .standard_poly import find_nonvanishing_witness, standard_polynomial, verify_al_vanishing
from .symfock import build_cyclic_coefficients, permutation_product, verify_symmetrization
from .wick import CovarianceSpec, StarWord, circular_star_moment, classical_wick_moment, free_wick_moment

__version__ = "0.1.0"
