"""Positivity of complex linear canonical transformations and Gaussian Toeplitz operators.

Quadratic weights on ``C^n``, complex symplectic linear algebra on ``C^{2n}``,
exact Gaussian kernel calculus for metaplectic Fourier integral operators,
and boundedness / trace-class / unitarity verdicts for ``Top(e^{2q})`` on
Bargmann spaces, each cross-checked by an independent route.
"""

from .errors import *  # noqa: F401,F403
from .forms import (
    ComplexQuadraticSymbolExponent,
    FormComparison,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    compare_weights,
    critical_value_hol,
    gaussian_reduce,
    polarize,
    split_herm_plh,
)
from .symplectic import (
    AntilinearInvolution,
    ComplexCanonicalMap,
    HermitianFormOnPhase,
    SymplecticContext,
    cayley_map,
    cayley_phase,
    generating_function,
    hermitian_b,
    involution_of,
    push_weight,
    reduce_to_model,
    shear_map,
)
from .positivity import (
    CLagrangianPlane,
    PositivityVerdict,
    Status,
    lagrangian_positivity,
    map_positivity,
    positivity_via_generating,
)
from .fio import (
    BergmanKernel,
    NondegeneratePhase,
    image_weight,
    kernel_domination_check,
    kernel_from_phase,
    map_from_kernel,
    prop32_equivalence,
    projection_kernel,
)
from .toeplitz import GaussianSymbol, ToeplitzReport, admissibility, analyze, toeplitz_map, weyl_symbol
from .validate import SpectralReport, TruncatedOperator, projection_idempotence, spectral_report, truncated_matrix

__version__ = "0.1.0"
