"""Numerical verification and generation of null wave-equation solutions
on Minkowski space via two-component spinors and twistor constructions."""

from .errors import NullwaveError
from .fields import (
    Box,
    ScalarField,
    Scheme,
    SpinorFieldPair,
    closedness_check,
    factorize_gradient,
    one_form_from_pair,
    semiconformality_residual,
    spinor_gradient,
    spinor_pde_residuals,
    wave_residual,
)
from .kerr import (
    KerrRoot,
    MeromorphicTriple,
    RationalFn,
    kerr_field,
    kerr_gradient,
    kerr_solve,
    kerr_spinors,
    weierstrass_xi,
)
from .report import GridSpec, Report
from .sfr import (
    Branch,
    BranchClassification,
    DirectionRatio,
    RatioField,
    classify_kernel_direction,
    direction_pde_residuals,
    eta_ratio_from_gradient,
    eta_sfr_residual,
    sfr_residual,
    sfr_to_solution,
    verify_theorem2,
    xi_ratio_from_gradient,
)
from .spinor import (
    MinkVec,
    SpinMat,
    Spinor,
    Variance,
    contract,
    contract_full,
    lower_index,
    null_decompose,
    raise_index,
    solve_annihilator,
    spinmat_to_vec,
    vec_to_spinmat,
)
from .twistor import (
    DualTwistor,
    Poly2D,
    Quaternion,
    Twistor,
    TwistorSurface,
    check_prop_condition,
    conj_twistor,
    hopf,
    in_N5,
    incidence_partials,
    incidence_residual,
    inner,
    is_null,
    normalize_chart,
    ray_through,
    solve_incidence,
    surface_field,
)

__version__ = "0.1.0"
