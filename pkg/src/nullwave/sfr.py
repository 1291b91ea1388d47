"""Direction-ratio calculus and shear-free ray congruence verification.

The projective datum of an unprimed spinor field is the ratio
xi = xi^0/xi^1 (a primed field has eta = eta^0'/eta^1').  The field is
tangent to a shear-free family of null geodesics exactly when

    xi nabla_00' xi + nabla_10' xi = 0   and   xi nabla_01' xi + nabla_11' xi = 0,

and for the primed ratio when

    eta nabla_00' eta + nabla_01' eta = 0  and  eta nabla_10' eta + nabla_11' eta = 0.

Ratios live on the Riemann sphere; they are stored homogeneously as
(num, den) and evaluated in whichever affine chart (value or reciprocal)
is better conditioned.  In the reciprocal chart the equations above are
multiplied through by -ratio~^3, which swaps the coefficient pattern, e.g.

    nabla_00' xi~ + xi~ nabla_10' xi~ = 0,  nabla_01' xi~ + xi~ nabla_11' xi~ = 0.

Every null kernel direction of a null wave solution decomposes against the
gradient factorization nabla f = xi_A eta_{A'}: its spinor is proportional
to xi^A or to conj(eta^{A'}), and at least one of those two families is
shear-free.  The converse constructor turns a shear-free ratio field back
into a spinor pair generating a null solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ChartBreakdown,
    DegenerateConstantRatio,
    NotSFR,
    NullwaveError,
    ZeroGradient,
)
from .fields import (
    AUTO,
    GRAD_FLOOR,
    ScalarField,
    Scheme,
    SpinorFieldPair,
    factorize_gradient,
    nabla_matrix,
    pair_from_gradient,
    pair_from_upper_components,
    semiconformality_residual,
    spinor_gradient,
    spinor_pde_residuals,
    step_size,
    wave_residual,
)
from .report import GridSpec, Report, ordered_map, worker_count
from .spinor import (
    MinkVec,
    Spinor,
    Variance,
    contract_full,
    direction_matrix,
    null_decompose,
    outer_upper,
    raise_both,
    raise_index,
    vec_to_spinmat,
)

DEFAULT_SFR_TOL_FD = 1e-5
DEFAULT_SFR_TOL_ANALYTIC = 1e-9
DEFAULT_KERNEL_TOL = 1e-8
DEFAULT_PROP_TOL = 1e-8
NULL_SOLUTION_TOL = 1e-6


@dataclass(frozen=True)
class DirectionRatio:
    """Point num/den of the Riemann sphere, stored homogeneously.

    Chart switching is a field swap, hence exact; prefer_primary picks the
    chart in which the representative value has magnitude <= 1.
    """

    num: complex
    den: complex

    @classmethod
    def of(cls, value: complex) -> "DirectionRatio":
        return cls(complex(value), 1.0 + 0.0j)

    @classmethod
    def infinity(cls) -> "DirectionRatio":
        return cls(1.0 + 0.0j, 0.0j)

    @property
    def prefer_primary(self) -> bool:
        return abs(self.num) <= abs(self.den)

    def flipped(self) -> "DirectionRatio":
        return DirectionRatio(self.den, self.num)

    def chart_value(self, primary: bool) -> complex:
        num, den = (self.num, self.den) if primary else (self.den, self.num)
        if den == 0.0:
            raise ZeroDivisionError("ratio not finite in this chart")
        return num / den

    def is_zero_like(self) -> bool:
        return self.num == 0 and self.den == 0


@dataclass(frozen=True)
class RatioField:
    """Direction ratio as a field, optionally with analytic derivatives.

    analytic_gradient returns the four partials of the primary-chart value
    num/den; reciprocal-chart derivatives follow from the quotient rule.
    """

    eval: Callable[[MinkVec], DirectionRatio]
    analytic_gradient: Optional[Callable[[MinkVec], Sequence[complex]]] = None
    label: str = ""


def ratio_field_from_values(fn: Callable[[MinkVec], complex], label: str = "",
                            analytic_gradient=None) -> RatioField:
    return RatioField(lambda x: DirectionRatio.of(fn(x)), analytic_gradient, label)


def xi_ratio_from_gradient(f: ScalarField, scheme: Scheme = AUTO) -> RatioField:
    """Unprimed direction ratio of the gradient factorization of f.

    Columns of nabla f are proportional to xi_A; the raised ratio is
    xi^0/xi^1 = M[1, c] / (-M[0, c]) from the better-conditioned column.
    """

    def ev(x: MinkVec) -> DirectionRatio:
        m = spinor_gradient(f, x, scheme).m
        c = 0 if np.linalg.norm(m[:, 0]) >= np.linalg.norm(m[:, 1]) else 1
        return DirectionRatio(m[1, c], -m[0, c])

    return RatioField(ev, label=f"{f.label}:xi-ratio")


def eta_ratio_from_gradient(f: ScalarField, scheme: Scheme = AUTO) -> RatioField:
    """Primed direction ratio eta^0'/eta^1' = M[r, 1] / (-M[r, 0])."""

    def ev(x: MinkVec) -> DirectionRatio:
        m = spinor_gradient(f, x, scheme).m
        r = 0 if np.linalg.norm(m[0, :]) >= np.linalg.norm(m[1, :]) else 1
        return DirectionRatio(m[r, 1], -m[r, 0])

    return RatioField(ev, label=f"{f.label}:eta-ratio")


def _chart_nabla(field: RatioField, x: MinkVec, h: float, primary: bool):
    """(center value, nabla matrix) of the ratio in the requested chart."""
    center = field.eval(x).chart_value(primary)
    if not np.isfinite(center):
        raise ZeroDivisionError("ratio not finite in this chart")
    if field.analytic_gradient is not None:
        grad = np.asarray(field.analytic_gradient(x), dtype=complex)
        if not primary:
            primary_value = field.eval(x).chart_value(True)
            grad = -grad / primary_value**2
        return center, nabla_matrix(grad)

    def value(y: MinkVec) -> complex:
        v = field.eval(y).chart_value(primary)
        if not np.isfinite(v):
            raise ZeroDivisionError("ratio not finite in this chart")
        return v

    partials = np.empty(4, dtype=complex)
    for a in range(4):
        partials[a] = (value(x.offset(a, h)) - value(x.offset(a, -h))) / (2.0 * h)
    return center, nabla_matrix(partials)


def _with_chart_fallback(field: RatioField, x: MinkVec, h: float):
    """Evaluate (value, nabla, primary_flag), trying both charts."""
    first = field.eval(x).prefer_primary
    for primary in (first, not first):
        try:
            value, nab = _chart_nabla(field, x, h, primary)
            return value, nab, primary
        except (ZeroDivisionError, FloatingPointError):
            continue
    raise ChartBreakdown(f"ratio field degenerate in both charts at {x}")


def sfr_residual(
    xi_ratio: RatioField, x: MinkVec, scheme: Scheme = AUTO
) -> tuple[complex, complex]:
    """Shear-free transport residuals of an unprimed ratio field at x.

    Primary chart: (xi n00 + n10, xi n01 + n11); reciprocal chart uses the
    cleared equations with the coefficient on the other term.
    """
    h = step_size(x, scheme.h)
    value, n, primary = _with_chart_fallback(xi_ratio, x, h)
    if primary:
        return (value * n[0, 0] + n[1, 0], value * n[0, 1] + n[1, 1])
    return (n[0, 0] + value * n[1, 0], n[0, 1] + value * n[1, 1])


def eta_sfr_residual(
    eta_ratio: RatioField, x: MinkVec, scheme: Scheme = AUTO
) -> tuple[complex, complex]:
    """Shear-free transport residuals of a primed ratio field at x."""
    h = step_size(x, scheme.h)
    value, n, primary = _with_chart_fallback(eta_ratio, x, h)
    if primary:
        return (value * n[0, 0] + n[0, 1], value * n[1, 0] + n[1, 1])
    return (n[0, 0] + value * n[0, 1], n[1, 0] + value * n[1, 1])


def direction_pde_residuals(
    xi_ratio: RatioField,
    eta_ratio: RatioField,
    x: MinkVec,
    scheme: Scheme = AUTO,
) -> tuple[complex, complex, complex, complex]:
    """The four coupled ratio equations equivalent to the transport system.

    With finite ratios these are
        eta nabla_00' xi + nabla_01' xi,   eta nabla_10' xi + nabla_11' xi,
        xi nabla_00' eta + nabla_10' eta,  xi nabla_01' eta + nabla_11' eta.
    Each residual is evaluated homogeneously: the coefficient ratio enters
    as a normalized (num, den) pair and the differentiated ratio in its own
    chart, so points at infinity need no special casing.
    """
    h = step_size(x, scheme.h)
    _, nxi, _ = _with_chart_fallback(xi_ratio, x, h)
    _, neta, _ = _with_chart_fallback(eta_ratio, x, h)

    def coeff(ratio: DirectionRatio) -> tuple[complex, complex]:
        m = max(abs(ratio.num), abs(ratio.den))
        if m == 0.0:
            raise ChartBreakdown(f"undefined ratio at {x}")
        return ratio.num / m, ratio.den / m

    e_num, e_den = coeff(eta_ratio.eval(x))
    x_num, x_den = coeff(xi_ratio.eval(x))
    return (
        e_num * nxi[0, 0] + e_den * nxi[0, 1],
        e_num * nxi[1, 0] + e_den * nxi[1, 1],
        x_num * neta[0, 0] + x_den * neta[1, 0],
        x_num * neta[0, 1] + x_den * neta[1, 1],
    )


class Branch(Enum):
    XI = "XiBranch"
    ETA = "EtaBranch"
    COINCIDENT = "Coincident"
    NOT_IN_KERNEL = "NotInKernel"


@dataclass(frozen=True)
class BranchClassification:
    branch: Branch
    factor: Optional[complex]
    kernel_residual: float
    xi_mismatch: float
    eta_mismatch: float


def _wedge(a: Spinor, b: Spinor) -> complex:
    return a.c0 * b.c1 - a.c1 * b.c0


def classify_kernel_direction(
    f: ScalarField,
    x: MinkVec,
    v: MinkVec,
    scheme: Scheme = AUTO,
    kernel_tol: float = DEFAULT_KERNEL_TOL,
    prop_tol: float = DEFAULT_PROP_TOL,
) -> BranchClassification:
    """Decompose a null direction against the gradient factorization at x.

    The spinor rho of v = lam rho conj(rho) is compared with xi^A and with
    conj(eta^{A'}); directions outside ker df report NotInKernel.
    """
    lam, rho = null_decompose(v)
    M = spinor_gradient(f, x, scheme)
    if M.frobenius() < GRAD_FLOOR:
        raise ZeroGradient(f"gradient vanishes at {x}")
    V = vec_to_spinmat(v)
    dfv = contract_full(M, V)
    kernel_res = abs(dfv)
    if kernel_res > kernel_tol * M.frobenius() * V.frobenius():
        return BranchClassification(Branch.NOT_IN_KERNEL, None, kernel_res,
                                    math.inf, math.inf)
    xi, eta = factorize_gradient(M)
    xi_up = raise_index(xi)
    eta_bar = raise_index(eta).conjugated()  # upper unprimed
    nr = rho.norm()
    xi_mis = abs(_wedge(rho, xi_up)) / (nr * xi_up.norm())
    eta_mis = abs(_wedge(rho, eta_bar)) / (nr * eta_bar.norm())

    def factor_against(ref: Spinor) -> complex:
        r = np.array(rho.components, complex)
        t = np.array(ref.components, complex)
        return complex((t.conj() @ r) / (t.conj() @ t))

    if xi_mis <= prop_tol and eta_mis <= prop_tol:
        return BranchClassification(Branch.COINCIDENT, factor_against(xi_up),
                                    kernel_res, xi_mis, eta_mis)
    if xi_mis <= prop_tol:
        return BranchClassification(Branch.XI, factor_against(xi_up),
                                    kernel_res, xi_mis, eta_mis)
    if eta_mis <= prop_tol:
        return BranchClassification(Branch.ETA, factor_against(eta_bar),
                                    kernel_res, xi_mis, eta_mis)
    raise NullwaveError(
        f"kernel direction at {x} matches neither factor "
        f"(mismatches {xi_mis:.3e}, {eta_mis:.3e})"
    )


VERIFY_COLUMNS = (
    ["t", "x1", "x2", "x3", "flag", "semiconformality", "wave"]
    + [f"pair_eq_{k}" for k in range(1, 9)]
    + ["xi_kernel", "eta_kernel", "xi_sfr_1", "xi_sfr_2", "eta_sfr_1", "eta_sfr_2"]
)


def _ratio_step(f: ScalarField, scheme: Scheme) -> Scheme:
    """Step for differentiating ratio fields extracted from f.

    Ratios built on finite-difference gradients carry O(h^2) noise, so the
    outer step is widened to keep the quotient stable.
    """
    if scheme.h is not None:
        return scheme
    kind = scheme.kind
    if kind == "auto":
        kind = "analytic" if f.analytic_gradient is not None else "central"
    return Scheme(scheme.kind, 1e-4 if kind == "analytic" else 1e-3)


def verify_theorem2(
    f: ScalarField,
    grid: GridSpec,
    scheme: Scheme = AUTO,
    null_solution_tol: float = NULL_SOLUTION_TOL,
    sfr_tol: float = DEFAULT_SFR_TOL_FD,
    kernel_tol: float = DEFAULT_KERNEL_TOL,
    grad_floor: float = GRAD_FLOOR,
    workers: Optional[int] = None,
) -> Report:
    """Grid verification of the two-null-direction theorem for f.

    Per point the report holds the null-solution residuals, the eight
    pair transport residuals, kernel-membership residuals of both branch
    directions, and both branch shear-free residual pairs.  The verdict
    requires f to be a null solution and at least one branch to be
    shear-free over the grid (points with vanishing gradient are listed,
    not judged).
    """
    xi_rf = xi_ratio_from_gradient(f, scheme)
    eta_rf = eta_ratio_from_gradient(f, scheme)
    ratio_scheme = _ratio_step(f, scheme)

    def record(x: MinkVec) -> dict:
        row: dict = {
            "t": x.t, "x1": x.x1, "x2": x.x2, "x3": x.x3, "flag": "",
        }
        try:
            M = spinor_gradient(f, x, scheme)
            if M.frobenius() < grad_floor:
                row["flag"] = "low_gradient"
                return row
            row["semiconformality"] = abs(M.det())
            row["wave"] = abs(wave_residual(f, x, scheme))
            pair = pair_from_gradient(f, x, scheme)
            for k, value in enumerate(spinor_pde_residuals(pair, x, scheme), start=1):
                row[f"pair_eq_{k}"] = abs(value)
            xi, eta = factorize_gradient(M)
            xi_up = raise_index(xi)
            eta_up = raise_index(eta)
            v_xi = direction_matrix(xi_up)
            v_eta = outer_upper(eta_up.conjugated(), eta_up)
            row["xi_kernel"] = abs(contract_full(M, v_xi)) / (
                M.frobenius() * max(v_xi.frobenius(), 1e-300)
            )
            row["eta_kernel"] = abs(contract_full(M, v_eta)) / (
                M.frobenius() * max(v_eta.frobenius(), 1e-300)
            )
            sx = sfr_residual(xi_rf, x, ratio_scheme)
            se = eta_sfr_residual(eta_rf, x, ratio_scheme)
            row["xi_sfr_1"], row["xi_sfr_2"] = abs(sx[0]), abs(sx[1])
            row["eta_sfr_1"], row["eta_sfr_2"] = abs(se[0]), abs(se[1])
        except NullwaveError as exc:
            row["flag"] = f"error:{type(exc).__name__}"
        return row

    rows = ordered_map(record, grid.points(), worker_count(workers))
    report = Report(
        command="verify",
        label=f.label,
        columns=list(VERIFY_COLUMNS),
        rows=rows,
        meta={
            "grid": grid.to_json(),
            "scheme": scheme.kind,
            "tolerances": {
                "null_solution": null_solution_tol,
                "sfr": sfr_tol,
                "kernel": kernel_tol,
                "grad_floor": grad_floor,
            },
        },
    )
    def col_pair_max(c1: str, c2: str) -> Optional[float]:
        vals = [v for v in (report.column_max(c1), report.column_max(c2)) if v is not None]
        return max(vals) if vals else None

    max_semi = report.column_max("semiconformality")
    max_wave = report.column_max("wave")
    xi_max = col_pair_max("xi_sfr_1", "xi_sfr_2")
    eta_max = col_pair_max("eta_sfr_1", "eta_sfr_2")
    null_ok = (
        max_semi is not None
        and max_wave is not None
        and max_semi <= null_solution_tol
        and max_wave <= null_solution_tol
    )
    sfr_ok = (
        xi_max is not None
        and eta_max is not None
        and min(xi_max, eta_max) <= sfr_tol
    )
    report.verdicts = {
        "null_solution": bool(null_ok),
        "xi_branch_max": xi_max,
        "eta_branch_max": eta_max,
        "sfr": bool(sfr_ok),
        "overall": bool(null_ok and sfr_ok),
    }
    if max_semi is None or max_wave is None:
        report.verdicts["note"] = "no usable grid points"
    elif xi_max is None or eta_max is None:
        report.verdicts["note"] = "branch residuals unavailable"
    return report


def sfr_to_solution(
    xi_ratio: RatioField,
    samples: Sequence[MinkVec],
    scheme: Scheme = AUTO,
    sfr_tol: float = DEFAULT_SFR_TOL_FD,
    degenerate_tol: float = 1e-12,
) -> SpinorFieldPair:
    """Spinor pair of a null solution generated by a shear-free ratio field.

    Upper components: xi^A = (xi, 1), eta^0' = -nabla_01' xi,
    eta^1' = nabla_00' xi.  The input must satisfy the shear-free equations
    on the samples; a constant ratio makes eta vanish identically and is
    rejected as degenerate.
    """
    if not samples:
        raise ValueError("need at least one sample point")
    worst = 0.0
    eta_scale = 0.0
    for x in samples:
        res = sfr_residual(xi_ratio, x, scheme)
        worst = max(worst, abs(res[0]), abs(res[1]))
        _, nab, primary = _with_chart_fallback(
            xi_ratio, x, step_size(x, scheme.h)
        )
        if primary:
            eta_scale = max(eta_scale, abs(nab[0, 0]), abs(nab[0, 1]))
        else:
            eta_scale = max(eta_scale, abs(nab).max())
    if worst > sfr_tol:
        raise NotSFR(f"max shear-free residual {worst:.3e} exceeds {sfr_tol:.1e}")
    if eta_scale <= degenerate_tol:
        raise DegenerateConstantRatio("constant ratio induces a zero pair")

    def xi_value(x: MinkVec) -> complex:
        return xi_ratio.eval(x).chart_value(True)

    def xi_nabla(x: MinkVec) -> np.ndarray:
        _, nab, primary = _with_chart_fallback(xi_ratio, x, step_size(x, scheme.h))
        if not primary:
            # nabla of xi from the reciprocal chart: xi = 1/xi~.
            tilde = xi_ratio.eval(x).chart_value(False)
            return -nab / tilde**2
        return nab

    return pair_from_upper_components(
        lambda x: xi_value(x),
        lambda x: 1.0 + 0.0j,
        lambda x: -xi_nabla(x)[0, 1],
        lambda x: xi_nabla(x)[0, 0],
        label=f"{xi_ratio.label}:induced-pair",
        gauge_note="xi^1 normalized to 1",
    )
