"""Complex scalar fields on Minkowski domains and their spinor calculus.

Provides the spinor covariant derivative matrix

    nabla = (1/sqrt 2) [[d0+d1, d2-i*d3], [d2+i*d3, d0-d1]],

the semi-conformality residual det(nabla f), the wave residual
d0^2 f - d1^2 f - d2^2 f - d3^2 f, the rank-1 factorization of the
gradient into a spinor pair, the eight first-order transport equations
that characterize null wave solutions through such a pair, and the
curl/divergence check equivalent to them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotRankOne, OutOfDomain, ZeroMatrix
from .spinor import (
    SQRT2,
    MinkVec,
    Role,
    SpinMat,
    Spinor,
    Variance,
    lower_index,
    outer_lower,
    raise_index,
)

#: Default relative step for first derivatives of directly evaluable fields.
FIRST_STEP = 1e-4
#: Default relative step for second or nested derivatives.
SECOND_STEP = 1e-3
#: Gradient magnitude below which a grid point is reported, not judged.
GRAD_FLOOR = 1e-12
DEFAULT_FACTOR_TOL = 1e-9

SIGNS = (1.0, -1.0, -1.0, -1.0)  # metric signs for divergence-type sums


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in (t, x1, x2, x3)."""

    lo: tuple[float, float, float, float]
    hi: tuple[float, float, float, float]

    @classmethod
    def cube(cls, half: float) -> "Box":
        return cls((-half,) * 4, (half,) * 4)

    @classmethod
    def around(cls, center: Sequence[float], half: Sequence[float]) -> "Box":
        c = [float(v) for v in center]
        h = [float(v) for v in half]
        return cls(tuple(ci - hi for ci, hi in zip(c, h)),
                   tuple(ci + hi for ci, hi in zip(c, h)))

    def contains(self, x: MinkVec, margin: float = 0.0) -> bool:
        return all(
            lo + margin <= c <= hi - margin
            for c, lo, hi in zip(x.as_tuple(), self.lo, self.hi)
        )

    def padded(self, pad: float) -> "Box":
        return Box(tuple(v - pad for v in self.lo), tuple(v + pad for v in self.hi))


BIG_BOX = Box.cube(10.0)


@dataclass(frozen=True)
class Scheme:
    """Differentiation scheme: analytic gradients, central differences, or auto."""

    kind: str = "auto"  # "auto" | "analytic" | "central"
    h: Optional[float] = None

    @classmethod
    def auto(cls, h: Optional[float] = None) -> "Scheme":
        return cls("auto", h)

    @classmethod
    def analytic(cls) -> "Scheme":
        return cls("analytic", None)

    @classmethod
    def central(cls, h: Optional[float] = None) -> "Scheme":
        return cls("central", h)


AUTO = Scheme.auto()


def step_size(x: MinkVec, h: Optional[float], default_rel: float = FIRST_STEP) -> float:
    if h is not None:
        return h
    return default_rel * max(1.0, max(abs(c) for c in x.as_tuple()))


@dataclass(frozen=True)
class ScalarField:
    """Evaluatable complex function on a Minkowski box.

    `evaluate` must be deterministic.  When `analytic_gradient` is present it
    returns the four partials (d0 f, d1 f, d2 f, d3 f) and is preferred by
    the residual operators.
    """

    label: str
    evaluate: Callable[[MinkVec], complex]
    analytic_gradient: Optional[Callable[[MinkVec], Sequence[complex]]] = None
    domain: Box = field(default=BIG_BOX)


def partials4(func: Callable[[MinkVec], complex], x: MinkVec, h: float) -> np.ndarray:
    """Central-difference first partials of an arbitrary complex function."""
    out = np.empty(4, dtype=complex)
    for a in range(4):
        out[a] = (func(x.offset(a, h)) - func(x.offset(a, -h))) / (2.0 * h)
    return out


def nabla_matrix(partials: Sequence[complex]) -> np.ndarray:
    """Spinor derivative matrix from the four partials."""
    d0, d1, d2, d3 = partials
    return np.array(
        [[d0 + d1, d2 - 1j * d3], [d2 + 1j * d3, d0 - d1]], dtype=complex
    ) / SQRT2


def _resolve(scheme: Scheme, f: ScalarField) -> str:
    if scheme.kind == "auto":
        return "analytic" if f.analytic_gradient is not None else "central"
    if scheme.kind == "analytic" and f.analytic_gradient is None:
        raise ValueError(f"field {f.label!r} has no analytic gradient")
    return scheme.kind


def gradient4(f: ScalarField, x: MinkVec, scheme: Scheme = AUTO) -> np.ndarray:
    """Four partials of f at x, analytic when available."""
    kind = _resolve(scheme, f)
    if kind == "analytic":
        if not f.domain.contains(x):
            raise OutOfDomain(f"{x} outside domain of {f.label!r}")
        return np.asarray(f.analytic_gradient(x), dtype=complex)
    h = step_size(x, scheme.h)
    if not f.domain.contains(x, margin=h):
        raise OutOfDomain(f"stencil around {x} leaves domain of {f.label!r}")
    return partials4(f.evaluate, x, h)


def spinor_gradient(f: ScalarField, x: MinkVec, scheme: Scheme = AUTO) -> SpinMat:
    """Spinor covariant derivative matrix of f at x."""
    return SpinMat(nabla_matrix(gradient4(f, x, scheme)), Role.GRADIENT)


def semiconformality_residual(f: ScalarField, x: MinkVec, scheme: Scheme = AUTO) -> complex:
    """det(nabla f) = ((d0 f)^2 - (d1 f)^2 - (d2 f)^2 - (d3 f)^2) / 2."""
    return spinor_gradient(f, x, scheme).det()


def wave_residual(f: ScalarField, x: MinkVec, scheme: Scheme = AUTO) -> complex:
    """d0^2 f - d1^2 f - d2^2 f - d3^2 f.

    With an analytic gradient the second derivatives come from central
    differences of the first ones; otherwise from second differences of f.
    """
    kind = _resolve(scheme, f)
    if kind == "analytic":
        h = step_size(x, scheme.h)
        if not f.domain.contains(x, margin=h):
            raise OutOfDomain(f"stencil around {x} leaves domain of {f.label!r}")
        total = 0.0 + 0.0j
        for a in range(4):
            ga = lambda y: f.analytic_gradient(y)[a]  # noqa: E731
            total += SIGNS[a] * (ga(x.offset(a, h)) - ga(x.offset(a, -h))) / (2.0 * h)
        return total
    h = step_size(x, scheme.h, SECOND_STEP)
    if not f.domain.contains(x, margin=2.0 * h):
        raise OutOfDomain(f"stencil around {x} leaves domain of {f.label!r}")
    f0 = f.evaluate(x)
    total = 0.0 + 0.0j
    for a in range(4):
        second = (f.evaluate(x.offset(a, h)) - 2.0 * f0 + f.evaluate(x.offset(a, -h))) / h**2
        total += SIGNS[a] * second
    return total


def factorize_gradient(
    M: SpinMat, factor_tol: float = DEFAULT_FACTOR_TOL
) -> tuple[Spinor, Spinor]:
    """Split a rank-1 gradient matrix as xi_A eta_{A'}.

    The gauge makes xi a unit spinor whose largest component is real
    positive; eta carries the remaining scale.  No SVD: proportionality is
    solved directly from the dominant column.
    """
    norm = M.frobenius()
    if norm == 0.0:
        raise ZeroMatrix("cannot factor the zero matrix")
    if abs(M.det()) > factor_tol * norm**2:
        raise NotRankOne(f"determinant {M.det()!r} too large for rank 1")
    m = M.m
    col = m[:, 0] if np.linalg.norm(m[:, 0]) >= np.linalg.norm(m[:, 1]) else m[:, 1]
    from .spinor import gauge_fix

    xi = gauge_fix(col[0], col[1], Variance.LOWER_UNPRIMED)
    u = np.array(xi.components, dtype=complex).conj()
    eta_c = u @ m  # exact for unit xi since M = xi eta
    eta = Spinor(eta_c[0], eta_c[1], Variance.LOWER_PRIMED)
    return xi, eta


@dataclass(frozen=True)
class SpinorFieldPair:
    """Pair of spinor fields xi_A(x), eta_{A'}(x) factoring a gradient."""

    xi: Callable[[MinkVec], Spinor]
    eta: Callable[[MinkVec], Spinor]
    label: str = ""
    gauge_note: str = ""


def constant_pair(xi: Spinor, eta: Spinor, label: str = "constant") -> SpinorFieldPair:
    return SpinorFieldPair(lambda x: xi, lambda x: eta, label=label)


def pair_from_upper_components(
    fx0, fx1, fe0, fe1, label: str = "", gauge_note: str = ""
) -> SpinorFieldPair:
    """Build a pair from callables giving the upper components xi^A, eta^{A'}."""

    def xi(x: MinkVec) -> Spinor:
        return lower_index(Spinor(fx0(x), fx1(x), Variance.UPPER_UNPRIMED))

    def eta(x: MinkVec) -> Spinor:
        return lower_index(Spinor(fe0(x), fe1(x), Variance.UPPER_PRIMED))

    return SpinorFieldPair(xi, eta, label=label, gauge_note=gauge_note)


def pair_from_gradient(
    f: ScalarField, x0: MinkVec, scheme: Scheme = AUTO
) -> SpinorFieldPair:
    """Smooth local factorization of nabla f near x0.

    Pivots (dominant column and row of the gradient) are frozen at x0 so the
    component fields stay smooth on a difference stencil around x0:
    xi = column p of nabla f, eta = row q divided by the pivot entry.
    """
    m0 = spinor_gradient(f, x0, scheme).m
    p = 0 if np.linalg.norm(m0[:, 0]) >= np.linalg.norm(m0[:, 1]) else 1
    q = 0 if np.linalg.norm(m0[0, :]) >= np.linalg.norm(m0[1, :]) else 1
    if abs(m0[q, p]) == 0.0:
        raise ZeroMatrix(f"gradient pivot vanishes at {x0}")

    def xi(x: MinkVec) -> Spinor:
        m = spinor_gradient(f, x, scheme).m
        return Spinor(m[0, p], m[1, p], Variance.LOWER_UNPRIMED)

    def eta(x: MinkVec) -> Spinor:
        m = spinor_gradient(f, x, scheme).m
        return Spinor(m[q, 0] / m[q, p], m[q, 1] / m[q, p], Variance.LOWER_PRIMED)

    return SpinorFieldPair(
        xi, eta, label=f"{f.label}:pair", gauge_note=f"pivot column {p}, row {q}"
    )


def _upper_component_functions(pair: SpinorFieldPair):
    """Callables for xi^0, xi^1, eta^0', eta^1' (indices raised)."""

    def xi_up(x: MinkVec) -> tuple[complex, complex]:
        s = raise_index(pair.xi(x))
        return s.components

    def eta_up(x: MinkVec) -> tuple[complex, complex]:
        s = raise_index(pair.eta(x))
        return s.components

    return (
        lambda x: xi_up(x)[0],
        lambda x: xi_up(x)[1],
        lambda x: eta_up(x)[0],
        lambda x: eta_up(x)[1],
    )


def spinor_pde_residuals(
    pair: SpinorFieldPair, x: MinkVec, scheme: Scheme = AUTO
) -> tuple[complex, ...]:
    """The eight transport equations coupling xi^A and eta^{A'}.

    These are the components of nabla_{AA'}(xi^B eta^{A'}) = 0 and
    nabla_{AA'}(xi^A eta^{B'}) = 0, expanded by the product rule; all eight
    vanish exactly when the pair factors the gradient of a null solution of
    the wave equation.  Values depend only on the product xi^A eta^{A'}.
    """
    h = step_size(x, scheme.h)
    comps = _upper_component_functions(pair)
    x0v, x1v, e0v, e1v = (c(x) for c in comps)
    nx0, nx1, ne0, ne1 = (nabla_matrix(partials4(c, x, h)) for c in comps)
    return (
        x0v * ne0[0, 0] + e0v * nx0[0, 0] + x0v * ne1[0, 1] + e1v * nx0[0, 1],
        x1v * ne0[0, 0] + e0v * nx1[0, 0] + x1v * ne1[0, 1] + e1v * nx1[0, 1],
        x0v * ne0[1, 0] + e0v * nx0[1, 0] + x0v * ne1[1, 1] + e1v * nx0[1, 1],
        x1v * ne0[1, 0] + e0v * nx1[1, 0] + x1v * ne1[1, 1] + e1v * nx1[1, 1],
        x0v * ne0[0, 0] + e0v * nx0[0, 0] + x1v * ne0[1, 0] + e0v * nx1[1, 0],
        x0v * ne1[0, 0] + e1v * nx0[0, 0] + x1v * ne1[1, 0] + e1v * nx1[1, 0],
        x0v * ne0[0, 1] + e0v * nx0[0, 1] + x1v * ne0[1, 1] + e0v * nx1[1, 1],
        x0v * ne1[0, 1] + e1v * nx0[0, 1] + x1v * ne1[1, 1] + e1v * nx1[1, 1],
    )


def one_form_from_pair(pair: SpinorFieldPair) -> Callable[[MinkVec], np.ndarray]:
    """Coefficient 1-form (w0, w1, w2, w3) of the product xi_A eta_{A'}.

    Inverts the gradient-matrix pattern, so when the pair factors nabla f
    the coefficients are exactly the partials of f.
    """

    def w(x: MinkVec) -> np.ndarray:
        L = outer_lower(pair.xi(x), pair.eta(x)).m
        return np.array(
            [
                (L[0, 0] + L[1, 1]) / SQRT2,
                (L[0, 0] - L[1, 1]) / SQRT2,
                (L[0, 1] + L[1, 0]) / SQRT2,
                1j * (L[0, 1] - L[1, 0]) / SQRT2,
            ],
            dtype=complex,
        )

    return w


def closedness_check(
    one_form: Callable[[MinkVec], Sequence[complex]],
    x: MinkVec,
    h: Optional[float] = None,
) -> tuple[tuple[complex, ...], complex]:
    """Exterior derivative components and Minkowski divergence of a 1-form.

    Returns (curl, div) with curl the six coefficients on
    dx^a ^ dx^b for (a, b) in (0,1), (0,2), (0,3), (1,2), (1,3), (2,3),
    each equal to d_b w^a - d_a w^b, and
    div = d0 w^0 - d1 w^1 - d2 w^2 - d3 w^3.
    """
    hh = step_size(x, h)
    J = np.empty((4, 4), dtype=complex)  # J[a, b] = d_b w^a
    for b in range(4):
        plus = np.asarray(one_form(x.offset(b, hh)), dtype=complex)
        minus = np.asarray(one_form(x.offset(b, -hh)), dtype=complex)
        J[:, b] = (plus - minus) / (2.0 * hh)
    curl = tuple(
        J[a, b] - J[b, a] for a, b in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    )
    div = J[0, 0] - J[1, 1] - J[2, 2] - J[3, 3]
    return curl, div
