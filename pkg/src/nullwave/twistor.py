"""Twistor-space primitives and holomorphic surface charts.

A twistor is a point of C^4 with coordinates (xi_0, xi_1, eta^0', eta^1').
Its conjugate lives in the dual space; the pairing

    <X, L> = X^0 conj(L^2) + X^1 conj(L^3) + X^2 conj(L^0) + X^3 conj(L^1)

is real on the diagonal, and <X, X> = 0 characterizes the twistors that
correspond to light rays.  A point x of Minkowski space is incident with X
when, writing u = t + x1, v = t - x1, q = x2 + i x3,

    r = u eta^0' + q eta^1' + i xi_0 = 0
    s = conj(q) eta^0' + v eta^1' + i xi_1 = 0.

Surfaces are two-parameter holomorphic charts (z, w) -> C^4; solving
r = s = 0 along such a surface generates complex functions z(x) whose wave
residual vanishes precisely when eta^0'/eta^1' is independent of w.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
import numpy.polynomial.polynomial as npp

from .errors import (
    EtaDenominatorZero,
    EtaZero,
    NewtonDiverged,
    NotNull,
    SingularBracket,
    SingularChart,
    ZeroPoint,
    ZeroTwistor,
)
from .fields import Box, ScalarField
from .spinor import MinkVec, Role, SpinMat, spinmat_to_vec

DEFAULT_NULL_TOL = 1e-9
NEWTON_TOL = 1e-12
BRACKET_TOL = 1e-10
PROJECTIVE_TOL = 1e-12

# Deterministic Newton seeds: 5x5 real lattice on [-2, 2]^2, row-major.
SEED_LATTICE = tuple(
    (complex(a), complex(b))
    for a in (-2.0, -1.0, 0.0, 1.0, 2.0)
    for b in (-2.0, -1.0, 0.0, 1.0, 2.0)
)


@dataclass(frozen=True)
class Twistor:
    """Point (xi0, xi1, eta0, eta1) of twistor space."""

    xi0: complex
    xi1: complex
    eta0: complex
    eta1: complex

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.xi0, self.xi1, self.eta0, self.eta1], dtype=complex)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coords) ** 2))

    def is_zero(self) -> bool:
        return self.norm_sq() == 0.0


@dataclass(frozen=True)
class DualTwistor:
    """Point (rho^A, sigma_{A'}) of the dual space."""

    d0: complex
    d1: complex
    d2: complex
    d3: complex

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.d0, self.d1, self.d2, self.d3], dtype=complex)


def conj_twistor(X: Twistor) -> DualTwistor:
    """Conjugation C^4 -> dual C^4; an involution under the inverse map."""
    c = X.coords
    return DualTwistor(
        complex(c[2]).conjugate(),
        complex(c[3]).conjugate(),
        complex(c[0]).conjugate(),
        complex(c[1]).conjugate(),
    )


def inner(X: Twistor, L: Twistor) -> complex:
    """Pairing of X with the conjugate of L; linear in X, antilinear in L."""
    xc, lc = X.coords, L.coords
    return complex(
        xc[0] * np.conj(lc[2])
        + xc[1] * np.conj(lc[3])
        + xc[2] * np.conj(lc[0])
        + xc[3] * np.conj(lc[1])
    )


def is_null(X: Twistor, tol: float = DEFAULT_NULL_TOL) -> bool:
    if X.is_zero():
        raise ZeroTwistor("zero twistor has no null test")
    return abs(inner(X, X)) <= tol * X.norm_sq()


def projectively_equal(X: Twistor, Y: Twistor, tol: float = PROJECTIVE_TOL) -> bool:
    """Equality up to overall complex scale: all coordinate cross-products vanish."""
    a, b = X.coords, Y.coords
    scale = float(np.linalg.norm(a) * np.linalg.norm(b))
    if scale == 0.0:
        return X.is_zero() and Y.is_zero()
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(a[i] * b[j] - a[j] * b[i]) > tol * scale:
                return False
    return True


@dataclass(frozen=True)
class Quaternion:
    """Quaternion z + w j with complex slots; j z = conj(z) j, j^2 = -1."""

    z: complex
    w: complex

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.z * other.z - self.w * np.conj(other.w),
            self.z * other.w + self.w * np.conj(other.z),
        )

    def conjugate(self) -> "Quaternion":
        return Quaternion(complex(self.z).conjugate(), -self.w)

    def norm_sq(self) -> float:
        return abs(self.z) ** 2 + abs(self.w) ** 2

    def inverse(self) -> "Quaternion":
        n = self.norm_sq()
        if n == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conjugate()
        return Quaternion(c.z / n, c.w / n)

    def is_zero(self) -> bool:
        return self.z == 0 and self.w == 0


def hopf(p: Sequence[complex]) -> tuple[Quaternion, Quaternion]:
    """Assemble [f, g, h, k] into the quaternion pair [f + g j, h + k j].

    The pair is homogeneous up to a common right quaternion factor.
    """
    f, g, h, k = (complex(c) for c in p)
    if f == 0 and g == 0 and h == 0 and k == 0:
        raise ZeroPoint("zero homogeneous coordinates")
    return Quaternion(f, g), Quaternion(h, k)


def in_N5(p: Sequence[complex], tol: float = DEFAULT_NULL_TOL) -> bool:
    """Membership in the null hypersurface: Re(conj(h) f + k conj(g)) = 0."""
    f, g, h, k = (complex(c) for c in p)
    n = abs(f) ** 2 + abs(g) ** 2 + abs(h) ** 2 + abs(k) ** 2
    if n == 0.0:
        raise ZeroPoint("zero homogeneous coordinates")
    value = 2.0 * (np.conj(h) * f + k * np.conj(g)).real
    return abs(value) <= tol * n


def uvq(x: MinkVec) -> tuple[float, float, complex]:
    return (x.t + x.x1, x.t - x.x1, complex(x.x2, x.x3))


def incidence_residual(X: Twistor, x: MinkVec) -> tuple[complex, complex]:
    """The pair (r, s); both vanish exactly when x is incident with X."""
    u, v, q = uvq(x)
    r = u * X.eta0 + q * X.eta1 + 1j * X.xi0
    s = np.conj(q) * X.eta0 + v * X.eta1 + 1j * X.xi1
    return complex(r), complex(s)


def ray_through(
    X: Twistor, tol: float = DEFAULT_NULL_TOL
) -> tuple[MinkVec, MinkVec]:
    """A real incident point and the null direction of the ray defined by X.

    Shifting an incident point by delta keeps r = s = 0 exactly when the
    position matrix of delta annihilates (eta0', eta1'), which forces
    delta = rho (x) conj(rho) with rho = (conj(eta1'), -conj(eta0')).  The
    point is the minimum-norm solution of the rank-deficient real system.
    """
    if not is_null(X, tol):
        raise NotNull("twistor does not define a real light ray")
    eta = np.array([X.eta0, X.eta1], dtype=complex)
    if np.all(eta == 0):
        raise EtaZero("twistor with zero primed part defines no finite ray")
    # r and s as complex-linear forms in the real coordinates (t, x1, x2, x3).
    rows = np.array(
        [
            [X.eta0, X.eta0, X.eta1, 1j * X.eta1],
            [X.eta1, -X.eta1, X.eta0, -1j * X.eta0],
        ],
        dtype=complex,
    )
    rhs = np.array([-1j * X.xi0, -1j * X.xi1], dtype=complex)
    A = np.vstack([rows.real, rows.imag])
    b = np.concatenate([rhs.real, rhs.imag])
    point, *_ = np.linalg.lstsq(A, b, rcond=None)
    rho = np.array([np.conj(X.eta1), -np.conj(X.eta0)], dtype=complex)
    direction_mat = SpinMat(np.outer(rho, rho.conj()), Role.DIRECTION)
    direction = spinmat_to_vec(direction_mat)
    return MinkVec(*point), direction


@dataclass(frozen=True, eq=False)
class Poly2D:
    """Bivariate polynomial sum_{i,j} c[i, j] z^i w^j with exact derivatives."""

    coeffs: np.ndarray

    def __init__(self, coeffs):
        c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: complex) -> "Poly2D":
        return cls([[value]])

    @classmethod
    def z(cls) -> "Poly2D":
        return cls([[0.0], [1.0]])

    @classmethod
    def w(cls) -> "Poly2D":
        return cls([[0.0, 1.0]])

    @classmethod
    def from_json(cls, arr) -> "Poly2D":
        rows = [[complex(p[0], p[1]) for p in row] for row in arr]
        width = max(len(r) for r in rows)
        padded = [r + [0j] * (width - len(r)) for r in rows]
        return cls(padded)

    def __call__(self, z: complex, w: complex) -> complex:
        # Horner in z on rows evaluated in w; cheaper than polyval2d here.
        c = self.coeffs
        acc = 0.0 + 0.0j
        for i in range(c.shape[0] - 1, -1, -1):
            row = 0.0 + 0.0j
            for j in range(c.shape[1] - 1, -1, -1):
                row = row * w + c[i, j]
            acc = acc * z + row
        return acc

    def dz(self) -> "Poly2D":
        cached = getattr(self, "_dz", None)
        if cached is None:
            if self.coeffs.shape[0] == 1:
                cached = Poly2D([[0.0]])
            else:
                cached = Poly2D(npp.polyder(self.coeffs, axis=0))
            object.__setattr__(self, "_dz", cached)
        return cached

    def dw(self) -> "Poly2D":
        cached = getattr(self, "_dw", None)
        if cached is None:
            if self.coeffs.shape[1] == 1:
                cached = Poly2D([[0.0]])
            else:
                cached = Poly2D(npp.polyder(self.coeffs, axis=1))
            object.__setattr__(self, "_dw", cached)
        return cached

    def __mul__(self, other: "Poly2D") -> "Poly2D":
        a, b = self.coeffs, other.coeffs
        out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), complex)
        for i in range(a.shape[0]):
            for j in range(a.shape[1]):
                if a[i, j] != 0:
                    out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
        return Poly2D(out)

    def __sub__(self, other: "Poly2D") -> "Poly2D":
        rows = max(self.coeffs.shape[0], other.coeffs.shape[0])
        cols = max(self.coeffs.shape[1], other.coeffs.shape[1])
        out = np.zeros((rows, cols), complex)
        out[: self.coeffs.shape[0], : self.coeffs.shape[1]] += self.coeffs
        out[: other.coeffs.shape[0], : other.coeffs.shape[1]] -= other.coeffs
        return Poly2D(out)

    def degrees(self) -> tuple[int, int]:
        return (self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1)


@dataclass(frozen=True, eq=False)
class TwistorSurface:
    """Polynomial chart (z, w) -> [xi0, xi1, eta0', eta1'] into twistor space.

    Normal form means the third slot is exactly z and the fourth exactly 1.
    """

    slots: tuple[Poly2D, Poly2D, Poly2D, Poly2D]
    normal_form: bool = False

    @classmethod
    def normal(cls, a: Poly2D, b: Poly2D) -> "TwistorSurface":
        return cls((a, b, Poly2D.z(), Poly2D.constant(1.0)), normal_form=True)

    @classmethod
    def from_json(cls, obj: dict) -> "TwistorSurface":
        slots = tuple(Poly2D.from_json(arr) for arr in obj["slots"])
        if len(slots) != 4:
            raise ValueError("surface needs exactly four slots")
        return cls(slots, normal_form=bool(obj.get("normal_form", False)))

    def point(self, z: complex, w: complex) -> Twistor:
        return Twistor(*(p(z, w) for p in self.slots))

    def partials(self, z: complex, w: complex) -> tuple[np.ndarray, np.ndarray]:
        dz = np.array([p.dz()(z, w) for p in self.slots], dtype=complex)
        dw = np.array([p.dw()(z, w) for p in self.slots], dtype=complex)
        return dz, dw

    def regular_at(self, z: complex, w: complex, tol: float = 1e-12) -> bool:
        """Rank-2 test of the 2x4 chart Jacobian."""
        dz, dw = self.partials(z, w)
        J = np.vstack([dz, dw])
        sv = np.linalg.svd(J, compute_uv=False)
        return bool(sv[1] > tol * max(1.0, sv[0]))


@dataclass(frozen=True, eq=False)
class CallableSurface:
    """Holomorphic chart given by black-box slot evaluators.

    Partials use central differences with a moderate complex step; the tiny
    imaginary-step trick does not apply to holomorphic maps evaluated at
    complex points, where it cancels catastrophically.
    """

    fns: tuple[Callable[[complex, complex], complex], ...]
    step: float = 1e-6

    def point(self, z: complex, w: complex) -> Twistor:
        return Twistor(*(f(z, w) for f in self.fns))

    def partials(self, z: complex, w: complex) -> tuple[np.ndarray, np.ndarray]:
        h = self.step
        dz = np.array(
            [(f(z + h, w) - f(z - h, w)) / (2.0 * h) for f in self.fns], complex
        )
        dw = np.array(
            [(f(z, w + h) - f(z, w - h)) / (2.0 * h) for f in self.fns], complex
        )
        return dz, dw


def check_prop_condition(S, samples: Sequence[tuple[complex, complex]],
                         tol: float = 1e-9) -> bool:
    """True when d/dw (eta0'/eta1') vanishes at every sample.

    For polynomial surfaces the derivative numerator c_w d - c d_w is exact.
    """
    if isinstance(S, TwistorSurface):
        c, d = S.slots[2], S.slots[3]
        num = c.dw() * d - c * d.dw()
        for z, w in samples:
            dv = d(z, w)
            if abs(dv) <= 1e-12:
                raise EtaDenominatorZero(f"eta1' vanishes at (z, w)=({z!r}, {w!r})")
            if abs(num(z, w)) > tol * abs(dv) ** 2:
                return False
        return True
    for z, w in samples:
        _, dw = S.partials(z, w)
        X = S.point(z, w)
        if abs(X.eta1) <= 1e-12:
            raise EtaDenominatorZero(f"eta1' vanishes at (z, w)=({z!r}, {w!r})")
        value = (dw[2] * X.eta1 - X.eta0 * dw[3]) / X.eta1**2
        if abs(value) > tol:
            return False
    return True


@dataclass(frozen=True, eq=False)
class NormalChart:
    """Numeric normal-form chart produced by normalize_chart."""

    surface: object
    pivot: int  # 0: first slot drives w~, 1: second slot
    base: tuple[complex, complex]

    def _divided(self, z: complex, w: complex) -> np.ndarray:
        X = self.surface.point(z, w).coords
        return X / X[3]

    def _divided_partials(self, z: complex, w: complex) -> tuple[np.ndarray, np.ndarray]:
        X = self.surface.point(z, w).coords
        dz, dw = self.surface.partials(z, w)
        d = X[3]
        return (dz * d - X * dz[3]) / d**2, (dw * d - X * dw[3]) / d**2

    def evaluate(self, zt: complex, wt: complex,
                 tol: float = NEWTON_TOL, max_iter: int = 50) -> tuple[Twistor, complex, complex]:
        """Chart point for target (z~, w~); returns (twistor, z, w).

        The twistor has third slot z~ and fourth slot 1 (up to the Newton
        tolerance) and agrees projectively with the underlying surface.
        """
        z, w = self.base
        k = self.pivot
        for _ in range(max_iter):
            div = self._divided(z, w)
            F = np.array([div[2] - zt, div[k] - wt])
            if max(abs(F[0]), abs(F[1])) <= tol:
                break
            dz, dw = self._divided_partials(z, w)
            J = np.array([[dz[2], dw[2]], [dz[k], dw[k]]], dtype=complex)
            det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
            if det == 0.0:
                raise SingularChart("chart Jacobian became singular")
            step = np.linalg.solve(J, F)
            z, w = z - step[0], w - step[1]
        else:
            raise NewtonDiverged("chart inversion did not converge")
        div = self._divided(z, w)
        return Twistor(*div), z, w


def normalize_chart(S, base: tuple[complex, complex] = (0j, 0j),
                    minor_tol: float = 1e-10) -> NormalChart:
    """Local reparameterization bringing a surface to normal form.

    New parameters are z~ = eta0'/eta1' and w~ = one of xi0/eta1', xi1/eta1',
    chosen by the larger nonvanishing Jacobian minor at the base point.
    """
    z0, w0 = base
    X = S.point(z0, w0).coords
    if abs(X[3]) <= 1e-12:
        raise EtaDenominatorZero("eta1' vanishes at the base point")
    chart_probe = NormalChart(S, 0, (z0, w0))
    dz, dw = chart_probe._divided_partials(z0, w0)
    minors = [
        dz[2] * dw[0] - dw[2] * dz[0],  # (eta0', xi0)
        dz[2] * dw[1] - dw[2] * dz[1],  # (eta0', xi1)
    ]
    scale = max(1.0, float(np.max(np.abs(np.concatenate([dz, dw])))))**2
    pick = 0 if abs(minors[0]) >= abs(minors[1]) else 1
    if abs(minors[pick]) <= minor_tol * scale:
        raise SingularChart("both reparameterization minors vanish at base")
    return NormalChart(S, pick, (z0, w0))


def _rs_and_partials(S, z: complex, w: complex, x: MinkVec):
    u, v, q = uvq(x)
    X = S.point(z, w).coords
    dz, dw = S.partials(z, w)
    r = u * X[2] + q * X[3] + 1j * X[0]
    s = np.conj(q) * X[2] + v * X[3] + 1j * X[1]
    rz = u * dz[2] + q * dz[3] + 1j * dz[0]
    rw = u * dw[2] + q * dw[3] + 1j * dw[0]
    sz = np.conj(q) * dz[2] + v * dz[3] + 1j * dz[1]
    sw = np.conj(q) * dw[2] + v * dw[3] + 1j * dw[1]
    return r, s, rz, rw, sz, sw


@dataclass(frozen=True)
class IncidenceRoot:
    z: complex
    w: complex
    seed_index: int
    bracket: complex


def solve_incidence(
    S,
    x: MinkVec,
    seed: Optional[tuple[complex, complex]] = None,
    tol: float = NEWTON_TOL,
    max_iter: int = 50,
    bracket_tol: float = BRACKET_TOL,
) -> IncidenceRoot:
    """Newton solve of r(z, w; x) = s(z, w; x) = 0 along the surface.

    Seeds: the caller seed first, then the fixed lattice; the first
    convergent root wins and its seed index is reported for
    reproducibility.  A vanishing Jacobian bracket r_z s_w - s_z r_w at the
    root raises SingularBracket.
    """
    seeds = ([seed] if seed is not None else []) + list(SEED_LATTICE)
    for idx, (z0, w0) in enumerate(seeds):
        z, w = complex(z0), complex(w0)
        converged = False
        for _ in range(max_iter):
            r, s, rz, rw, sz, sw = _rs_and_partials(S, z, w, x)
            if max(abs(r), abs(s)) <= tol:
                converged = True
                # Polish once more unless already at machine floor.
                if max(abs(r), abs(s)) <= 1e-15:
                    break
            det = rz * sw - sz * rw
            if det == 0.0:
                break
            dz = (r * sw - s * rw) / det
            dw_ = (s * rz - r * sz) / det
            z, w = z - dz, w - dw_
            if converged and max(abs(dz), abs(dw_)) <= 1e-15 * (1.0 + abs(z) + abs(w)):
                break
        r, s, rz, rw, sz, sw = _rs_and_partials(S, z, w, x)
        if max(abs(r), abs(s)) <= tol:
            bracket = rz * sw - sz * rw
            jscale = max(abs(rz), abs(rw), abs(sz), abs(sw), 1e-30) ** 2
            if abs(bracket) <= bracket_tol * jscale:
                raise SingularBracket(
                    f"bracket {bracket!r} vanishes at the incidence root"
                )
            return IncidenceRoot(z, w, idx, bracket)
    raise NewtonDiverged(f"incidence solve failed at x={x}")


def incidence_partials(
    S, z: complex, w: complex, x: MinkVec, bracket_tol: float = BRACKET_TOL
) -> tuple[complex, complex, complex, complex]:
    """Closed-form partials of the solved z against u, v, q, conj(q).

    (z_u, z_v, z_q, z_qbar) = (-s_w eta0', r_w eta1', -s_w eta1', r_w eta0')
    divided by the bracket; they satisfy z_u z_v - z_q z_qbar = 0.
    """
    X = S.point(z, w).coords
    _, _, rz, rw, sz, sw = _rs_and_partials(S, z, w, x)
    bracket = rz * sw - sz * rw
    jscale = max(abs(rz), abs(rw), abs(sz), abs(sw), 1e-30) ** 2
    if abs(bracket) <= bracket_tol * jscale:
        raise SingularBracket("bracket vanishes; implicit partials undefined")
    return (
        -sw * X[2] / bracket,
        rw * X[3] / bracket,
        -sw * X[3] / bracket,
        rw * X[2] / bracket,
    )


def gradient_from_uvq(partials: tuple[complex, complex, complex, complex]) -> np.ndarray:
    """Convert (z_u, z_v, z_q, z_qbar) to partials along (t, x1, x2, x3)."""
    zu, zv, zq, zqb = partials
    return np.array(
        [zu + zv, zu - zv, zq + zqb, 1j * (zq - zqb)], dtype=complex
    )


def surface_field(
    S,
    label: str,
    domain: Box,
    seed: Optional[tuple[complex, complex]] = None,
) -> ScalarField:
    """The incidence solution z(x) as a scalar field with analytic gradient.

    Per-point solves use the same seed, so evaluation is deterministic and
    bitwise reproducible; results are memoized.
    """

    @lru_cache(maxsize=200_000)
    def solve(x: MinkVec) -> IncidenceRoot:
        return solve_incidence(S, x, seed=seed)

    def evaluate(x: MinkVec) -> complex:
        return solve(x).z

    @lru_cache(maxsize=200_000)
    def grad(x: MinkVec):
        root = solve(x)
        return gradient_from_uvq(incidence_partials(S, root.z, root.w, x))

    return ScalarField(label, evaluate, analytic_gradient=grad, domain=domain)
