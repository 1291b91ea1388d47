"""Null solutions from meromorphic data.

A triple of rational functions (f, g, h) of one complex variable
parameterizes a holomorphic curve of null 4-vectors

    (i*xi1, xi2, xi3, xi4) = (1/(2h)) * (1 - f^2 - g^2, i(1 + f^2 + g^2), -2f, -2g),

which satisfies xi1^2 - xi2^2 - xi3^2 - xi4^2 = 0 identically.  Solving the
implicit equation xi(z).x = 1 (dot = xi1*t + xi2*x1 + xi3*x2 + xi4*x3) gives
a null solution z(x) of the wave equation with closed-form gradient
dz/dx_j = -xi_j / (xi'(z).x) and an induced spinor field pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import numpy.polynomial.polynomial as npp

from .errors import (
    DegenerateEquation,
    NoRootFound,
    PoleAt,
    SingularDenominator,
    ZeroH,
)
from .fields import Box, ScalarField
from .spinor import MinkVec, Spinor, Variance

CANCEL_TOL = 1e-12
POLE_TOL = 1e-12
ROOT_TOL = 1e-12

# Deterministic fallback seeds for Newton on higher-degree implicit equations.
SEED_LATTICE = tuple(
    complex(a, b) for a in (-2.0, -1.0, 0.0, 1.0, 2.0) for b in (-2.0, -1.0, 0.0, 1.0, 2.0)
)


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    top = np.max(np.abs(c)) if c.size else 0.0
    if top == 0.0:
        return np.zeros(1, dtype=complex)
    keep = c.size
    while keep > 1 and abs(c[keep - 1]) <= 1e-14 * top:
        keep -= 1
    return c[:keep].copy()


def _poly_roots(c: np.ndarray) -> np.ndarray:
    c = _trim(c)
    if c.size <= 1:
        return np.array([], dtype=complex)
    return np.roots(c[::-1])


@dataclass(frozen=True, eq=False)
class RationalFn:
    """Rational function num(z)/den(z), coefficients in ascending powers.

    Normalized on construction: trailing zeros trimmed, denominator monic,
    common roots cancelled within CANCEL_TOL.
    """

    num: np.ndarray
    den: np.ndarray

    def __init__(self, num: Sequence[complex], den: Sequence[complex] = (1.0,)):
        num = _trim(np.asarray(num, dtype=complex))
        den = _trim(np.asarray(den, dtype=complex))
        if den.size == 1 and den[0] == 0.0:
            raise ZeroDivisionError("rational function with zero denominator")
        if np.all(num == 0.0):
            num = np.zeros(1, dtype=complex)
            den = np.ones(1, dtype=complex)
        else:
            num, den = self._cancel(num, den)
        lead = den[-1]
        num = num / lead
        den = den / lead
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        self.num.setflags(write=False)
        self.den.setflags(write=False)

    @staticmethod
    def _cancel(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if num.size < 2 or den.size < 2:
            return num, den
        den_roots = list(_poly_roots(den))
        for r in _poly_roots(num):
            for k, s in enumerate(den_roots):
                if abs(r - s) <= CANCEL_TOL * (1.0 + abs(r)):
                    num = _trim(npp.polydiv(num, np.array([-s, 1.0]))[0])
                    den = _trim(npp.polydiv(den, np.array([-s, 1.0]))[0])
                    den_roots.pop(k)
                    break
        return num, den

    @classmethod
    def constant(cls, c: complex) -> "RationalFn":
        return cls([c])

    @classmethod
    def identity(cls) -> "RationalFn":
        return cls([0.0, 1.0])

    @classmethod
    def from_json(cls, obj: dict) -> "RationalFn":
        def coeffs(arr):
            return [complex(p[0], p[1]) for p in arr]

        return cls(coeffs(obj["num"]), coeffs(obj.get("den", [[1.0, 0.0]])))

    def to_json(self) -> dict:
        pair = lambda c: [float(c.real), float(c.imag)]  # noqa: E731
        return {"num": [pair(c) for c in self.num], "den": [pair(c) for c in self.den]}

    def degree(self) -> tuple[int, int]:
        return (self.num.size - 1, self.den.size - 1)

    def is_constant(self) -> bool:
        return self.num.size == 1 and self.den.size == 1

    def poles(self) -> np.ndarray:
        return _poly_roots(self.den)

    def _den_scale(self, z: complex) -> float:
        return float(npp.polyval(abs(z), np.abs(self.den))) + 1.0

    def __call__(self, z: complex) -> complex:
        dv = npp.polyval(z, self.den)
        if abs(dv) <= POLE_TOL * self._den_scale(z):
            raise PoleAt(f"evaluation at pole z={z!r}")
        return complex(npp.polyval(z, self.num) / dv)

    def derivative(self) -> "RationalFn":
        dn = npp.polyder(self.num) if self.num.size > 1 else np.zeros(1)
        dd = npp.polyder(self.den) if self.den.size > 1 else np.zeros(1)
        num = npp.polysub(npp.polymul(dn, self.den), npp.polymul(self.num, dd))
        return RationalFn(num, npp.polymul(self.den, self.den))

    def __add__(self, other: "RationalFn") -> "RationalFn":
        other = _as_rational(other)
        num = npp.polyadd(
            npp.polymul(self.num, other.den), npp.polymul(other.num, self.den)
        )
        return RationalFn(num, npp.polymul(self.den, other.den))

    def __sub__(self, other: "RationalFn") -> "RationalFn":
        other = _as_rational(other)
        num = npp.polysub(
            npp.polymul(self.num, other.den), npp.polymul(other.num, self.den)
        )
        return RationalFn(num, npp.polymul(self.den, other.den))

    def __mul__(self, other) -> "RationalFn":
        other = _as_rational(other)
        return RationalFn(
            npp.polymul(self.num, other.num), npp.polymul(self.den, other.den)
        )

    def __rmul__(self, other) -> "RationalFn":
        return self.__mul__(other)

    def __truediv__(self, other) -> "RationalFn":
        other = _as_rational(other)
        return RationalFn(
            npp.polymul(self.num, other.den), npp.polymul(self.den, other.num)
        )

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)


def _as_rational(v) -> RationalFn:
    if isinstance(v, RationalFn):
        return v
    return RationalFn.constant(complex(v))


@dataclass(frozen=True, eq=False)
class MeromorphicTriple:
    """The defining data (f, g, h) of the null-curve parameterization."""

    f: RationalFn
    g: RationalFn
    h: RationalFn

    @classmethod
    def from_json(cls, obj: dict) -> "MeromorphicTriple":
        return cls(
            RationalFn.from_json(obj["f"]),
            RationalFn.from_json(obj["g"]),
            RationalFn.from_json(obj["h"]),
        )

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "g": self.g.to_json(), "h": self.h.to_json()}

    def xi_rationals(self) -> tuple[RationalFn, RationalFn, RationalFn, RationalFn]:
        """The four components of xi(z) as rational functions."""
        one = RationalFn.constant(1.0)
        s = self.f * self.f + self.g * self.g
        inv2h = one / (2.0 * self.h)
        xi1 = (-1j) * (one - s) * inv2h
        xi2 = 1j * (one + s) * inv2h
        xi3 = (-1.0) * self.f / self.h
        xi4 = (-1.0) * self.g / self.h
        return xi1, xi2, xi3, xi4

    def _data(self) -> "_TripleData":
        # Per-point solves reuse the coefficient stacks; built lazily once.
        cached = getattr(self, "_cached_data", None)
        if cached is None:
            cached = _TripleData.build(self)
            object.__setattr__(self, "_cached_data", cached)
        return cached


@dataclass(frozen=True, eq=False)
class _TripleData:
    """Common-denominator form xi_j = N_j / D plus derivative stacks."""

    N: np.ndarray  # (4, L) numerator coefficients, ascending
    D: np.ndarray
    dN: np.ndarray  # (4, L') derivatives of the numerators
    dD: np.ndarray

    @classmethod
    def build(cls, T: MeromorphicTriple) -> "_TripleData":
        rats = T.xi_rationals()
        D = np.ones(1, dtype=complex)
        for r in rats:
            D = npp.polymul(D, r.den)
        nums = []
        for j, r in enumerate(rats):
            nj = r.num
            for k, other in enumerate(rats):
                if k != j:
                    nj = npp.polymul(nj, other.den)
            nums.append(_trim(nj))
        D = _trim(D)
        width = max(max(n.size for n in nums), D.size)
        N = np.zeros((4, width), dtype=complex)
        for j, n in enumerate(nums):
            N[j, : n.size] = n
        Dp = np.zeros(width, dtype=complex)
        Dp[: D.size] = D
        dN = np.zeros((4, max(width - 1, 1)), dtype=complex)
        for j in range(4):
            der = npp.polyder(N[j]) if width > 1 else np.zeros(1)
            dN[j, : der.size] = der
        dD = np.zeros(max(width - 1, 1), dtype=complex)
        der = npp.polyder(Dp) if width > 1 else np.zeros(1)
        dD[: der.size] = der
        return cls(N, Dp, dN, dD)

    def dot_num(self, x: MinkVec) -> np.ndarray:
        """Coefficients of sum_j x_j N_j."""
        return x.as_array() @ self.N

    def dot_dnum(self, x: MinkVec) -> np.ndarray:
        return x.as_array() @ self.dN


def weierstrass_xi(T: MeromorphicTriple, z: complex) -> np.ndarray:
    """Evaluate the null curve xi(z); xi1^2 = xi2^2 + xi3^2 + xi4^2."""
    fv, gv = T.f(z), T.g(z)
    hv_den = npp.polyval(z, T.h.den)
    if abs(hv_den) <= POLE_TOL * T.h._den_scale(z):
        raise PoleAt(f"h has a pole at z={z!r}")
    hv = complex(npp.polyval(z, T.h.num) / hv_den)
    if abs(hv) <= POLE_TOL * (1.0 + abs(z)):
        raise ZeroH(f"h vanishes at z={z!r}")
    s = fv * fv + gv * gv
    return np.array(
        [
            -1j * (1.0 - s) / (2.0 * hv),
            1j * (1.0 + s) / (2.0 * hv),
            -fv / hv,
            -gv / hv,
        ],
        dtype=complex,
    )


def _xi_dot(T: MeromorphicTriple, z: complex, x: MinkVec) -> complex:
    xi = weierstrass_xi(T, z)
    return complex(xi @ x.as_array())


def implicit_residual_poly(T: MeromorphicTriple, x: MinkVec) -> np.ndarray:
    """Cleared numerator of xi(z).x - 1: sum_j x_j N_j(z) - D(z)."""
    data = T._data()
    return _trim(data.dot_num(x) - data.D)


def _stable_quadratic_roots(c0: complex, c1: complex, c2: complex) -> list[complex]:
    """Roots of c2 z^2 + c1 z + c0 with cancellation-safe branch choice."""
    if c2 == 0.0:
        return [] if c1 == 0.0 else [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    sq = np.sqrt(complex(disc))
    if (np.conj(c1) * sq).real < 0.0:
        sq = -sq
    qq = -(c1 + sq) / 2.0
    roots = []
    roots.append(qq / c2)
    roots.append(c0 / qq if qq != 0.0 else -c1 / c2 - roots[0])
    return roots


def _polish(T: MeromorphicTriple, x: MinkVec, z: complex) -> complex:
    for _ in range(8):
        try:
            r = _xi_dot(T, z, x) - 1.0
        except (PoleAt, ZeroH):
            return z
        if abs(r) <= 1e-15:
            break
        try:
            d = _xi_prime_dot(T, z, x)
        except ZeroDivisionError:
            return z
        if d == 0.0:
            break
        z = z - r / d
    return z


@dataclass(frozen=True)
class KerrRoot:
    """A solved implicit root with its deterministic branch index."""

    z: complex
    branch: int
    residual: float


def kerr_solve(
    T: MeromorphicTriple,
    x: MinkVec,
    seed: Optional[complex] = None,
    tol: float = ROOT_TOL,
    max_iter: int = 50,
) -> KerrRoot:
    """Solve xi(z).x = 1 for z.

    Cleared to a polynomial: degree <= 2 uses the closed formula, higher
    degrees run Newton from the caller seed plus a fixed seed lattice.  Among
    admissible roots the one nearest the caller seed wins; without a seed
    the deterministic ordering by (Re, Im) applies.  The returned branch
    index refers to that ordering.
    """
    poly = implicit_residual_poly(T, x)
    deg = poly.size - 1
    if deg == 0:
        raise DegenerateEquation("xi(z).x - 1 does not depend on z")
    if deg == 1:
        candidates = [-poly[0] / poly[1]]
    elif deg == 2:
        candidates = _stable_quadratic_roots(poly[0], poly[1], poly[2])
    else:
        dpoly = npp.polyder(poly)
        found: list[complex] = []
        seeds = ([seed] if seed is not None else []) + list(SEED_LATTICE)
        for s in seeds:
            z = complex(s)
            for _ in range(max_iter):
                fv = npp.polyval(z, poly)
                dv = npp.polyval(z, dpoly)
                if dv == 0.0:
                    break
                step = fv / dv
                z -= step
                if abs(step) <= 1e-14 * (1.0 + abs(z)):
                    break
            if abs(npp.polyval(z, poly)) <= 1e-9 * (1.0 + float(np.max(np.abs(poly)))):
                if not any(abs(z - r) <= 1e-9 * (1.0 + abs(z)) for r in found):
                    found.append(z)
        candidates = found

    admissible: list[tuple[complex, float]] = []
    for z in candidates:
        z = _polish(T, x, z)
        try:
            r = abs(_xi_dot(T, z, x) - 1.0)
        except (PoleAt, ZeroH):
            continue
        if r <= tol:
            admissible.append((z, r))
    if not admissible:
        raise NoRootFound(f"no admissible root at x={x}")
    admissible.sort(key=lambda zr: (round(zr[0].real, 12), round(zr[0].imag, 12)))
    if seed is not None:
        best = min(range(len(admissible)), key=lambda k: abs(admissible[k][0] - seed))
    else:
        best = 0
    z, r = admissible[best]
    return KerrRoot(z, best, r)


def _xi_prime_dot(T: MeromorphicTriple, z: complex, x: MinkVec) -> complex:
    """(xi'(z)).x evaluated via the common-denominator stacks."""
    data = T._data()
    dv = npp.polyval(z, data.D)
    if abs(dv) <= 1e-300:
        raise ZeroDivisionError("common denominator vanishes")
    num = npp.polyval(z, data.dot_num(x))
    dnum = npp.polyval(z, data.dot_dnum(x))
    dden = npp.polyval(z, data.dD)
    return complex((dnum * dv - num * dden) / dv**2)


def kerr_gradient(T: MeromorphicTriple, z: complex, x: MinkVec) -> np.ndarray:
    """Closed-form partials dz/dx_j = -xi_j / (xi'(z).x)."""
    d = _xi_prime_dot(T, z, x)
    if abs(d) <= 1e-12:
        raise SingularDenominator(f"xi'(z).x vanishes at z={z!r}")
    return -weierstrass_xi(T, z) / d


def kerr_spinors(
    T: MeromorphicTriple, z: complex, x: MinkVec
) -> tuple[Spinor, Spinor]:
    """The induced spinor pair at one point.

    xi_A = kappa (f - i g, i), eta_{A'} = kappa (-i f + g, 1) with
    kappa = 1 / sqrt(sqrt(2) h (xi'(z).x)), principal square root.  The outer
    product xi_A eta_{A'} equals the spinor gradient matrix of z(x).
    """
    d = _xi_prime_dot(T, z, x)
    hv = T.h(z)
    denom = np.sqrt(2.0) * hv * d
    if abs(denom) <= 1e-12:
        raise SingularDenominator("sqrt(2) h (xi'(z).x) vanishes")
    kappa = 1.0 / np.sqrt(complex(denom))
    fv, gv = T.f(z), T.g(z)
    xi = Spinor(kappa * (fv - 1j * gv), kappa * 1j, Variance.LOWER_UNPRIMED)
    eta = Spinor(kappa * (-1j * fv + gv), kappa, Variance.LOWER_PRIMED)
    return xi, eta


def kerr_xi_ratio(T: MeromorphicTriple, z: complex) -> tuple[complex, complex]:
    """Homogeneous unprimed direction ratio xi^0/xi^1 = -i / (f - i g)."""
    return (-1j, T.f(z) - 1j * T.g(z))


def kerr_eta_ratio(T: MeromorphicTriple, z: complex) -> tuple[complex, complex]:
    """Homogeneous primed direction ratio eta^0'/eta^1' = 1 / (i f - g)."""
    return (1.0 + 0.0j, 1j * T.f(z) - T.g(z))


def kerr_field(
    T: MeromorphicTriple,
    label: str,
    domain: Box,
    seed: complex,
) -> ScalarField:
    """The implicit solution z(x) as a scalar field with analytic gradient.

    Per-point solves are seeded identically, so evaluation is deterministic
    and bitwise reproducible regardless of call order; results are memoized.
    """

    @lru_cache(maxsize=200_000)
    def solve(x: MinkVec) -> complex:
        return kerr_solve(T, x, seed=seed).z

    def evaluate(x: MinkVec) -> complex:
        return solve(x)

    @lru_cache(maxsize=200_000)
    def grad(x: MinkVec):
        return kerr_gradient(T, solve(x), x)

    return ScalarField(label, evaluate, analytic_gradient=grad, domain=domain)


def kerr_xi_ratio_field(
    T: MeromorphicTriple, domain: Box, seed: complex
):
    """Unprimed direction ratio of the induced spinor field, with analytic
    derivatives obtained by the chain rule through the implicit solve."""
    from .sfr import DirectionRatio, RatioField

    @lru_cache(maxsize=200_000)
    def solve(x: MinkVec) -> complex:
        return kerr_solve(T, x, seed=seed).z

    def ev(x: MinkVec) -> DirectionRatio:
        num, den = kerr_xi_ratio(T, solve(x))
        return DirectionRatio(num, den)

    def grad(x: MinkVec):
        z = solve(x)
        fg = T.f(z) - 1j * T.g(z)
        dfg = T.f.derivative()(z) - 1j * T.g.derivative()(z)
        # d/dz of -i / (f - i g), then chain through dz/dx_j.
        dz_ratio = 1j * dfg / fg**2
        return dz_ratio * kerr_gradient(T, z, x)

    return RatioField(ev, analytic_gradient=grad, label="kerr:xi-ratio")


def kerr_eta_ratio_field(
    T: MeromorphicTriple, domain: Box, seed: complex
):
    """Primed direction ratio of the induced spinor field."""
    from .sfr import DirectionRatio, RatioField

    @lru_cache(maxsize=200_000)
    def solve(x: MinkVec) -> complex:
        return kerr_solve(T, x, seed=seed).z

    def ev(x: MinkVec) -> DirectionRatio:
        num, den = kerr_eta_ratio(T, solve(x))
        return DirectionRatio(num, den)

    def grad(x: MinkVec):
        z = solve(x)
        fg = 1j * T.f(z) - T.g(z)
        dfg = 1j * T.f.derivative()(z) - T.g.derivative()(z)
        dz_ratio = -dfg / fg**2
        return dz_ratio * kerr_gradient(T, z, x)

    return RatioField(ev, analytic_gradient=grad, label="kerr:eta-ratio")


def kerr_pair_field(T: MeromorphicTriple, domain: Box, seed: complex):
    """The induced spinor pair as fields of x (solving z per point)."""
    from .fields import SpinorFieldPair

    @lru_cache(maxsize=200_000)
    def pair_at(x: MinkVec):
        z = kerr_solve(T, x, seed=seed).z
        return kerr_spinors(T, z, x)

    return SpinorFieldPair(
        lambda x: pair_at(x)[0],
        lambda x: pair_at(x)[1],
        label="kerr:pair",
        gauge_note="principal square-root scale",
    )
