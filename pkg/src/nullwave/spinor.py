"""Two-component spinor algebra over Minkowski space.

Machine-precision primitives: the vector <-> 2x2 matrix correspondence,
index raising and lowering with the skew form, rank-1 decomposition of
null vectors, and the annihilator solve used by kernel membership tests.

Conventions (signature -+++, coordinates t, x1, x2, x3):

    vector  ->  (1/sqrt 2) [[t+x1, x2+i*x3], [x2-i*x3, t-x1]]
    raise:      up = (low_1, -low_0);   lower: low = (-up_1, up_0)

so a real vector corresponds to a Hermitian matrix, and the determinant of
the matrix equals (t^2 - x1^2 - x2^2 - x3^2) / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    NonHermitian,
    NotAnnihilated,
    NotNull,
    VarianceMismatch,
    ZeroVector,
)

SQRT2 = math.sqrt(2.0)

DEFAULT_NULL_TOL = 1e-9
DEFAULT_HERM_TOL = 1e-9
DEFAULT_ANNIHILATE_TOL = 1e-9


class Variance(Enum):
    """Index position of a spinor: lower/upper, unprimed/primed."""

    LOWER_UNPRIMED = "lower-unprimed"
    UPPER_UNPRIMED = "upper-unprimed"
    LOWER_PRIMED = "lower-primed"
    UPPER_PRIMED = "upper-primed"

    @property
    def is_upper(self) -> bool:
        return self in (Variance.UPPER_UNPRIMED, Variance.UPPER_PRIMED)

    @property
    def is_primed(self) -> bool:
        return self in (Variance.LOWER_PRIMED, Variance.UPPER_PRIMED)

    @property
    def flipped(self) -> "Variance":
        return _FLIP[self]


_FLIP = {
    Variance.LOWER_UNPRIMED: Variance.UPPER_UNPRIMED,
    Variance.UPPER_UNPRIMED: Variance.LOWER_UNPRIMED,
    Variance.LOWER_PRIMED: Variance.UPPER_PRIMED,
    Variance.UPPER_PRIMED: Variance.LOWER_PRIMED,
}


class Role(Enum):
    """Semantic tag for a 2x2 spinor-index matrix."""

    POSITION = "position"
    GRADIENT = "gradient"
    DIRECTION = "direction"


@dataclass(frozen=True)
class MinkVec:
    """Real 4-vector (t, x1, x2, x3), signature -+++."""

    t: float
    x1: float
    x2: float
    x3: float

    @classmethod
    def of(cls, seq) -> "MinkVec":
        t, x1, x2, x3 = (float(c) for c in seq)
        return cls(t, x1, x2, x3)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.t, self.x1, self.x2, self.x3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def minkowski_norm(self) -> float:
        return -self.t**2 + self.x1**2 + self.x2**2 + self.x3**2

    def euclid_sq(self) -> float:
        return self.t**2 + self.x1**2 + self.x2**2 + self.x3**2

    def is_null(self, tol: float = DEFAULT_NULL_TOL) -> bool:
        return abs(self.minkowski_norm()) <= tol * max(1.0, self.euclid_sq())

    def offset(self, axis: int, dh: float) -> "MinkVec":
        c = list(self.as_tuple())
        c[axis] += dh
        return MinkVec(*c)

    def __add__(self, other: "MinkVec") -> "MinkVec":
        return MinkVec(self.t + other.t, self.x1 + other.x1,
                       self.x2 + other.x2, self.x3 + other.x3)

    def __sub__(self, other: "MinkVec") -> "MinkVec":
        return MinkVec(self.t - other.t, self.x1 - other.x1,
                       self.x2 - other.x2, self.x3 - other.x3)

    def scaled(self, s: float) -> "MinkVec":
        return MinkVec(s * self.t, s * self.x1, s * self.x2, s * self.x3)


@dataclass(frozen=True)
class Spinor:
    """Complex 2-component spinor with an explicit index-position tag."""

    c0: complex
    c1: complex
    variance: Variance

    @property
    def components(self) -> tuple[complex, complex]:
        return (self.c0, self.c1)

    def norm(self) -> float:
        return math.hypot(abs(self.c0), abs(self.c1))

    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0

    def conjugated(self) -> "Spinor":
        """Complex conjugation, swapping primed and unprimed."""
        v = self.variance
        target = {
            Variance.UPPER_PRIMED: Variance.UPPER_UNPRIMED,
            Variance.UPPER_UNPRIMED: Variance.UPPER_PRIMED,
            Variance.LOWER_PRIMED: Variance.LOWER_UNPRIMED,
            Variance.LOWER_UNPRIMED: Variance.LOWER_PRIMED,
        }[v]
        return Spinor(complex(self.c0).conjugate(), complex(self.c1).conjugate(), target)


def raise_index(s: Spinor) -> Spinor:
    """up = (low_1, -low_0); exact inverse of lower_index."""
    if s.variance.is_upper:
        raise VarianceMismatch(f"cannot raise {s.variance.value} spinor")
    return Spinor(s.c1, -s.c0, s.variance.flipped)


def lower_index(s: Spinor) -> Spinor:
    """low = (-up_1, up_0); exact inverse of raise_index."""
    if not s.variance.is_upper:
        raise VarianceMismatch(f"cannot lower {s.variance.value} spinor")
    return Spinor(-s.c1, s.c0, s.variance.flipped)


def contract(lower: Spinor, upper: Spinor) -> complex:
    """Natural pairing low_A up^A; antisymmetric, so contract(s, raise(s)) = 0."""
    if lower.variance.is_upper or not upper.variance.is_upper:
        raise VarianceMismatch("contract expects (lower, upper)")
    if lower.variance.is_primed != upper.variance.is_primed:
        raise VarianceMismatch("cannot contract primed with unprimed")
    return lower.c0 * upper.c0 + lower.c1 * upper.c1


def gauge_fix(c0: complex, c1: complex, variance: Variance) -> Spinor:
    """Unit-norm spinor with its largest-magnitude component real positive."""
    n = math.hypot(abs(c0), abs(c1))
    if n == 0.0:
        raise ZeroVector("cannot gauge-fix the zero spinor")
    c0, c1 = c0 / n, c1 / n
    lead = c0 if abs(c0) >= abs(c1) else c1
    phase = lead / abs(lead)
    return Spinor(c0 / phase, c1 / phase, variance)


@dataclass(frozen=True, eq=False)
class SpinMat:
    """2x2 complex matrix carrying a pair of spinor indices."""

    m: np.ndarray
    role: Role

    def __post_init__(self):
        a = np.array(self.m, dtype=complex)
        if a.shape != (2, 2):
            raise ValueError("SpinMat requires a 2x2 matrix")
        a.setflags(write=False)
        object.__setattr__(self, "m", a)

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.m))

    def det(self) -> complex:
        m = self.m
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]

    def is_zero(self) -> bool:
        return bool(np.all(self.m == 0))

    def anti_hermitian_norm(self) -> float:
        return float(np.linalg.norm(self.m - self.m.conj().T)) / 2.0


def vec_to_spinmat(v: MinkVec) -> SpinMat:
    """Position-style matrix of a real vector; Hermitian by construction."""
    t, x1, x2, x3 = v.as_tuple()
    m = np.array(
        [[t + x1, x2 + 1j * x3], [x2 - 1j * x3, t - x1]], dtype=complex
    ) / SQRT2
    return SpinMat(m, Role.POSITION)


def spinmat_to_vec(M: SpinMat, herm_tol: float = DEFAULT_HERM_TOL) -> MinkVec:
    """Invert vec_to_spinmat; rejects matrices that are not Hermitian."""
    scale = max(1.0, M.frobenius())
    if M.anti_hermitian_norm() > herm_tol * scale:
        raise NonHermitian("anti-Hermitian part exceeds tolerance")
    m = M.m
    t = ((m[0, 0] + m[1, 1]) / SQRT2).real
    x1 = ((m[0, 0] - m[1, 1]) / SQRT2).real
    x2 = ((m[0, 1] + m[1, 0]) / SQRT2).real
    x3 = ((1j * (m[1, 0] - m[0, 1])) / SQRT2).real
    return MinkVec(t, x1, x2, x3)


def null_decompose(
    v: MinkVec, null_tol: float = DEFAULT_NULL_TOL
) -> tuple[float, Spinor]:
    """Split a nonzero null vector as lam * rho (x) conj(rho).

    Returns (lam, rho) with rho an upper unprimed unit spinor gauge-fixed so
    its largest component is real positive; lam is real with the sign of t.
    """
    if v.euclid_sq() == 0.0:
        raise ZeroVector("cannot decompose the zero vector")
    if not v.is_null(null_tol):
        raise NotNull(f"vector has Minkowski norm {v.minkowski_norm()!r}")
    M = vec_to_spinmat(v).m
    # Columns of a rank-1 Hermitian matrix are multiples of rho.
    cols = [M[:, 0], M[:, 1]]
    col = max(cols, key=lambda c: float(np.linalg.norm(c)))
    rho = gauge_fix(col[0], col[1], Variance.UPPER_UNPRIMED)
    lam = float((M[0, 0] + M[1, 1]).real)  # trace, since |rho| = 1
    return lam, rho


def direction_matrix(rho: Spinor, lam: float = 1.0) -> SpinMat:
    """lam * rho^A conj(rho)^{A'} as a direction-role matrix."""
    if rho.variance is not Variance.UPPER_UNPRIMED:
        raise VarianceMismatch("direction_matrix expects an upper unprimed spinor")
    r = np.array(rho.components, dtype=complex)
    return SpinMat(lam * np.outer(r, r.conj()), Role.DIRECTION)


def outer_lower(xi: Spinor, eta: Spinor) -> SpinMat:
    """xi_A eta_{A'} as a gradient-role matrix."""
    if xi.variance is not Variance.LOWER_UNPRIMED:
        raise VarianceMismatch("outer_lower expects a lower unprimed first factor")
    if eta.variance is not Variance.LOWER_PRIMED:
        raise VarianceMismatch("outer_lower expects a lower primed second factor")
    a = np.array(xi.components, dtype=complex)
    b = np.array(eta.components, dtype=complex)
    return SpinMat(np.outer(a, b), Role.GRADIENT)


def outer_upper(a: Spinor, b: Spinor) -> SpinMat:
    """a^A b^{A'} as a direction-role matrix."""
    if a.variance is not Variance.UPPER_UNPRIMED or b.variance is not Variance.UPPER_PRIMED:
        raise VarianceMismatch("outer_upper expects (upper unprimed, upper primed)")
    return SpinMat(
        np.outer(np.array(a.components, complex), np.array(b.components, complex)),
        Role.DIRECTION,
    )


def raise_both(M: SpinMat) -> SpinMat:
    """Raise both indices of a lower-lower matrix with the skew form."""
    m = M.m
    out = np.array([[m[1, 1], -m[1, 0]], [-m[0, 1], m[0, 0]]], dtype=complex)
    return SpinMat(out, Role.DIRECTION)


def solve_annihilator(
    xi: Spinor, M: SpinMat, annihilate_tol: float = DEFAULT_ANNIHILATE_TOL
) -> Spinor:
    """Given xi_A M^{AA'} = 0, recover sigma^{A'} with M^{AA'} = xi^A sigma^{A'}."""
    if xi.variance is not Variance.LOWER_UNPRIMED:
        raise VarianceMismatch("solve_annihilator expects a lower unprimed spinor")
    if xi.is_zero():
        raise ZeroVector("annihilator spinor must be nonzero")
    if M.is_zero():
        raise ZeroVector("matrix must be nonzero")
    m = M.m
    scale = xi.norm() * M.frobenius()
    res = np.array([xi.c0 * m[0, 0] + xi.c1 * m[1, 0],
                    xi.c0 * m[0, 1] + xi.c1 * m[1, 1]])
    if float(np.linalg.norm(res)) > annihilate_tol * scale:
        raise NotAnnihilated("xi_A M^{AA'} does not vanish within tolerance")
    up = raise_index(xi)
    u = np.array(up.components, dtype=complex)
    # Least-squares column solve of M = xi^A sigma^{A'}.
    denom = (u.conj() * u).sum()
    sigma = (u.conj() @ m) / denom
    return Spinor(sigma[0], sigma[1], Variance.UPPER_PRIMED)


def contract_full(G: SpinMat, V: SpinMat) -> complex:
    """Entrywise pairing sum_{A A'} G_{AA'} V^{AA'}.

    For G the gradient matrix of f and V the position-style matrix of a
    vector v this equals the directional derivative v^a d_a f.
    """
    return complex(np.sum(G.m * V.m))
