"""Named built-in fields used by the CLI and the test suite.

    u              t - x1                 (null solution, coincident branches)
    q              x2 + i x3              (null solution, constant spinors)
    t              t                      (negative control: not semi-conformal)
    kerr-basic     implicit z(x) from the meromorphic triple f=z, g=0, h=1
    surface-basic  incidence solution of the normal-form surface [w, 0, z, 1]
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import Box, ScalarField
from .kerr import MeromorphicTriple, RationalFn, kerr_field
from .report import GridSpec
from .spinor import MinkVec
from .twistor import Poly2D, TwistorSurface, surface_field

KERR_BASIC_SEED = -1.0 + 0.0j
SURFACE_BASIC_SEED = (0.0 + 0.0j, 0.0 + 0.0j)


@dataclass(frozen=True)
class BuiltinSolution:
    name: str
    field: ScalarField
    default_grid: GridSpec
    expect_null: bool
    description: str


def _u() -> BuiltinSolution:
    f = ScalarField(
        "u",
        lambda x: complex(x.t - x.x1),
        analytic_gradient=lambda x: (1.0, -1.0, 0.0, 0.0),
        domain=Box.cube(2.0),
    )
    return BuiltinSolution("u", f, GridSpec.uniform(-1.0, 1.0, 5), True,
                           "t - x1")


def _q() -> BuiltinSolution:
    f = ScalarField(
        "q",
        lambda x: complex(x.x2, x.x3),
        analytic_gradient=lambda x: (0.0, 0.0, 1.0, 1.0j),
        domain=Box.cube(2.0),
    )
    return BuiltinSolution("q", f, GridSpec.uniform(-1.0, 1.0, 5), True,
                           "x2 + i x3")


def _t() -> BuiltinSolution:
    f = ScalarField(
        "t",
        lambda x: complex(x.t),
        analytic_gradient=lambda x: (1.0, 0.0, 0.0, 0.0),
        domain=Box.cube(2.0),
    )
    return BuiltinSolution("t", f, GridSpec.uniform(-1.0, 1.0, 5), False,
                           "t (not semi-conformal)")


def kerr_basic_triple() -> MeromorphicTriple:
    return MeromorphicTriple(
        RationalFn.identity(), RationalFn.constant(0.0), RationalFn.constant(1.0)
    )


def _kerr_basic() -> BuiltinSolution:
    grid = GridSpec((
        (0.3, 0.7, 5), (-0.2, 0.2, 5), (0.8, 1.2, 5), (-0.2, 0.2, 5),
    ))
    # Box keeps t + x1 > 0 and x2 near 1, so the solved branch stays near
    # z = -1, away from the other quadratic root and from xi'(z).x = 0.
    domain = Box((0.2, -0.3, 0.7, -0.3), (0.8, 0.3, 1.3, 0.3))
    f = kerr_field(kerr_basic_triple(), "kerr-basic", domain, KERR_BASIC_SEED)
    return BuiltinSolution("kerr-basic", f, grid, True, "f=z, g=0, h=1")


def surface_basic_surface() -> TwistorSurface:
    return TwistorSurface.normal(Poly2D.w(), Poly2D.constant(0.0))


def _surface_basic() -> BuiltinSolution:
    grid = GridSpec((
        (-0.3, 0.3, 5), (-0.3, 0.3, 5), (0.7, 1.3, 5), (-0.3, 0.3, 5),
    ))
    domain = Box((-0.4, -0.4, 0.6, -0.4), (0.4, 0.4, 1.4, 0.4))  # keeps q != 0
    f = surface_field(surface_basic_surface(), "surface-basic", domain,
                      seed=SURFACE_BASIC_SEED)
    return BuiltinSolution("surface-basic", f, grid, True, "surface [w, 0, z, 1]")


_FACTORIES = {
    "u": _u,
    "q": _q,
    "t": _t,
    "kerr-basic": _kerr_basic,
    "surface-basic": _surface_basic,
}

BUILTIN_NAMES = tuple(_FACTORIES)
NULL_BUILTIN_NAMES = ("u", "q", "kerr-basic", "surface-basic")


def get_builtin(name: str) -> BuiltinSolution:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; have {sorted(_FACTORIES)}")
    return factory()
