"""Exception types shared across the library."""


class NullwaveError(Exception):
    """Base class for every error raised by this package."""


class VarianceMismatch(NullwaveError):
    """Spinor passed with the wrong index position for the operation."""


class NonHermitian(NullwaveError):
    """Matrix expected to be Hermitian has too large an anti-Hermitian part."""


class ZeroVector(NullwaveError):
    """Zero vector where a nonzero one is required."""


class NotNull(NullwaveError):
    """Vector fails the null test within tolerance."""


class NotAnnihilated(NullwaveError):
    """Contraction that must vanish does not, within tolerance."""


class OutOfDomain(NullwaveError):
    """Evaluation point (or its difference stencil) leaves the field domain."""


class ZeroMatrix(NullwaveError):
    """Zero matrix where a nonzero one is required."""


class NotRankOne(NullwaveError):
    """Matrix determinant too large for a rank-1 factorization."""


class ZeroGradient(NullwaveError):
    """Gradient vanishes where a nonzero gradient is required."""


class ChartBreakdown(NullwaveError):
    """Direction ratio is unrepresentable in both affine charts on a stencil."""


class NotSFR(NullwaveError):
    """Ratio field fails the shear-free transport equations."""


class DegenerateConstantRatio(NullwaveError):
    """Constant direction ratio: the induced spinor pair is identically zero."""


class ZeroTwistor(NullwaveError):
    """Zero twistor where a nonzero one is required."""


class EtaZero(NullwaveError):
    """Twistor has vanishing primed part, so it defines no finite ray."""


class ZeroPoint(NullwaveError):
    """Zero homogeneous coordinates are not a projective point."""


class EtaDenominatorZero(NullwaveError):
    """Fourth surface slot vanishes at a sample where a ratio is needed."""


class SingularChart(NullwaveError):
    """Both reparameterization minors vanish; no normal-form chart here."""


class NewtonDiverged(NullwaveError):
    """Newton iteration failed to converge from every seed."""


class SingularBracket(NullwaveError):
    """The (z, w) Jacobian bracket vanishes at the solution."""


class PoleAt(NullwaveError):
    """Rational function evaluated at (or too near) a pole."""


class ZeroH(NullwaveError):
    """Scale function of a meromorphic triple vanishes at the sample."""


class NoRootFound(NullwaveError):
    """No admissible root of the implicit equation was found."""


class DegenerateEquation(NullwaveError):
    """Implicit equation is constant in the unknown."""


class SingularDenominator(NullwaveError):
    """Derivative denominator vanishes; implicit gradient undefined."""


class ConfigError(NullwaveError):
    """Malformed or inconsistent run configuration."""
