"""Exception hierarchy shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of a curve or model."""


class NumericalError(RuntimeError):
    """A numerical routine could not produce a trustworthy result."""


class BracketError(NumericalError):
    """Root bracketing failed; usually a custom curve violating monotonicity."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap before converging."""


class DegenerateBaselineError(NumericalError):
    """A growth rate was requested against a non-positive one-sided baseline."""


class ConfigError(ValueError):
    """A scenario config file or override could not be parsed or validated."""


class VerificationError(RuntimeError):
    """Refined results disagree with the brute-force oracle beyond tolerance."""
