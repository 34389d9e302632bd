"""Exception types shared across the package."""


class PrecisionError(ValueError):
    """Precision N is too small to trust the requested computation."""


class WindowError(ValueError):
    """A degree fell outside the usable part of the degree window."""


class AxiomError(ValueError):
    """A dga axiom (d^2, Leibniz, commutativity, unit) failed."""


class ParseError(ValueError):
    """Malformed dga interchange text."""


class BracketUndefinedError(ValueError):
    """Massey bracket requested where a defining product is nonzero."""


class WitnessError(ValueError):
    """A chain-level witness equation d(u) = rhs has no solution."""


class SynthesisError(ValueError):
    """Quasi-isomorphism synthesis failed; .reason carries the step detail."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class NormalizeError(ValueError):
    """Degree-zero normalization pipeline failed."""


class BudgetError(RuntimeError):
    """Cell attachment budget exhausted (runaway attachment guard)."""
