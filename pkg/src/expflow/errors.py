"""Exception types raised across the package."""

from __future__ import annotations


class ExpflowError(Exception):
    """Base class for all package errors."""


class PrecisionExhausted(ExpflowError):
    def __init__(self, available: int, requested: int, precision_bits: int):
        self.available = available
        self.requested = requested
        self.precision_bits = precision_bits
        super().__init__(
            f"only {available} of {requested} terms are determined at "
            f"{precision_bits} bits; raise precision_bits"
        )


class InsufficientTerms(ExpflowError):
    pass


class ResonantMultiplier(ExpflowError):
    """Some band index has a (near-)vanishing multiplier.

    ``k`` is the canonical offender: smallest sup-norm, sign fixed so the
    first nonzero entry is positive (``k`` and ``-k`` always resonate together).
    """

    def __init__(self, k: tuple[int, ...], value: float, indices=()):
        self.k = tuple(k)
        self.value = value
        self.indices = list(indices) or [self.k]
        super().__init__(f"resonant multiplier at k={self.k} (|m|={value:.3e})")


class DomainUnderflow(ExpflowError):
    pass


class NonmultipleShift(ExpflowError):
    pass


class MissingSupportHint(ExpflowError):
    pass


class WindowTooSmall(ExpflowError):
    pass


class StepRejection(ExpflowError):
    pass


class IllConditionedSpectrum(ExpflowError):
    pass


class ComplexSpectrum(ExpflowError):
    pass


class NonpositiveDenominator(ExpflowError):
    pass


class InvalidConfig(ExpflowError):
    pass
