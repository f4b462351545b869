"""Exception types raised across the package.

Everything derives from :class:`FsfmbError` so callers can catch one base
class. The CLI maps FsfmbError subclasses to exit code 1 (computation) or 2
(I/O and configuration) depending on where they originate.
"""

from __future__ import annotations


class FsfmbError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------- kernel


class DimensionMismatch(FsfmbError):
    """Array shapes are inconsistent with each other or with the operation."""


class NonFiniteInput(FsfmbError):
    """An input array contains NaN or infinity."""


class SeriesTooShort(FsfmbError):
    """A time series is too short for the requested statistic."""


class SingularDesign(FsfmbError):
    """A design matrix whose Gram must be invertible is rank deficient."""


# ------------------------------------------------------- factor engineering


class UnsupportedDegree(FsfmbError):
    """Expansion degree outside the supported range (2..4)."""


class UnknownBaseFactor(FsfmbError):
    """A term references a base factor not present in the panel."""


# ---------------------------------------------------------------- fmb core


class Misalignment(FsfmbError):
    """Returns and factor panels do not share the same date index."""


class EquivalenceViolation(FsfmbError):
    """The two SDF-loading routes disagree beyond tolerance on a
    well-conditioned Gram; indicates a numerical pathology."""


# --------------------------------------------------------------- selection


class EmptyCandidates(FsfmbError):
    """Forward selection started with no usable candidates."""


class BudgetExceedsRank(FsfmbError):
    """Requested selection count cannot be supported by the data rank."""


# ------------------------------------------------------- debias / inference


class DegenerateResidual(FsfmbError):
    """Residualized factor has (near-)zero variance; t-stat undefined."""


class NotSPD(FsfmbError):
    """Matrix expected to be symmetric positive definite is not."""


# -------------------------------------------------------------- evaluation


class FoldTooSmall(FsfmbError):
    """A cross-validation fold has too few assets to fit the model."""


class SplitTooShort(FsfmbError):
    """A time split leaves too few periods on one side."""


class EmptyRegime(FsfmbError):
    """A regime mask selects no (or too few) periods."""


# ----------------------------------------------------------------- io/cli


class ParseError(FsfmbError):
    """A data file could not be parsed; message carries row/column context."""


class EmptyIntersection(FsfmbError):
    """Inner join of panel dates is empty."""


class NonMonotoneDates(FsfmbError):
    """Dates in a panel file are not strictly increasing."""


class ConfigError(FsfmbError):
    """Run configuration is missing or inconsistent."""
