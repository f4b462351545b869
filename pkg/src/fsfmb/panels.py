"""Aligned return and factor panels (monthly, dates as ``YYYY-MM`` strings)."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .errors import DimensionMismatch, Misalignment, NonFiniteInput

if TYPE_CHECKING:
    from .terms import TermSpec

__all__ = ["ReturnsPanel", "FactorPanel", "check_aligned"]


def _check_matrix(values: np.ndarray, n_dates: int, n_cols: int, what: str) -> None:
    if values.ndim != 2:
        raise DimensionMismatch(f"{what} values must be 2-d, got {values.shape}")
    if values.shape != (n_dates, n_cols):
        raise DimensionMismatch(
            f"{what} values shaped {values.shape}, expected ({n_dates}, {n_cols})"
        )
    if not np.isfinite(values).all():
        raise NonFiniteInput(f"{what} values contain NaN/inf")


@dataclass(frozen=True)
class ReturnsPanel:
    """Excess returns, one row per month, one column per asset."""

    values: np.ndarray
    dates: tuple[str, ...]
    asset_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        _check_matrix(self.values, len(self.dates), len(self.asset_ids), "returns")

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]

    def mean_returns(self) -> np.ndarray:
        return self.values.mean(axis=0)


@dataclass(frozen=True)
class FactorPanel:
    """Factor realizations, one row per month, one column per factor.

    ``terms`` optionally records how each column was built from base factors
    (None for columns loaded directly from data).
    """

    values: np.ndarray
    dates: tuple[str, ...]
    names: tuple[str, ...]
    terms: tuple["TermSpec | None", ...] | None = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        _check_matrix(self.values, len(self.dates), len(self.names), "factor")
        if len(set(self.names)) != len(self.names):
            raise DimensionMismatch("factor names must be unique")
        if self.terms is not None and len(self.terms) != len(self.names):
            raise DimensionMismatch("terms must match factor columns")

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_factors(self) -> int:
        return self.values.shape[1]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no factor named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.index_of(name)]

    def demeaned(self) -> np.ndarray:
        return self.values - self.values.mean(axis=0)

    def subset(self, indices: tuple[int, ...]) -> "FactorPanel":
        idx = list(indices)
        return replace(
            self,
            values=self.values[:, idx],
            names=tuple(self.names[i] for i in idx),
            terms=None if self.terms is None else tuple(self.terms[i] for i in idx),
        )


def check_aligned(*panels: "ReturnsPanel | FactorPanel") -> None:
    """Raise :class:`Misalignment` unless all panels share one date index."""
    first = panels[0].dates
    for other in panels[1:]:
        if other.dates != first:
            raise Misalignment(
                f"panels cover {len(first)} vs {len(other.dates)} dates; "
                "all panels must share one date index"
            )
