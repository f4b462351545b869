"""Macro diagnostics: regime correlations and exposure regressions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, EmptyRegime
from ..kernel import HacSpec, hac_tstats, ols
from ..panels import FactorPanel, check_aligned

__all__ = ["CorrelationRow", "ExposureRow", "MacroReport", "macro_diagnostics"]


@dataclass(frozen=True)
class CorrelationRow:
    factor: str
    series: str
    regime: str
    corr: float
    n_obs: int


@dataclass(frozen=True)
class ExposureRow:
    factor: str
    coef: tuple[float, ...]
    t: tuple[float, ...]
    alpha: float
    alpha_t: float
    adj_r2: float


@dataclass(frozen=True)
class MacroReport:
    correlations: tuple[CorrelationRow, ...]
    exposures: tuple[ExposureRow, ...]
    macro_names: tuple[str, ...]
    regime_names: tuple[str, ...]
    band: float


def _corr(a: np.ndarray, b: np.ndarray) -> float:
    if a.std() == 0.0 or b.std() == 0.0:
        return float("nan")
    return float(np.corrcoef(a, b)[0, 1])


def macro_diagnostics(
    target_factors: FactorPanel,
    macro: FactorPanel,
    regimes: FactorPanel | None = None,
    *,
    hac: HacSpec = HacSpec(),
    band: float = 0.10,
) -> MacroReport:
    """Correlate each target factor with each macro series by regime.

    Regimes: the full sample, each supplied 0/1 mask, and three bands cut on
    the target factor's own distribution (bottom ``band`` quantile, middle,
    top). The three bands partition the sample. Exposure regressions put
    each target factor on all macro series jointly (intercept, HAC t-stats).
    A regime with fewer than two periods raises :class:`EmptyRegime`.
    """
    check_aligned(target_factors, macro)
    if regimes is not None:
        check_aligned(target_factors, regimes)
        if not np.isin(regimes.values, (0.0, 1.0)).all():
            raise DimensionMismatch("regime masks must contain only 0/1 values")
    if not 0.0 < band < 0.5:
        raise ValueError("band must be in (0, 0.5)")

    t = target_factors.n_periods
    masks: list[tuple[str, np.ndarray]] = [("full", np.ones(t, dtype=bool))]
    if regimes is not None:
        for r, name in enumerate(regimes.names):
            masks.append((name, regimes.values[:, r] != 0.0))

    rows: list[CorrelationRow] = []
    for i, fname in enumerate(target_factors.names):
        h = target_factors.values[:, i]
        lo, hi = np.quantile(h, band), np.quantile(h, 1.0 - band)
        own = [
            ("own_bottom", h <= lo),
            ("own_middle", (h > lo) & (h < hi)),
            ("own_top", h >= hi),
        ]
        for regime_name, mask in masks + own:
            n_obs = int(mask.sum())
            if n_obs < 2:
                raise EmptyRegime(
                    f"regime {regime_name!r} has {n_obs} periods for factor {fname!r}"
                )
            for m, mname in enumerate(macro.names):
                rows.append(
                    CorrelationRow(
                        factor=fname,
                        series=mname,
                        regime=regime_name,
                        corr=_corr(h[mask], macro.values[mask, m]),
                        n_obs=n_obs,
                    )
                )

    exposures: list[ExposureRow] = []
    for i, fname in enumerate(target_factors.names):
        h = target_factors.values[:, i]
        fit = ols(macro.values, h, intercept=True)
        ts = hac_tstats(fit, macro.values, h, hac)
        exposures.append(
            ExposureRow(
                factor=fname,
                coef=tuple(float(c) for c in fit.coef),
                t=tuple(float(v) for v in ts.coef_t),
                alpha=float(fit.intercept),
                alpha_t=float(ts.intercept_t),
                adj_r2=fit.adj_r2,
            )
        )

    return MacroReport(
        correlations=tuple(rows),
        exposures=tuple(exposures),
        macro_names=macro.names,
        regime_names=tuple(name for name, _ in masks[1:]),
        band=band,
    )
