"""Shared builders for the test suite.

Panels here are small and deterministic. Where a test needs a panel whose
average returns are fitted exactly by the covariance columns, use
``exactly_priced_panel``: it wires the asset means to the in-sample factor
covariance, so the cross-sectional regression has zero residual by
construction and tolerances can be tight.
"""

from __future__ import annotations

import numpy as np

from fsfmb import FactorPanel, ReturnsPanel


def month_dates(t: int, start_year: int = 2000) -> tuple[str, ...]:
    return tuple(f"{start_year + i // 12:04d}-{i % 12 + 1:02d}" for i in range(t))


def factor_panel(values: np.ndarray, names: tuple[str, ...] | None = None) -> FactorPanel:
    values = np.asarray(values, dtype=float)
    if names is None:
        names = tuple(f"f{j + 1}" for j in range(values.shape[1]))
    return FactorPanel(values, month_dates(values.shape[0]), names)


def returns_panel(values: np.ndarray) -> ReturnsPanel:
    values = np.asarray(values, dtype=float)
    ids = tuple(f"a{i}" for i in range(values.shape[1]))
    return ReturnsPanel(values, month_dates(values.shape[0]), ids)


def exactly_priced_panel(
    rng: np.random.Generator,
    n_assets: int = 30,
    n_periods: int = 120,
    n_factors: int = 4,
    psi: np.ndarray | None = None,
) -> tuple[ReturnsPanel, FactorPanel, np.ndarray]:
    """Panel whose sample average returns equal C_hat psi exactly.

    r_it = a_i + b_i'(f_t - fbar) makes rbar_i = a_i and C_hat = b Sigma_hat;
    choosing a = b Sigma_hat psi then gives rbar = C_hat psi with no error.
    """
    if psi is None:
        psi = rng.uniform(0.5, 1.5, n_factors)
    f = rng.standard_normal((n_periods, n_factors))
    fc = f - f.mean(axis=0)
    sigma_hat = fc.T @ fc / n_periods
    b = rng.standard_normal((n_assets, n_factors))
    a = b @ (sigma_hat @ psi)
    r = a[None, :] + fc @ b.T
    return returns_panel(r), factor_panel(f), psi


def noisy_priced_panel(
    rng: np.random.Generator,
    n_assets: int = 40,
    n_periods: int = 200,
    n_factors: int = 5,
    noise_scale: float = 0.3,
) -> tuple[ReturnsPanel, FactorPanel, np.ndarray]:
    """Priced panel plus idiosyncratic noise; generic well-posed test input."""
    psi = rng.uniform(0.5, 1.5, n_factors)
    f = rng.standard_normal((n_periods, n_factors))
    b = rng.standard_normal((n_assets, n_factors))
    a = b @ psi
    r = a[None, :] + f @ b.T + noise_scale * rng.standard_normal((n_periods, n_assets))
    return returns_panel(r), factor_panel(f), psi
