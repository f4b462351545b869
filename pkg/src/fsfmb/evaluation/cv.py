"""Forward selection scored by asset-space cross-validation.

Assets are split into k folds (a pure function of the seed and asset count).
Each candidate is scored by the mean held-out adjusted R^2: coefficients are
fit on the training folds' covariance rows and evaluated on the held-out
fold's own rows. Selection greedily maximizes that score.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceedsRank, EmptyCandidates, FoldTooSmall, SingularDesign
from ..kernel import HacSpec, hac_tstats, ols
from ..fmb import sample_covariances
from ..panels import FactorPanel, ReturnsPanel
from ..selection import Objective, StopRule, ZERO_COLUMN_RTOL

__all__ = ["CvStep", "CvReport", "assign_folds", "asset_kfold_cv"]


def assign_folds(n_assets: int, k_folds: int, seed: int) -> list[np.ndarray]:
    """Disjoint folds covering all assets, sizes differing by at most one."""
    if k_folds < 2:
        raise FoldTooSmall(f"need at least 2 folds, got {k_folds}")
    if k_folds > n_assets:
        raise FoldTooSmall(f"{k_folds} folds over {n_assets} assets leaves empty folds")
    perm = np.random.default_rng(seed).permutation(n_assets)
    return np.array_split(perm, k_folds)


@dataclass(frozen=True)
class CvStep:
    index: int
    label: str
    cv_adj_r2: float
    in_sample_r2: float
    in_sample_adj_r2: float
    gain: float
    alpha: float | None
    alpha_t: float | None


@dataclass(frozen=True)
class CvReport:
    base_set: tuple[int, ...]
    steps: tuple[CvStep, ...]
    selected: tuple[int, ...]
    folds: tuple[tuple[int, ...], ...]
    base_cv_adj_r2: float
    base_in_sample_r2: float
    base_in_sample_adj_r2: float
    k_folds: int
    seed: int

    @property
    def picked(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.steps)


def _heldout_adj_r2(
    cov: np.ndarray,
    y: np.ndarray,
    train: np.ndarray,
    test: np.ndarray,
    idx: list[int],
    intercept: bool,
) -> float:
    fit = ols(cov[np.ix_(train, idx)], y[train], intercept=intercept)
    pred = (fit.intercept or 0.0) + cov[np.ix_(test, idx)] @ fit.coef
    resid = y[test] - pred
    ssr = float(resid @ resid)
    if intercept:
        sst = float(((y[test] - y[test].mean()) ** 2).sum())
    else:
        sst = float((y[test] ** 2).sum())
    r2 = 1.0 - ssr / sst if sst > 0 else (1.0 if ssr <= 1e-300 else 0.0)
    n, k = test.size, len(idx)
    if intercept:
        dof = n - k - 1
        return 1.0 - (1.0 - r2) * (n - 1) / dof if dof > 0 else float("nan")
    dof = n - k
    return 1.0 - (1.0 - r2) * n / dof if dof > 0 else float("nan")


def asset_kfold_cv(
    returns: ReturnsPanel,
    factors: FactorPanel,
    base: tuple[int, ...] = (),
    candidates: tuple[int, ...] | None = None,
    k_folds: int = 5,
    stop: StopRule = StopRule.min_gain(0.01),
    objective: Objective = Objective(),
    hac: HacSpec = HacSpec(),
    seed: int = 0,
) -> CvReport:
    """Greedy selection driven by mean held-out adjusted R^2.

    The stop rule's epsilon applies to gains in the CV score; in-sample fit
    statistics are recorded alongside for each accepted step.
    """
    cov = sample_covariances(returns, factors, None).values
    y = returns.mean_returns()
    n = returns.n_assets
    folds = assign_folds(n, k_folds, seed)
    all_idx = np.arange(n)
    splits = [
        (np.setdiff1d(all_idx, fold, assume_unique=False), np.asarray(fold))
        for fold in folds
    ]

    min_side = min(min(tr.size for tr, _ in splits), min(te.size for _, te in splits))
    spare = 2 if objective.intercept else 1
    cap = min_side - spare
    base = tuple(int(i) for i in base)
    max_additions = cap - len(base)
    if max_additions < 0:
        raise FoldTooSmall(
            f"folds of minimum side {min_side} cannot fit {len(base)} base regressors"
        )
    if stop.kind == "fixed_count" and stop.count > max_additions:
        raise BudgetExceedsRank(
            f"requested {stop.count} additions but folds support at most {max_additions}"
        )

    if candidates is None:
        candidates = tuple(j for j in range(factors.n_factors) if j not in set(base))
    norms = np.linalg.norm(cov, axis=0)
    floor = ZERO_COLUMN_RTOL * np.sqrt(n)
    usable = [int(j) for j in candidates if j not in set(base) and norms[int(j)] >= floor]
    if not usable:
        raise EmptyCandidates("no usable candidates")

    def cv_score(idx: list[int]) -> float:
        return float(
            np.mean(
                [
                    _heldout_adj_r2(cov, y, tr, te, idx, objective.intercept)
                    for tr, te in splits
                ]
            )
        )

    current = list(base)
    score_cur = cv_score(current)
    fit_base = ols(cov[:, current], y, intercept=objective.intercept)
    chosen: list[int] = []
    steps: list[CvStep] = []

    while True:
        if stop.kind == "fixed_count" and len(chosen) >= stop.count:
            break
        if len(chosen) >= max_additions:
            break
        remaining = [j for j in usable if j not in chosen]
        if not remaining:
            break
        best_j, best_score = -1, -np.inf
        for j in remaining:
            s = cv_score(current + [j])
            if s > best_score:
                best_j, best_score = j, s
        gain = best_score - score_cur
        if stop.kind == "min_gain" and gain <= stop.epsilon:
            break

        fit = ols(cov[:, current + [best_j]], y, intercept=objective.intercept)
        alpha_t = None
        if objective.intercept:
            try:
                alpha_t = hac_tstats(fit, cov[:, current + [best_j]], y, hac).intercept_t
            except SingularDesign:
                alpha_t = float("nan")
        chosen.append(best_j)
        current.append(best_j)
        steps.append(
            CvStep(
                index=best_j,
                label=factors.names[best_j],
                cv_adj_r2=best_score,
                in_sample_r2=fit.r2,
                in_sample_adj_r2=fit.adj_r2,
                gain=gain,
                alpha=fit.intercept,
                alpha_t=alpha_t,
            )
        )
        score_cur = best_score

    return CvReport(
        base_set=base,
        steps=tuple(steps),
        selected=base + tuple(chosen),
        folds=tuple(tuple(int(i) for i in fold) for fold in folds),
        base_cv_adj_r2=float(cv_score(list(base))),
        base_in_sample_r2=fit_base.r2,
        base_in_sample_adj_r2=fit_base.adj_r2,
        k_folds=k_folds,
        seed=seed,
    )
