"""Greedy forward selection of cross-sectional regressors.

Each round fits every remaining candidate appended to the current model and
keeps the one with the highest objective (ties: lowest column index). The
reference path refits every candidate from scratch; ``fast=True`` screens
candidates by projecting them off the current design first, which picks the
same argmax in exact arithmetic and is validated against the reference in
tests. Recorded diagnostics always come from an exact refit of the winner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BudgetExceedsRank,
    DimensionMismatch,
    EmptyCandidates,
    SingularDesign,
)
from .kernel import RANK_RTOL, HacSpec, LinearFit, hac_tstats, ols
from .fmb import sample_covariances
from .panels import FactorPanel, ReturnsPanel

__all__ = [
    "Objective",
    "StopRule",
    "SelectionStep",
    "SelectionResult",
    "fs_fmb",
    "fs_generic",
]

# Candidate columns with essentially no variation are never entered.
ZERO_COLUMN_RTOL = 1e-12


@dataclass(frozen=True)
class Objective:
    """What the greedy picker maximizes: plain or adjusted R^2, with or
    without a cross-sectional intercept."""

    metric: str = "adj_r2"
    intercept: bool = True

    def __post_init__(self) -> None:
        if self.metric not in ("r2", "adj_r2"):
            raise ValueError(f"metric must be 'r2' or 'adj_r2', got {self.metric!r}")

    def value(self, fit: LinearFit) -> float:
        return fit.r2 if self.metric == "r2" else fit.adj_r2


@dataclass(frozen=True)
class StopRule:
    """Stop after a fixed number of additions, or when the best candidate's
    gain on ``metric`` is at most ``epsilon``."""

    kind: str
    count: int | None = None
    epsilon: float | None = None
    metric: str = "adj_r2"

    def __post_init__(self) -> None:
        if self.kind not in ("fixed_count", "min_gain"):
            raise ValueError(f"unknown stop rule {self.kind!r}")
        if self.kind == "fixed_count":
            if self.count is None or self.count < 0:
                raise ValueError("fixed_count needs a nonnegative count")
        else:
            if self.epsilon is None or not math.isfinite(self.epsilon):
                raise ValueError("min_gain needs a finite epsilon")
            if self.metric not in ("r2", "adj_r2"):
                raise ValueError(f"metric must be 'r2' or 'adj_r2', got {self.metric!r}")

    @classmethod
    def fixed_count(cls, count: int) -> "StopRule":
        return cls(kind="fixed_count", count=count)

    @classmethod
    def min_gain(cls, epsilon: float = 0.01, metric: str = "adj_r2") -> "StopRule":
        return cls(kind="min_gain", epsilon=epsilon, metric=metric)

    def stop_metric(self, fit: LinearFit) -> float:
        return fit.r2 if self.metric == "r2" else fit.adj_r2


@dataclass(frozen=True)
class SelectionStep:
    index: int
    label: str
    r2: float
    adj_r2: float
    gain: float
    alpha: float | None
    alpha_t: float | None


@dataclass(frozen=True)
class SelectionResult:
    base_set: tuple[int, ...]
    steps: tuple[SelectionStep, ...]
    selected: tuple[int, ...]
    base_r2: float
    base_adj_r2: float
    objective: Objective
    stop: StopRule

    @property
    def picked(self) -> tuple[int, ...]:
        return tuple(s.index for s in self.steps)

    @property
    def final_r2(self) -> float:
        return self.steps[-1].r2 if self.steps else self.base_r2

    @property
    def final_adj_r2(self) -> float:
        return self.steps[-1].adj_r2 if self.steps else self.base_adj_r2


def _orthonormal_basis(design: np.ndarray) -> np.ndarray:
    """Rank-revealing orthonormal basis of the design's column space."""
    if design.shape[1] == 0:
        return np.empty((design.shape[0], 0))
    u, s, _ = np.linalg.svd(design, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.empty((design.shape[0], 0))
    return u[:, s > RANK_RTOL * s[0]]


def _fwl_best(
    y: np.ndarray,
    columns: np.ndarray,
    current: list[int],
    remaining: list[int],
    intercept: bool,
) -> int:
    """Index of the candidate with the largest residual-sum-of-squares drop.

    Projects the target and all candidates off the current design (plus
    intercept) in one pass; the squared normalized inner product of the
    residualized pieces is each candidate's SSR reduction.
    """
    n = y.shape[0]
    blocks = [columns[:, current]] if current else []
    if intercept:
        blocks.insert(0, np.ones((n, 1)))
    design = np.hstack(blocks) if blocks else np.empty((n, 0))
    q = _orthonormal_basis(design)
    y_res = y - q @ (q.T @ y)
    cand = columns[:, remaining]
    cand_res = cand - q @ (q.T @ cand)
    num = cand_res.T @ y_res
    den = np.einsum("ij,ij->j", cand_res, cand_res)
    full_sq = np.einsum("ij,ij->j", cand, cand)
    inside_span = den <= (RANK_RTOL**2) * np.maximum(full_sq, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        gains = np.where(inside_span, 0.0, num**2 / den)
    return remaining[int(np.argmax(gains))]


def _greedy_select(
    y: np.ndarray,
    columns: np.ndarray,
    labels: tuple[str, ...],
    base: tuple[int, ...],
    candidates: tuple[int, ...],
    stop: StopRule,
    objective: Objective,
    hac: HacSpec | None,
    fast: bool,
    max_additions: int,
) -> SelectionResult:
    n, p = columns.shape
    if y.shape != (n,):
        raise DimensionMismatch(f"target length {y.shape} does not match {n} rows")

    norms = np.linalg.norm(columns, axis=0)
    floor = ZERO_COLUMN_RTOL * math.sqrt(n)
    base = tuple(int(i) for i in base)
    in_base = set(base)
    usable = [
        int(j)
        for j in candidates
        if j not in in_base and norms[int(j)] >= floor
    ]
    if len(set(usable)) != len(usable):
        raise DimensionMismatch("candidate list contains duplicates")
    if not usable:
        raise EmptyCandidates("no usable candidates (all zero or in the base set)")

    if stop.kind == "fixed_count":
        if stop.count > max_additions:
            raise BudgetExceedsRank(
                f"requested {stop.count} additions but the data supports at "
                f"most {max_additions} on top of the {len(base)} base columns"
            )
        if stop.count > len(usable):
            raise BudgetExceedsRank(
                f"requested {stop.count} additions but only {len(usable)} "
                "usable candidates exist"
            )

    def refit(idx: list[int]) -> LinearFit:
        return ols(columns[:, idx], y, intercept=objective.intercept)

    current = list(base)
    fit_cur = refit(current)
    base_r2, base_adj = fit_cur.r2, fit_cur.adj_r2
    chosen: list[int] = []
    steps: list[SelectionStep] = []

    while True:
        if stop.kind == "fixed_count" and len(chosen) >= stop.count:
            break
        if len(chosen) >= max_additions:
            break
        remaining = [j for j in usable if j not in chosen]
        if not remaining:
            break

        if fast:
            best_j = _fwl_best(y, columns, current, remaining, objective.intercept)
            best_fit = refit(current + [best_j])
        else:
            best_j, best_fit, best_val = -1, None, -math.inf
            for j in remaining:
                fit_j = refit(current + [j])
                val = objective.value(fit_j)
                if val > best_val:
                    best_j, best_fit, best_val = j, fit_j, val

        gain = stop.stop_metric(best_fit) - stop.stop_metric(fit_cur)
        if stop.kind == "min_gain" and gain <= stop.epsilon:
            break

        alpha = best_fit.intercept
        alpha_t = None
        if objective.intercept and hac is not None:
            try:
                alpha_t = hac_tstats(
                    best_fit, columns[:, current + [best_j]], y, hac
                ).intercept_t
            except SingularDesign:
                alpha_t = float("nan")
        chosen.append(best_j)
        current.append(best_j)
        steps.append(
            SelectionStep(
                index=best_j,
                label=labels[best_j],
                r2=best_fit.r2,
                adj_r2=best_fit.adj_r2,
                gain=gain,
                alpha=alpha,
                alpha_t=alpha_t,
            )
        )
        fit_cur = best_fit

    return SelectionResult(
        base_set=base,
        steps=tuple(steps),
        selected=base + tuple(chosen),
        base_r2=base_r2,
        base_adj_r2=base_adj,
        objective=objective,
        stop=stop,
    )


def fs_fmb(
    returns: ReturnsPanel,
    factors: FactorPanel,
    base: tuple[int, ...] = (),
    candidates: tuple[int, ...] | None = None,
    stop: StopRule = StopRule.min_gain(0.01),
    objective: Objective = Objective(),
    hac: HacSpec | None = HacSpec(),
    fast: bool = False,
    max_additions: int | None = None,
) -> SelectionResult:
    """Forward selection of factors for the cross-sectional pricing fit.

    Targets average returns; candidate columns are return-factor sample
    covariances, so the objective matches the second-pass regression fit.
    By the reparameterization identity the same sets would be chosen from
    multivariate or univariate betas. ``base`` pre-seeds the model (its
    columns are never candidates); ``candidates=None`` means every other
    factor column.

    The total model size is capped below ``min(N assets, T periods)``; an
    intercept objective additionally needs two spare cross-sectional degrees
    of freedom; ``max_additions`` imposes a further user budget. Fixed-count
    requests beyond the cap raise :class:`BudgetExceedsRank`; min-gain runs
    just stop there.
    """
    cov = sample_covariances(returns, factors, None)
    y = returns.mean_returns()
    n, t = returns.n_assets, returns.n_periods
    if candidates is None:
        base_set = set(int(i) for i in base)
        candidates = tuple(j for j in range(factors.n_factors) if j not in base_set)
    cap = min(n, t) - 1
    if objective.intercept:
        cap = min(cap, n - 2)
    budget = cap - len(base)
    if max_additions is not None:
        budget = min(budget, max_additions)
    if budget < 0:
        raise BudgetExceedsRank(
            f"base set of {len(base)} already exceeds the feasible model size {cap}"
        )
    return _greedy_select(
        y=y,
        columns=cov.values,
        labels=factors.names,
        base=tuple(base),
        candidates=tuple(candidates),
        stop=stop,
        objective=objective,
        hac=hac,
        fast=fast,
        max_additions=budget,
    )


def fs_generic(
    target: np.ndarray,
    columns: np.ndarray,
    seed_set: tuple[int, ...] = (),
    candidates: tuple[int, ...] | None = None,
    stop: StopRule = StopRule.min_gain(0.01, metric="r2"),
    objective: Objective = Objective(metric="r2", intercept=False),
    hac: HacSpec | None = None,
    fast: bool = False,
    labels: tuple[str, ...] | None = None,
    max_additions: int | None = None,
) -> SelectionResult:
    """Greedy selection of raw columns for an arbitrary target vector.

    Same engine as :func:`fs_fmb` minus the pricing setup; used for the
    debiasing sub-selections and directly testable against exhaustive
    search.
    """
    target = np.asarray(target, dtype=float)
    columns = np.asarray(columns, dtype=float)
    if columns.ndim != 2:
        raise DimensionMismatch("columns must be 2-d")
    n, p = columns.shape
    if candidates is None:
        seed = set(int(i) for i in seed_set)
        candidates = tuple(j for j in range(p) if j not in seed)
    if labels is None:
        labels = tuple(str(j) for j in range(p))
    cap = n - 2 if objective.intercept else n - 1
    budget = cap - len(seed_set)
    if max_additions is not None:
        budget = min(budget, max_additions)
    if budget < 0:
        raise BudgetExceedsRank(
            f"seed set of {len(seed_set)} already exceeds the feasible model size {cap}"
        )
    return _greedy_select(
        y=target,
        columns=columns,
        labels=labels,
        base=tuple(seed_set),
        candidates=tuple(candidates),
        stop=stop,
        objective=objective,
        hac=hac,
        fast=fast,
        max_additions=budget,
    )
