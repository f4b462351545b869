"""Command-line interface.

Subcommands map one-to-one onto pipeline stages:

    fsfmb expand    term labels for a base set (no data needed)
    fsfmb select    forward selection on the configured panels
    fsfmb estimate  SDF loadings and predicted returns
    fsfmb debias    debiased per-factor loadings and t-stats
    fsfmb cv        selection scored by asset-space cross-validation
    fsfmb oos       time-split out-of-sample fits plus restricted fits
    fsfmb zoo       factor-zoo culling and spanning regressions
    fsfmb simulate  random-factor placebo distribution
    fsfmb macro     regime correlations and macro exposures

Each data stage writes ``report.json``, CSV tables, and a ``manifest.json``
under ``<output>/<stage>/``. Reports are byte-identical across reruns with
the same config and inputs; only the manifest carries a timestamp.

Exit codes: 0 success, 1 computation error, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dataio import (
    Panels,
    RunConfig,
    load_panels,
    write_csv_report,
    write_json_report,
    write_manifest,
)
from .debias import debiased_loading
from .errors import (
    ConfigError,
    EmptyIntersection,
    FsfmbError,
    NonMonotoneDates,
    ParseError,
    UnknownBaseFactor,
)
from .evaluation import (
    SplitSpec,
    asset_kfold_cv,
    macro_diagnostics,
    mimicking_portfolio,
    random_factor_simulation,
    restricted_fit,
    spanning_regressions,
    time_split_oos,
    zoo_cull_cross_sectional,
)
from .fmb import estimate_sdf_loadings, predicted_returns, risk_premia, sample_covariances
from .kernel import HacSpec
from .panels import FactorPanel
from .selection import Objective, SelectionResult, StopRule, fs_fmb
from .terms import expand_terms, expanded_panel

log = logging.getLogger(__name__)

_CONFIG_ERRORS = (
    ConfigError,
    ParseError,
    NonMonotoneDates,
    EmptyIntersection,
    UnknownBaseFactor,
    OSError,
)


def _hac(cfg: RunConfig) -> HacSpec:
    return HacSpec(lag=cfg.hac_lag)


def _objective(cfg: RunConfig) -> Objective:
    return Objective(metric=cfg.objective_metric, intercept=cfg.intercept)


def _stop(cfg: RunConfig) -> StopRule:
    if cfg.stop_kind == "fixed_count":
        return StopRule.fixed_count(cfg.stop_count)
    return StopRule.min_gain(cfg.stop_epsilon, metric=cfg.stop_metric)


@dataclass(frozen=True)
class Prepared:
    panels: Panels
    expanded: FactorPanel
    base_idx: tuple[int, ...]
    candidate_idx: tuple[int, ...]

    @property
    def base_panel(self) -> FactorPanel:
        return self.expanded.subset(self.base_idx)


def _prepare(cfg: RunConfig) -> Prepared:
    panels = load_panels(cfg)
    base_names = cfg.base_factors or panels.factors.names
    base = panels.factors.subset(tuple(panels.factors.index_of(n) for n in base_names))
    expanded = expanded_panel(base, cfg.max_degree, cfg.expansion_mode)
    k = len(base_names)
    return Prepared(
        panels=panels,
        expanded=expanded,
        base_idx=tuple(range(k)),
        candidate_idx=tuple(range(k, expanded.n_factors)),
    )


def _run_selection(cfg: RunConfig, prep: Prepared) -> SelectionResult:
    return fs_fmb(
        prep.panels.returns,
        prep.expanded,
        base=prep.base_idx,
        candidates=prep.candidate_idx,
        stop=_stop(cfg),
        objective=_objective(cfg),
        hac=_hac(cfg),
    )


def _selection_dict(result: SelectionResult, labels: tuple[str, ...]) -> dict:
    return {
        "base_labels": list(labels[i] for i in result.base_set),
        "base_r2": result.base_r2,
        "base_adj_r2": result.base_adj_r2,
        "steps": [
            {
                "step": i + 1,
                "label": s.label,
                "index": s.index,
                "r2": s.r2,
                "adj_r2": s.adj_r2,
                "gain": s.gain,
                "alpha": s.alpha,
                "alpha_t": s.alpha_t,
            }
            for i, s in enumerate(result.steps)
        ],
        "selected_labels": [labels[i] for i in result.selected],
        "final_r2": result.final_r2,
        "final_adj_r2": result.final_adj_r2,
    }


# ------------------------------------------------------------------ stages


def run_select(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    result = _run_selection(cfg, prep)
    report = _selection_dict(result, prep.expanded.names)
    outdir = Path(cfg.output) / "select"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "table.csv",
        ["step", "label", "r2", "adj_r2", "gain", "alpha", "alpha_t"],
        [
            [s["step"], s["label"], s["r2"], s["adj_r2"], s["gain"], s["alpha"], s["alpha_t"]]
            for s in report["steps"]
        ],
    )
    write_csv_report(
        outdir / "path.csv",
        ["step", "label", "adj_r2"],
        [[0, "base", report["base_adj_r2"]]]
        + [[s["step"], s["label"], s["adj_r2"]] for s in report["steps"]],
    )
    write_manifest(outdir, "select", cfg)
    return report


def run_estimate(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    sel = _run_selection(cfg, prep)
    returns, expanded = prep.panels.returns, prep.expanded
    est_full = estimate_sdf_loadings(
        returns, expanded, sel.selected, intercept=cfg.intercept, hac=_hac(cfg)
    )
    est_base = estimate_sdf_loadings(
        returns, expanded, prep.base_idx, intercept=cfg.intercept, hac=_hac(cfg)
    )
    cov = sample_covariances(returns, expanded, None)
    pred_full = predicted_returns(cov, est_full)
    pred_base = predicted_returns(cov, est_base)
    premia = risk_premia(expanded, est_full)

    def loading_rows(est):
        t = est.tstats.coef_t if est.tstats is not None else [None] * len(est.selected)
        return [
            {"label": lab, "psi": float(psi), "t": None if tv is None else float(tv)}
            for lab, psi, tv in zip(est.labels, est.psi_selected, t)
        ]

    report = {
        "selection": _selection_dict(sel, expanded.names),
        "full_model": {
            "loadings": loading_rows(est_full),
            "alpha": est_full.alpha,
            "alpha_t": est_full.tstats.intercept_t if est_full.tstats else None,
            "r2": est_full.r2,
            "adj_r2": est_full.adj_r2,
            "equivalence_checked": est_full.equivalence_checked,
            "risk_premia": {lab: float(v) for lab, v in zip(premia.labels, premia.values)},
        },
        "base_model": {
            "loadings": loading_rows(est_base),
            "alpha": est_base.alpha,
            "alpha_t": est_base.tstats.intercept_t if est_base.tstats else None,
            "r2": est_base.r2,
            "adj_r2": est_base.adj_r2,
        },
    }
    outdir = Path(cfg.output) / "estimate"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "loadings.csv",
        ["label", "psi", "t"],
        [[r["label"], r["psi"], r["t"]] for r in report["full_model"]["loadings"]],
    )
    write_csv_report(
        outdir / "predicted.csv",
        ["asset", "mean_return", "predicted_base", "predicted_full"],
        [
            [a, float(m), float(pb), float(pf)]
            for a, m, pb, pf in zip(
                returns.asset_ids, returns.mean_returns(), pred_base, pred_full
            )
        ],
    )
    write_manifest(outdir, "estimate", cfg)
    return report


def run_debias(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    sel = _run_selection(cfg, prep)
    returns, expanded = prep.panels.returns, prep.expanded
    est = estimate_sdf_loadings(
        returns, expanded, sel.selected, intercept=cfg.intercept, hac=_hac(cfg)
    )
    plain_t = {}
    if est.tstats is not None:
        plain_t = dict(zip(est.labels, est.tstats.coef_t))

    targets = (
        list(cfg.debias_targets)
        if cfg.debias_targets is not None
        else [s.label for s in sel.steps]
    )
    if not targets:
        raise ConfigError("no debias targets: selection picked nothing and none configured")
    indices = [expanded.index_of(lab) for lab in targets]

    def one(j: int):
        return debiased_loading(
            j,
            returns,
            expanded,
            sel,
            intercept=cfg.intercept,
            hac=_hac(cfg),
            residual_method=cfg.residual_method,
        )

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            loadings = list(pool.map(one, indices))
    else:
        loadings = [one(j) for j in indices]

    rows = [
        {
            "label": d.label,
            "psi": d.psi_plain,
            "t": float(plain_t[d.label]) if d.label in plain_t else None,
            "psi_debiased": d.psi,
            "t_debiased": d.t_stat,
            "sigma": d.sigma_psi,
            "support_size": len(d.sets.union),
            "residual_method": d.residual.method,
        }
        for d in loadings
    ]
    report = {"selection": _selection_dict(sel, expanded.names), "loadings": rows}
    outdir = Path(cfg.output) / "debias"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "table.csv",
        ["label", "psi", "t", "psi_debiased", "t_debiased", "sigma", "support_size"],
        [
            [r["label"], r["psi"], r["t"], r["psi_debiased"], r["t_debiased"], r["sigma"], r["support_size"]]
            for r in rows
        ],
    )
    write_manifest(outdir, "debias", cfg)
    return report


def run_cv(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    result = asset_kfold_cv(
        prep.panels.returns,
        prep.expanded,
        base=prep.base_idx,
        candidates=prep.candidate_idx,
        k_folds=cfg.k_folds,
        stop=_stop(cfg),
        objective=_objective(cfg),
        hac=_hac(cfg),
        seed=cfg.seed,
    )
    report = {
        "base_cv_adj_r2": result.base_cv_adj_r2,
        "base_in_sample_adj_r2": result.base_in_sample_adj_r2,
        "k_folds": result.k_folds,
        "seed": result.seed,
        "steps": [
            {
                "step": i + 1,
                "label": s.label,
                "cv_adj_r2": s.cv_adj_r2,
                "in_sample_r2": s.in_sample_r2,
                "in_sample_adj_r2": s.in_sample_adj_r2,
                "gain": s.gain,
                "alpha": s.alpha,
                "alpha_t": s.alpha_t,
            }
            for i, s in enumerate(result.steps)
        ],
        "selected_labels": [prep.expanded.names[i] for i in result.selected],
    }
    outdir = Path(cfg.output) / "cv"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "table.csv",
        ["step", "label", "cv_adj_r2", "in_sample_adj_r2", "alpha", "alpha_t"],
        [
            [s["step"], s["label"], s["cv_adj_r2"], s["in_sample_adj_r2"], s["alpha"], s["alpha_t"]]
            for s in report["steps"]
        ],
    )
    write_manifest(outdir, "cv", cfg)
    return report


def run_oos(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    sel = _run_selection(cfg, prep)
    returns, expanded = prep.panels.returns, prep.expanded
    models = [("base", prep.base_idx), ("base+selected", sel.selected)]
    split = SplitSpec(
        kind=cfg.oos_kind,
        fraction=cfg.oos_fraction,
        n_reps=cfg.oos_reps if cfg.oos_kind == "random" else 1,
        seed=cfg.seed,
    )
    oos = time_split_oos(
        returns, expanded, models, split, intercept=cfg.intercept, recenter=cfg.oos_recenter
    )

    tradable_names = cfg.tradable if cfg.tradable is not None else tuple(
        expanded.names[i] for i in prep.base_idx
    )
    tradable_idx = tuple(expanded.index_of(n) for n in tradable_names)
    nontrad_idx = tuple(i for i in sel.selected if i not in tradable_idx)
    restricted = [
        ("base", restricted_fit(returns, expanded, tradable_idx, (), hac=_hac(cfg))),
        (
            "base+selected",
            restricted_fit(returns, expanded, tradable_idx, nontrad_idx, hac=_hac(cfg)),
        ),
    ]
    report = {
        "split": {
            "kind": split.kind,
            "fraction": split.fraction,
            "n_reps": split.n_reps,
            "seed": split.seed,
            "n_train": oos.n_train,
            "n_test": oos.n_test,
            "recentered": oos.recentered,
        },
        "models": [
            {
                "name": m.name,
                "r2_train": m.r2_train,
                "r2_oos": m.r2_oos,
            }
            for m in oos.models
        ],
        "restricted": [
            {
                "model": name,
                "r2": r.r2,
                "adj_r2": r.adj_r2,
                "alpha": r.alpha,
                "alpha_t": r.alpha_t,
                "nontradable": [expanded.names[i] for i in r.nontradable],
            }
            for name, r in restricted
        ],
    }
    outdir = Path(cfg.output) / "oos"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "table.csv",
        ["model", "r2_train", "r2_oos"],
        [[m["name"], m["r2_train"], m["r2_oos"]] for m in report["models"]],
    )
    write_csv_report(
        outdir / "restricted.csv",
        ["model", "r2", "adj_r2", "alpha", "alpha_t"],
        [[r["model"], r["r2"], r["adj_r2"], r["alpha"], r["alpha_t"]] for r in report["restricted"]],
    )
    write_manifest(outdir, "oos", cfg)
    return report


def run_zoo(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    if prep.panels.zoo is None:
        raise ConfigError("zoo stage needs a file with kind = 'zoo'")
    sel = _run_selection(cfg, prep)
    returns, expanded, zoo = prep.panels.returns, prep.expanded, prep.panels.zoo
    control_sets = [
        ("none", None),
        ("base", prep.base_panel),
        ("base+selected", expanded.subset(sel.selected)),
    ]
    culls = {
        name: zoo_cull_cross_sectional(
            returns, zoo, ctrl, hac=_hac(cfg), critical_value=cfg.critical_value
        )
        for name, ctrl in control_sets
    }

    # Higher-order terms are not returns; spanning controls use their
    # zoo-projected mimicking portfolios instead of the raw series.
    mimicking = []
    mim_cols = []
    mim_names = []
    for lab in (s.label for s in sel.steps):
        mp = mimicking_portfolio(expanded.column(lab), zoo)
        mimicking.append({"label": lab, "adj_r2": mp.adj_r2})
        mim_cols.append(mp.fitted)
        mim_names.append(f"mim({lab})")
    spanning_controls = [("base", prep.base_panel)]
    if mim_cols:
        spanning_controls.append(
            (
                "base+mimicking",
                FactorPanel(
                    values=np.column_stack([prep.base_panel.values] + mim_cols),
                    dates=prep.base_panel.dates,
                    names=prep.base_panel.names + tuple(mim_names),
                ),
            )
        )
    spanning = {
        name: spanning_regressions(
            zoo, ctrl, hac=_hac(cfg), critical_value=cfg.critical_value
        )
        for name, ctrl in spanning_controls
    }

    report = {
        "culling": {
            name: {
                "median_abs_t_premium": c.median_abs_t_premium,
                "frac_significant_premium": c.frac_significant_premium,
                "median_abs_t_alpha": c.median_abs_t_alpha,
                "frac_significant_alpha": c.frac_significant_alpha,
                "n_flagged": c.n_flagged,
                "results": [
                    {
                        "name": r.name,
                        "premium": r.premium,
                        "t_premium": r.t_premium,
                        "alpha": r.alpha,
                        "t_alpha": r.t_alpha,
                        "flagged": r.flagged,
                    }
                    for r in c.results
                ],
            }
            for name, c in culls.items()
        },
        "spanning": {
            name: {
                "median_abs_alpha_annual_pp": s.median_abs_alpha_annual_pp,
                "median_abs_t_alpha": s.median_abs_t_alpha,
                "frac_alpha_significant": s.frac_alpha_significant,
                "frac_loading_significant": dict(
                    zip(s.control_labels, s.frac_loading_significant)
                ),
            }
            for name, s in spanning.items()
        },
        "mimicking": mimicking,
        "n_zoo_factors": zoo.n_factors,
    }
    outdir = Path(cfg.output) / "zoo"
    write_json_report(report, outdir / "report.json")
    for name, c in culls.items():
        write_csv_report(
            outdir / f"tstats_{name.replace('+', '_')}.csv",
            ["name", "premium", "t_premium", "alpha", "t_alpha", "flagged"],
            [[r.name, r.premium, r.t_premium, r.alpha, r.t_alpha, r.flagged] for r in c.results],
        )
    write_manifest(outdir, "zoo", cfg)
    return report


def run_simulate(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    sigma_ref = cfg.sigma_reference or prep.base_panel.names[0]
    result = random_factor_simulation(
        prep.panels.returns,
        prep.base_panel,
        sigma_reference=sigma_ref,
        n_candidates=cfg.sim_candidates,
        n_sims=cfg.n_sims,
        mode=cfg.sim_mode,
        stop=_stop(cfg),
        budget_cap=cfg.sim_budget,
        reference=cfg.sim_reference,
        objective=_objective(cfg),
        seed=cfg.seed,
    )
    report = {
        "mode": result.mode,
        "n_sims": result.n_sims,
        "n_candidates": result.n_candidates,
        "budget_cap": result.budget_cap,
        "sigma_reference": sigma_ref,
        "sigma": result.sigma,
        "seed": result.seed,
        "base_adj_r2": result.base_adj_r2,
        "max_adj_r2": result.max_adj_r2,
        "reference": result.reference,
        "exceed_fraction": result.exceed_fraction,
        "quantiles": {
            q: float(v)
            for q, v in zip(
                ("p50", "p90", "p95", "p99"),
                np.quantile(result.adj_r2_draws, (0.5, 0.9, 0.95, 0.99)),
            )
        },
    }
    outdir = Path(cfg.output) / "simulate"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "draws.csv",
        ["sim", "adj_r2", "n_selected"],
        [
            [i, float(v), int(k)]
            for i, (v, k) in enumerate(zip(result.adj_r2_draws, result.n_selected))
        ],
    )
    write_manifest(outdir, "simulate", cfg)
    return report


def run_macro(cfg: RunConfig) -> dict:
    prep = _prepare(cfg)
    if prep.panels.macro is None:
        raise ConfigError("macro stage needs a file with kind = 'macro'")
    sel = _run_selection(cfg, prep)
    picked = tuple(s.index for s in sel.steps)
    targets = prep.expanded.subset(picked) if picked else prep.base_panel
    if not picked:
        log.warning("selection picked no terms; macro diagnostics run on base factors")
    result = macro_diagnostics(
        targets,
        prep.panels.macro,
        prep.panels.regimes,
        hac=_hac(cfg),
        band=cfg.band,
    )
    report = {
        "band": result.band,
        "regimes": list(result.regime_names),
        "correlations": [
            {
                "factor": r.factor,
                "series": r.series,
                "regime": r.regime,
                "corr": r.corr,
                "n_obs": r.n_obs,
            }
            for r in result.correlations
        ],
        "exposures": [
            {
                "factor": e.factor,
                "alpha": e.alpha,
                "alpha_t": e.alpha_t,
                "adj_r2": e.adj_r2,
                "coef": dict(zip(result.macro_names, e.coef)),
                "t": dict(zip(result.macro_names, e.t)),
            }
            for e in result.exposures
        ],
    }
    outdir = Path(cfg.output) / "macro"
    write_json_report(report, outdir / "report.json")
    write_csv_report(
        outdir / "correlations.csv",
        ["factor", "series", "regime", "corr", "n_obs"],
        [[r.factor, r.series, r.regime, r.corr, r.n_obs] for r in result.correlations],
    )
    write_csv_report(
        outdir / "exposures.csv",
        ["factor", "alpha", "alpha_t", "adj_r2"]
        + [f"coef_{n}" for n in result.macro_names]
        + [f"t_{n}" for n in result.macro_names],
        [
            [e.factor, e.alpha, e.alpha_t, e.adj_r2] + list(e.coef) + list(e.t)
            for e in result.exposures
        ],
    )
    write_manifest(outdir, "macro", cfg)
    return report


_STAGES = {
    "select": run_select,
    "estimate": run_estimate,
    "debias": run_debias,
    "cv": run_cv,
    "oos": run_oos,
    "zoo": run_zoo,
    "simulate": run_simulate,
    "macro": run_macro,
}


def run_pipeline(cfg: RunConfig, stages: list[str]) -> dict:
    """Run the named stages in order; returns {stage: report dict}."""
    out = {}
    for stage in stages:
        if stage not in _STAGES:
            raise ConfigError(f"unknown stage {stage!r}")
        out[stage] = _STAGES[stage](cfg)
    return out


# --------------------------------------------------------------- arg parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML run configuration")
    parser.add_argument("--seed", type=int, help="override run seed")
    parser.add_argument("--threads", type=int, help="worker threads where supported")
    parser.add_argument("--output", help="override output directory")
    parser.add_argument("--stop-eps", type=float, dest="stop_eps", help="min-gain epsilon")
    parser.add_argument(
        "--stop-count", type=int, dest="stop_count", help="fixed number of additions"
    )
    parser.add_argument("--degree", type=int, help="expansion max degree (2..4)")
    parser.add_argument(
        "--mode",
        choices=("full", "powers_only", "interactions_only"),
        help="expansion mode",
    )
    parser.add_argument("--hac-lag", type=int, dest="hac_lag", help="fixed HAC lag")
    parser.add_argument(
        "--hac-auto",
        action="store_true",
        dest="hac_auto",
        help="use the automatic HAC bandwidth",
    )
    parser.add_argument("--objective", choices=("r2", "adj_r2"), help="selection objective")
    parser.add_argument(
        "--intercept", choices=("on", "off"), help="cross-sectional intercept"
    )


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    if not args.config:
        raise ConfigError("this subcommand needs --config")
    cfg = RunConfig.from_toml(args.config)
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.output is not None:
        overrides["output"] = args.output
    if args.stop_eps is not None and args.stop_count is not None:
        raise ConfigError("--stop-eps and --stop-count are mutually exclusive")
    if args.stop_eps is not None:
        overrides["stop_kind"] = "min_gain"
        overrides["stop_epsilon"] = args.stop_eps
    if args.stop_count is not None:
        overrides["stop_kind"] = "fixed_count"
        overrides["stop_count"] = args.stop_count
    if args.degree is not None:
        overrides["max_degree"] = args.degree
    if args.mode is not None:
        overrides["expansion_mode"] = args.mode
    if getattr(args, "hac_auto", False) and args.hac_lag is not None:
        raise ConfigError("--hac-auto and --hac-lag are mutually exclusive")
    if getattr(args, "hac_auto", False):
        cfg = replace(cfg, hac_lag=None)
    if args.hac_lag is not None:
        overrides["hac_lag"] = args.hac_lag
    if args.objective is not None:
        overrides["objective_metric"] = args.objective
        overrides["stop_metric"] = args.objective
    if args.intercept is not None:
        overrides["intercept"] = args.intercept == "on"
    return cfg.override(**overrides)


def _cmd_stage(stage: str):
    def handler(args: argparse.Namespace) -> int:
        cfg = _config_from_args(args)
        _STAGES[stage](cfg)
        return 0

    return handler


def _cmd_expand(args: argparse.Namespace) -> int:
    base = args.base
    if base is None:
        if not args.config:
            raise ConfigError("expand needs --base or --config")
        names = RunConfig.from_toml(args.config).base_factors
        if not names:
            raise ConfigError("config has no base_factors")
    elif base.isdigit():
        names = tuple(f"f{i + 1}" for i in range(int(base)))
    else:
        names = tuple(n.strip() for n in base.split(",") if n.strip())
    degree = args.degree if args.degree is not None else 3
    mode = args.mode if args.mode is not None else "full"
    terms = expand_terms(names, degree, mode)
    for t in terms:
        print(t.label)
    if args.output:
        outdir = Path(args.output) / "expand"
        write_json_report(
            {
                "base": list(names),
                "max_degree": degree,
                "mode": mode,
                "count": len(terms),
                "labels": [t.label for t in terms],
            },
            outdir / "report.json",
        )
        write_csv_report(
            outdir / "terms.csv",
            ["label", "degree"],
            [[t.label, t.degree] for t in terms],
        )
        cfg = RunConfig.from_toml(args.config) if args.config else RunConfig()
        write_manifest(outdir, "expand", cfg)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsfmb",
        description="Forward-selection Fama-MacBeth regressions with higher-order factors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_expand = sub.add_parser("expand", help="list higher-order term labels")
    _add_common(p_expand)
    p_expand.add_argument(
        "--base",
        help="base factor count (e.g. 6) or comma-separated names",
    )
    p_expand.set_defaults(handler=_cmd_expand)

    for stage, help_text in (
        ("select", "forward selection on the configured panels"),
        ("estimate", "SDF loadings and predicted returns"),
        ("debias", "debiased per-factor loadings"),
        ("cv", "cross-validated selection"),
        ("oos", "out-of-sample splits and restricted fits"),
        ("zoo", "factor-zoo culling and spanning"),
        ("simulate", "random-factor placebo distribution"),
        ("macro", "regime correlations and macro exposures"),
    ):
        p = sub.add_parser(stage, help=help_text)
        _add_common(p)
        p.set_defaults(handler=_cmd_stage(stage))
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FsfmbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
