"""Data loading, run configuration, and report serialization.

CSV panels carry an ISO date column (``yyyy-mm`` or ``yyyy-mm-dd``; the day
is dropped) and numeric value columns. All configured files are inner-joined
onto one monthly date index; columns with any missing value inside the
joined window are dropped with a warning. Reports are JSON plus CSV with
full-precision floats, written deterministically (no timestamps outside the
manifest).
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import re
from dataclasses import dataclass, field, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import (
    ConfigError,
    EmptyIntersection,
    NonMonotoneDates,
    ParseError,
    UnknownBaseFactor,
)
from .panels import FactorPanel, ReturnsPanel

__all__ = [
    "PanelFile",
    "RunConfig",
    "Panels",
    "load_panels",
    "write_json_report",
    "write_csv_report",
    "write_manifest",
    "sha256_file",
]

log = logging.getLogger(__name__)

PANEL_KINDS = ("returns", "factors", "zoo", "macro", "regimes")
_DATE_RE = re.compile(r"^(\d{4})-(\d{2})(?:-(\d{2}))?$")


@dataclass(frozen=True)
class PanelFile:
    path: str
    kind: str
    date_column: str = "date"
    value_columns: tuple[str, ...] | None = None
    percent_scale: bool = False

    def __post_init__(self) -> None:
        if self.kind not in PANEL_KINDS:
            raise ConfigError(f"unknown panel kind {self.kind!r} for {self.path}")


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline stage needs, loadable from TOML."""

    files: tuple[PanelFile, ...] = ()
    base_factors: tuple[str, ...] = ()
    max_degree: int = 3
    expansion_mode: str = "full"
    # selection
    stop_kind: str = "min_gain"
    stop_epsilon: float = 0.01
    stop_count: int | None = None
    stop_metric: str = "adj_r2"
    objective_metric: str = "adj_r2"
    intercept: bool = True
    # inference
    hac_lag: int | None = None
    critical_value: float = 1.96
    # run
    seed: int = 0
    threads: int = 1
    output: str = "out"
    # cross-validation
    k_folds: int = 5
    # out-of-sample
    oos_kind: str = "chronological"
    oos_fraction: float = 0.5
    oos_reps: int = 100
    oos_recenter: bool = True
    tradable: tuple[str, ...] | None = None
    # simulation
    n_sims: int = 1000
    sim_candidates: int = 57
    sim_budget: int | None = None
    sim_mode: str = "greedy"
    sim_reference: float | None = None
    sigma_reference: str | None = None
    # debias
    debias_targets: tuple[str, ...] | None = None
    residual_method: str = "auto"
    # macro
    band: float = 0.10

    @classmethod
    def from_toml(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            raw = tomllib.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from None

        files = []
        for i, entry in enumerate(raw.get("files", [])):
            if "path" not in entry or "kind" not in entry:
                raise ConfigError(f"files[{i}] needs 'path' and 'kind'")
            fpath = Path(entry["path"])
            if not fpath.is_absolute():
                fpath = path.parent / fpath
            files.append(
                PanelFile(
                    path=str(fpath),
                    kind=entry["kind"],
                    date_column=entry.get("date_column", "date"),
                    value_columns=(
                        tuple(entry["value_columns"])
                        if "value_columns" in entry
                        else None
                    ),
                    percent_scale=bool(entry.get("percent_scale", False)),
                )
            )

        model = raw.get("model", {})
        sel = raw.get("selection", {})
        hac = raw.get("hac", {})
        run = raw.get("run", {})
        cv = raw.get("cv", {})
        oos = raw.get("oos", {})
        sim = raw.get("simulate", {})
        deb = raw.get("debias", {})
        macro = raw.get("macro", {})

        hac_lag = None if hac.get("auto", "lag" not in hac) else int(hac["lag"])
        cfg = cls(
            files=tuple(files),
            base_factors=tuple(model.get("base_factors", [])),
            max_degree=int(model.get("max_degree", 3)),
            expansion_mode=model.get("mode", "full"),
            stop_kind=sel.get("stop", "min_gain"),
            stop_epsilon=float(sel.get("epsilon", 0.01)),
            stop_count=int(sel["count"]) if "count" in sel else None,
            stop_metric=sel.get("stop_metric", sel.get("objective", "adj_r2")),
            objective_metric=sel.get("objective", "adj_r2"),
            intercept=bool(sel.get("intercept", True)),
            hac_lag=hac_lag,
            critical_value=float(run.get("critical_value", 1.96)),
            seed=int(run.get("seed", 0)),
            threads=int(run.get("threads", 1)),
            output=str(run.get("output", "out")),
            k_folds=int(cv.get("k_folds", 5)),
            oos_kind=oos.get("kind", "chronological"),
            oos_fraction=float(oos.get("fraction", 0.5)),
            oos_reps=int(oos.get("reps", 100)),
            oos_recenter=bool(oos.get("recenter", True)),
            tradable=tuple(oos["tradable"]) if "tradable" in oos else None,
            n_sims=int(sim.get("n_sims", 1000)),
            sim_candidates=int(sim.get("candidates", 57)),
            sim_budget=int(sim["budget"]) if "budget" in sim else None,
            sim_mode=sim.get("mode", "greedy"),
            sim_reference=float(sim["reference"]) if "reference" in sim else None,
            sigma_reference=sim.get("sigma_reference"),
            debias_targets=tuple(deb["targets"]) if "targets" in deb else None,
            residual_method=deb.get("residual_method", "auto"),
            band=float(macro.get("band", 0.10)),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.stop_kind not in ("min_gain", "fixed_count"):
            raise ConfigError(f"unknown stop rule {self.stop_kind!r}")
        if self.stop_kind == "fixed_count" and self.stop_count is None:
            raise ConfigError("fixed_count stop needs selection.count")
        if self.objective_metric not in ("r2", "adj_r2"):
            raise ConfigError(f"objective must be r2/adj_r2, got {self.objective_metric!r}")
        if self.stop_metric not in ("r2", "adj_r2"):
            raise ConfigError(f"stop_metric must be r2/adj_r2, got {self.stop_metric!r}")
        if self.expansion_mode not in ("full", "powers_only", "interactions_only"):
            raise ConfigError(f"unknown expansion mode {self.expansion_mode!r}")
        if not 2 <= self.max_degree <= 4:
            raise ConfigError(f"max_degree must be 2..4, got {self.max_degree}")
        if self.sim_mode not in ("greedy", "append"):
            raise ConfigError(f"unknown simulation mode {self.sim_mode!r}")
        if self.hac_lag is not None and self.hac_lag < 0:
            raise ConfigError("hac lag must be nonnegative")
        if not 0.0 < self.oos_fraction < 1.0:
            raise ConfigError(f"oos fraction must be in (0, 1), got {self.oos_fraction}")
        if self.oos_kind not in ("chronological", "random"):
            raise ConfigError(f"unknown oos split {self.oos_kind!r}")
        if not 0.0 < self.band < 0.5:
            raise ConfigError(f"band must be in (0, 0.5), got {self.band}")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        kinds = [f.kind for f in self.files]
        if self.files and "returns" not in kinds:
            raise ConfigError("config lists files but no returns panel")

    def override(self, **kwargs) -> "RunConfig":
        clean = {k: v for k, v in kwargs.items() if v is not None}
        cfg = replace(self, **clean)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = [x.__dict__ if isinstance(x, PanelFile) else x for x in v]
            out[f.name] = v
        return out


@dataclass(frozen=True)
class Panels:
    returns: ReturnsPanel
    factors: FactorPanel
    zoo: FactorPanel | None = None
    macro: FactorPanel | None = None
    regimes: FactorPanel | None = None
    dates: tuple[str, ...] = field(default=())


def _parse_dates(raw: pd.Series, pf: PanelFile) -> list[str]:
    out = []
    for i, val in enumerate(raw):
        text = str(val).strip()
        m = _DATE_RE.match(text)
        if not m or not 1 <= int(m.group(2)) <= 12:
            raise ParseError(
                f"{pf.path} row {i + 2} column {pf.date_column!r}: "
                f"bad date {text!r} (expected yyyy-mm or yyyy-mm-dd)"
            )
        out.append(f"{m.group(1)}-{m.group(2)}")
    for prev, cur, i in zip(out, out[1:], range(2, len(out) + 1)):
        if cur <= prev:
            raise NonMonotoneDates(
                f"{pf.path} row {i + 1}: date {cur} not after {prev}"
            )
    return out


def _read_panel_file(pf: PanelFile) -> tuple[list[str], list[str], np.ndarray]:
    """Returns (dates, column names, values) for one CSV file."""
    try:
        frame = pd.read_csv(pf.path, dtype=str, keep_default_na=False)
    except FileNotFoundError:
        raise ParseError(f"file not found: {pf.path}") from None
    except pd.errors.ParserError as exc:
        raise ParseError(f"{pf.path}: {exc}") from None
    if pf.date_column not in frame.columns:
        raise ParseError(f"{pf.path}: missing date column {pf.date_column!r}")
    dates = _parse_dates(frame[pf.date_column], pf)

    names = (
        list(pf.value_columns)
        if pf.value_columns is not None
        else [c for c in frame.columns if c != pf.date_column]
    )
    missing = [c for c in names if c not in frame.columns]
    if missing:
        raise ParseError(f"{pf.path}: missing columns {missing}")
    if not names:
        raise ParseError(f"{pf.path}: no value columns")

    values = np.empty((len(dates), len(names)))
    for c, name in enumerate(names):
        col = frame[name].astype(str).str.strip()
        numeric = pd.to_numeric(col.replace("", np.nan), errors="coerce")
        bad = (col != "") & numeric.isna()
        if bad.any():
            row = int(np.argmax(bad.to_numpy()))
            raise ParseError(
                f"{pf.path} row {row + 2} column {name!r}: "
                f"not a number: {col.iloc[row]!r}"
            )
        values[:, c] = numeric.to_numpy()
    if pf.percent_scale:
        values = values / 100.0
    return dates, names, values


def load_panels(config: RunConfig) -> Panels:
    """Read, align, and clean every configured panel file.

    All files are inner-joined on their (monthly) dates; an empty join
    raises :class:`EmptyIntersection`. Columns with missing values inside
    the joined window are dropped with a warning. The factors panel is
    reordered to put ``base_factors`` first, in config order.
    """
    if not config.files:
        raise ConfigError("no input files configured")
    parsed = [(pf, *_read_panel_file(pf)) for pf in config.files]

    common = set(parsed[0][1])
    for _, dates, _, _ in parsed[1:]:
        common &= set(dates)
    if not common:
        raise EmptyIntersection("no date is present in every configured file")
    joined = sorted(common)

    by_kind: dict[str, tuple[list[str], list[np.ndarray]]] = {
        k: ([], []) for k in PANEL_KINDS
    }
    for pf, dates, names, values in parsed:
        pos = {d: i for i, d in enumerate(dates)}
        rows = [pos[d] for d in joined]
        sub = values[rows, :]
        keep = ~np.isnan(sub).any(axis=0)
        for name, ok in zip(names, keep):
            if not ok:
                log.warning(
                    "%s: column %r has missing values in the joined window; dropped",
                    pf.path,
                    name,
                )
        kept_names, kept_cols = by_kind[pf.kind]
        for name in np.array(names)[keep]:
            if name in kept_names:
                raise ConfigError(f"duplicate column {name!r} in kind {pf.kind!r}")
        kept_names.extend(np.array(names)[keep])
        kept_cols.append(sub[:, keep])

    dates_t = tuple(joined)

    def build(kind: str) -> FactorPanel | None:
        names, cols = by_kind[kind]
        if not names:
            return None
        return FactorPanel(np.hstack(cols), dates_t, tuple(names))

    ret_names, ret_cols = by_kind["returns"]
    if not ret_names:
        raise ParseError("returns panel has no usable columns after cleaning")
    returns = ReturnsPanel(np.hstack(ret_cols), dates_t, tuple(ret_names))

    factors = build("factors")
    if factors is None:
        raise ConfigError("no factors panel configured")
    missing = [b for b in config.base_factors if b not in factors.names]
    if missing:
        raise UnknownBaseFactor(
            f"base factors {missing} not in the loaded factor panel "
            "(dropped or never present)"
        )
    if config.base_factors:
        order = [factors.index_of(b) for b in config.base_factors]
        order += [i for i in range(factors.n_factors) if i not in order]
        factors = factors.subset(tuple(order))

    return Panels(
        returns=returns,
        factors=factors,
        zoo=build("zoo"),
        macro=build("macro"),
        regimes=build("regimes"),
        dates=dates_t,
    )


# ------------------------------------------------------------- serialization


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return {
            f: _jsonable(getattr(obj, f)) for f in obj.__dataclass_fields__
        }
    return obj


def write_json_report(data, path: str | Path) -> None:
    """Deterministic JSON: sorted keys, full float precision, no timestamps."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(data), indent=2, sort_keys=True, allow_nan=True)
    path.write_text(text + "\n")


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv_report(path: str | Path, header: list[str], rows: list[list]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(outdir: str | Path, stage: str, config: RunConfig) -> None:
    """Config echo, input checksums, library version, creation time."""
    from . import __version__

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "version": __version__,
        "stage": stage,
        "seed": config.seed,
        "config": _jsonable(config.to_dict()),
        "inputs": {pf.path: sha256_file(pf.path) for pf in config.files},
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    (outdir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
