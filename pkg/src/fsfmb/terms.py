"""Higher-order factor construction: powers and interactions of base factors.

Terms are raw products of base columns with no demeaning or scaling. Labels are
canonical: components sorted by descending exponent, ties by base-panel
order, exponent 1 rendered without a digit ("SMB2*Mom", "Mkt-RF2*RMW").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownBaseFactor, UnsupportedDegree
from .panels import FactorPanel

__all__ = ["TermSpec", "EXPANSION_MODES", "expand_terms", "materialize", "expanded_panel"]

EXPANSION_MODES = ("full", "powers_only", "interactions_only")


@dataclass(frozen=True)
class TermSpec:
    """One product term: ``exponents`` maps base-factor name to power.

    Stored as a tuple of (name, power) pairs in canonical label order.
    """

    exponents: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        if not self.exponents:
            raise ValueError("a term needs at least one component")
        if any(p < 1 for _, p in self.exponents):
            raise ValueError("exponents must be positive")

    @property
    def degree(self) -> int:
        return sum(p for _, p in self.exponents)

    @property
    def label(self) -> str:
        return "*".join(
            f"{name}{power}" if power > 1 else name for name, power in self.exponents
        )

    @classmethod
    def from_powers(cls, base_order: tuple[str, ...], powers: dict[str, int]) -> "TermSpec":
        # canonical order: descending exponent, ties by position in base panel
        rank = {name: i for i, name in enumerate(base_order)}
        items = sorted(powers.items(), key=lambda kv: (-kv[1], rank[kv[0]]))
        return cls(exponents=tuple(items))


def _validate_mode_degree(mode: str, max_degree: int) -> None:
    if mode not in EXPANSION_MODES:
        raise ValueError(f"mode must be one of {EXPANSION_MODES}, got {mode!r}")
    if not 2 <= max_degree <= 4:
        raise UnsupportedDegree(f"max_degree must be in 2..4, got {max_degree}")


def expand_terms(
    base_names: tuple[str, ...] | list[str],
    max_degree: int = 3,
    mode: str = "full",
) -> list[TermSpec]:
    """Enumerate degree >= 2 terms over ``base_names`` in deterministic order.

    Within each degree, pure powers come first, then interactions. For k base
    factors the full counts are:

    degree 2: k squares + k(k-1)/2 pairwise products
    degree 3: k cubes + k(k-1) square-times-linear products
    degree 4: k quartics + k(k-1)/2 square-square + k(k-1) cube-times-linear

    ``powers_only`` keeps the pure-power families, ``interactions_only`` the
    cross products. The list is a pure function of (names order, degree,
    mode): permuting input names permutes output labels accordingly.
    """
    _validate_mode_degree(mode, max_degree)
    names = tuple(base_names)
    if len(set(names)) != len(names):
        raise ValueError("base names must be unique")
    k = len(names)
    powers = mode in ("full", "powers_only")
    interactions = mode in ("full", "interactions_only")
    out: list[TermSpec] = []

    def term(powmap: dict[str, int]) -> TermSpec:
        return TermSpec.from_powers(names, powmap)

    # degree 2
    if powers:
        out += [term({names[i]: 2}) for i in range(k)]
    if interactions:
        out += [
            term({names[i]: 1, names[j]: 1})
            for i in range(k)
            for j in range(i + 1, k)
        ]
    # degree 3
    if max_degree >= 3:
        if powers:
            out += [term({names[i]: 3}) for i in range(k)]
        if interactions:
            out += [
                term({names[i]: 2, names[j]: 1})
                for i in range(k)
                for j in range(k)
                if j != i
            ]
    # degree 4
    if max_degree >= 4:
        if powers:
            out += [term({names[i]: 4}) for i in range(k)]
        if interactions:
            out += [
                term({names[i]: 2, names[j]: 2})
                for i in range(k)
                for j in range(i + 1, k)
            ]
            out += [
                term({names[i]: 3, names[j]: 1})
                for i in range(k)
                for j in range(k)
                if j != i
            ]
    return out


def materialize(base: FactorPanel, terms: list[TermSpec]) -> FactorPanel:
    """Compute term columns from a base panel; column order follows ``terms``."""
    cols = np.empty((base.n_periods, len(terms)))
    for pos, spec in enumerate(terms):
        col = np.ones(base.n_periods)
        for name, power in spec.exponents:
            if name not in base.names:
                raise UnknownBaseFactor(
                    f"term {spec.label!r} references unknown base factor {name!r}"
                )
            col = col * base.column(name) ** power
        cols[:, pos] = col
    return FactorPanel(
        values=cols,
        dates=base.dates,
        names=tuple(t.label for t in terms),
        terms=tuple(terms),
    )


def expanded_panel(
    base: FactorPanel,
    max_degree: int = 3,
    mode: str = "full",
) -> FactorPanel:
    """Base columns followed by their higher-order terms, as one panel."""
    terms = expand_terms(base.names, max_degree, mode)
    built = materialize(base, terms)
    base_terms = tuple(TermSpec(((n, 1),)) for n in base.names)
    return FactorPanel(
        values=np.hstack([base.values, built.values]),
        dates=base.dates,
        names=base.names + built.names,
        terms=base_terms + (built.terms or ()),
    )
