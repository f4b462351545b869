"""Panel container validation and alignment."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import factor_panel, month_dates, returns_panel
from fsfmb import FactorPanel, ReturnsPanel, check_aligned
from fsfmb.errors import DimensionMismatch, Misalignment, NonFiniteInput


def test_basic_accessors():
    r = returns_panel(np.arange(12.0).reshape(4, 3))
    assert r.n_periods == 4 and r.n_assets == 3
    assert_allclose(r.mean_returns(), [4.5, 5.5, 6.5])
    f = factor_panel(np.arange(8.0).reshape(4, 2), ("mkt", "hml"))
    assert f.n_factors == 2
    assert f.index_of("hml") == 1
    assert_allclose(f.column("mkt"), [0.0, 2.0, 4.0, 6.0])
    assert_allclose(f.demeaned().mean(axis=0), 0.0, atol=1e-15)


def test_subset_preserves_order():
    f = factor_panel(np.arange(12.0).reshape(4, 3), ("a", "b", "c"))
    sub = f.subset((2, 0))
    assert sub.names == ("c", "a")
    assert_allclose(sub.values[:, 0], f.values[:, 2])


def test_shape_and_name_validation():
    with pytest.raises(DimensionMismatch):
        ReturnsPanel(np.ones((3, 2)), month_dates(4), ("a0", "a1"))
    with pytest.raises(DimensionMismatch):
        FactorPanel(np.ones((4, 2)), month_dates(4), ("f", "f"))
    with pytest.raises(NonFiniteInput):
        returns_panel(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(KeyError):
        factor_panel(np.ones((4, 2))).index_of("nope")


def test_check_aligned():
    r = returns_panel(np.ones((4, 2)))
    f = factor_panel(np.ones((4, 2)))
    check_aligned(r, f)  # same dates: fine
    g = FactorPanel(np.ones((4, 2)), month_dates(4, start_year=2001), ("f1", "f2"))
    with pytest.raises(Misalignment):
        check_aligned(r, g)
    h = factor_panel(np.ones((5, 2)))
    with pytest.raises(Misalignment):
        check_aligned(r, h)
