import math

import pytest

from ggl.analysis import (DegenerateSeries, delta_star, fit_exponent, general_lemma_constants,
                          verify_general_lemma)
from ggl.orbits import delta, orbit_tables
from ggl.tree import ERSCHLER, RHO
from ggl.words import norm_table


def test_grig_delta_slope_below_one():
    D, _ = orbit_tables(16)
    fit = fit_exponent(D, "delta")
    assert 0 < fit["slope"] < 1 and fit["slope_below_one"]
    assert fit["window"] == [8, 16]
    assert abs(fit["reference"]["alpha"] - 0.7674) < 5e-4


def test_constant_series_has_zero_slope():
    assert fit_exponent([5] * 10, "delta")["slope"] == 0.0


def test_linear_table_has_slope_one():
    table = [delta("ad" * n, RHO, ERSCHLER) for n in range(40)]
    assert abs(fit_exponent(table, "delta")["slope"] - 1) < 0.05


def test_growth_fit_skips_small_values():
    series = [math.exp(n ** 0.75) for n in range(30)]
    fit = fit_exponent(series, "growth")
    assert abs(fit["slope"] - 0.75) < 1e-6
    assert "slope_below_one" not in fit
    assert all(int(n) >= 2 for n in fit["per_n"])


def test_degenerate_series():
    with pytest.raises(DegenerateSeries):
        fit_exponent([1, 2], "delta")
    with pytest.raises(DegenerateSeries):
        fit_exponent([1, 1, 1, 1], "growth")
    with pytest.raises(ValueError):
        fit_exponent([1, 2, 3, 4], "speed")


def test_comparison_bound_constants():
    t = norm_table()
    k = general_lemma_constants(t.eta, t.C)
    assert abs(k["M"] - 2) < 1e-12  # eta + eta^2 + eta^3 = 2
    assert abs(k["K"] - t.C / (2 - t.eta)) < 1e-12
    assert abs(k["N"] - k["K"] / (1 - k["alpha"])) < 1e-12
    with pytest.raises(ValueError):
        general_lemma_constants(1.0, 1.0)


def test_comparison_bound_on_grig_table():
    D, _ = orbit_tables(16)
    rep = verify_general_lemma(D)
    assert rep["verdict"] and rep["monotone"]
    c = rep["constants"]
    for row in rep["rows"]:
        assert row["holds"]
        assert abs(row["bound"] - delta_star(row["n"], rep["L"], c["K"], c["N"], c["alpha"])) < 1e-8


def test_comparison_function_shape():
    # monotone everywhere and concave on each branch; at the junction N the
    # left slope is smaller than the right one, so the kink is convex
    D, _ = orbit_tables(14)
    rep = verify_general_lemma(D)
    left, right = rep["junction_slopes"]
    assert rep["monotone"]
    assert left < right and not rep["concave"]


def test_comparison_bound_rejects_large_values():
    D, _ = orbit_tables(10)
    bad = list(D)
    bad[-1] = 1000
    assert not verify_general_lemma(bad)["verdict"]
