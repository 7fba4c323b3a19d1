"""Decompositions: linear identity checks, nonlinear telescoping and oracles."""

import math

import numpy as np
import pytest

from conftest import make_group
from gapdecomp import (
    ConfigError,
    DataError,
    GroupSample,
    ShapeError,
    UndefinedPercentageError,
    decomposition_report,
    fairlie_decompose,
    fit_logit,
    harmonize_groups,
    oaxaca_linear,
    oaxaca_report,
    percentage_contributions,
)
from gapdecomp._kernels import logistic
from gapdecomp.synth import exact_fairlie_small


def random_group(label, seed, n, shift=0.0):
    """Group with two categorical variables and outcome driven by both.

    The first rows enumerate all categories so declaration order (and with
    it the design column layout) is identical across seeds.
    """
    rng = np.random.default_rng(seed)
    residence = np.r_[
        ["rural", "urban"],
        rng.choice(["rural", "urban"], size=n - 2, p=[0.5 - shift, 0.5 + shift]),
    ]
    wealth = np.r_[
        ["low", "mid", "high"],
        rng.choice(
            ["low", "mid", "high"], size=n - 3, p=[0.3, 0.4 + shift, 0.3 - shift]
        ),
    ]
    eta = (
        -0.4
        + 0.7 * (residence == "urban")
        + 0.5 * (wealth == "mid")
        - 0.3 * (wealth == "high")
    )
    y = (rng.random(n) < logistic(eta)).astype(int)
    return make_group(
        label,
        y,
        base={"residence": "rural", "wealth": "low"},
        residence=residence,
        wealth=wealth,
    )


# -- linear (Blinder-Oaxaca) ---------------------------------------------------------


def test_oaxaca_identity_explained_plus_unexplained_is_gap():
    g1 = random_group("a", 21, 300, shift=0.1)
    g2 = random_group("b", 22, 240)
    result = oaxaca_linear(g1, g2)
    assert result.explained + result.unexplained == pytest.approx(
        result.gap, abs=1e-12
    )
    assert result.gap == pytest.approx(g1.y.mean() - g2.y.mean(), abs=1e-14)


def test_oaxaca_per_variable_matches_direct_formula():
    g1 = random_group("a", 23, 60, shift=0.15)
    g2 = random_group("b", 24, 80)
    result = oaxaca_linear(g1, g2)
    # independent route: explicit lstsq fit and column-mean differences
    b1, *_ = np.linalg.lstsq(g1.X.values, g1.y, rcond=None)
    per_col = (g1.X.values.mean(axis=0) - g2.X.values.mean(axis=0)) * b1
    for var in g1.X.variable_names:
        cols = g1.X.variable_columns(var)
        assert result.per_variable[var] == pytest.approx(
            per_col[cols].sum(), abs=1e-12
        )
    assert result.explained == pytest.approx(per_col.sum(), abs=1e-12)


def test_oaxaca_identical_groups_all_zero():
    g = random_group("a", 25, 150)
    twin = GroupSample("b", g.X, g.y)
    result = oaxaca_linear(g, twin)
    assert result.gap == 0.0
    assert result.explained == pytest.approx(0.0, abs=1e-13)
    assert result.unexplained == pytest.approx(0.0, abs=1e-13)


def test_oaxaca_requires_harmonized_designs():
    g1 = random_group("a", 26, 100)
    bare = make_group("b", [0, 1] * 50, residence=["residence_0", "residence_1"] * 50)
    with pytest.raises(ShapeError):
        oaxaca_linear(g1, bare)


def test_oaxaca_report_text():
    g1 = random_group("a", 27, 120, shift=0.1)
    g2 = random_group("b", 28, 90)
    text = oaxaca_report(oaxaca_linear(g1, g2))
    assert "explained" in text and "unexplained" in text
    assert "residence" in text and "wealth" in text


# -- group harmonization -------------------------------------------------------------


def test_harmonize_noop_when_already_aligned():
    g1 = random_group("a", 29, 100)
    g2 = random_group("b", 30, 100)
    h1, h2 = harmonize_groups(g1, g2)
    assert h1 is g1 and h2 is g2


def test_harmonize_drops_columns_missing_in_other_group():
    # wealth_2 never occurs in group b, so its dummy exists only in a
    g1 = make_group(
        "a",
        [1, 0, 1, 0, 1, 0],
        wealth=["wealth_0", "wealth_1", "wealth_2"] * 2,
    )
    g2 = make_group(
        "b",
        [1, 0, 0, 1, 0, 0],
        wealth=["wealth_0", "wealth_1", "wealth_0", "wealth_1", "wealth_0", "wealth_1"],
    )
    h1, h2 = harmonize_groups(g1, g2)
    assert h1.X.columns == h2.X.columns
    assert ("wealth", "wealth_2") not in h1.X.columns
    reasons = {(var, cat): why for var, cat, why in h1.X.dropped}
    assert reasons[("wealth", "wealth_2")] == "not present in group 'b'"
    assert h2.X.dropped == ()  # nothing removed from the smaller design


def test_harmonize_realigns_column_order():
    g1 = random_group("a", 31, 80)
    g2_raw = random_group("b", 32, 70)
    k = g2_raw.X.k
    shuffled = g2_raw.X.select_columns([0] + list(range(k - 1, 0, -1)))
    g2 = GroupSample("b", shuffled, g2_raw.y)
    assert g1.X.columns != g2.X.columns
    h1, h2 = harmonize_groups(g1, g2)
    assert h1.X.columns == h2.X.columns == g1.X.columns
    np.testing.assert_array_equal(h2.X.values, g2_raw.X.values)


def test_group_sample_validation():
    g = random_group("a", 33, 50)
    with pytest.raises(ShapeError):
        GroupSample("bad", g.X, g.y[:-1])
    with pytest.raises(DataError):
        GroupSample("bad", g.X, np.full(g.n, 2.0))


# -- nonlinear (Fairlie) -------------------------------------------------------------


def test_fairlie_identical_groups_explain_nothing():
    g = random_group("a", 34, 200)
    twin = GroupSample("b", g.X, g.y)
    result = fairlie_decompose(g, twin, replications=5, seed=1)
    assert result.gap == 0.0
    assert result.total_explained == pytest.approx(0.0, abs=1e-12)
    assert result.pct_explained is None
    for c in result.contributions:
        assert c.coef == pytest.approx(0.0, abs=1e-12)
        assert c.pct is None


def test_fairlie_equal_n_fixed_order_detail_sums_to_total():
    # equal sizes: no subsampling, so the sequential switches telescope
    # from group 1's design all the way to group 2's
    g1 = random_group("a", 35, 150, shift=0.12)
    g2 = random_group("b", 36, 150)
    result = fairlie_decompose(g1, g2, replications=1, seed=9, ordering="fixed")
    total = sum(c.coef for c in result.contributions)
    assert total == pytest.approx(result.total_explained, abs=1e-10)


def test_fairlie_equal_n_hand_worked_single_variable():
    # group a: 3 urban with outcomes (1,1,0), 3 rural with (1,0,0)
    # closed-form fit: p(urban) = 2/3, p(rural) = 1/3
    # group b: 1 urban, 5 rural -> rank matching pairs two of a's urban
    # rows with rural rows of b, each contributing F(ln 2) - F(-ln 2)
    # = 1/3; the contribution is (2/6)(1/3) = 1/9 exactly
    g1 = make_group(
        "a",
        [1, 1, 0, 1, 0, 0],
        base={"residence": "rural"},
        residence=["urban"] * 3 + ["rural"] * 3,
    )
    g2 = make_group(
        "b",
        [1, 1, 0, 0, 0, 0],
        base={"residence": "rural"},
        residence=["urban"] + ["rural"] * 5,
    )
    result = fairlie_decompose(g1, g2, replications=1, seed=0, ordering="fixed")
    # the MLE itself is only located to the 1e-8 score tolerance, which
    # carries into the fitted probabilities
    assert result.total_explained == pytest.approx(1 / 9, abs=1e-8)
    assert result.contributions[0].coef == pytest.approx(1 / 9, abs=1e-8)
    assert result.gap == pytest.approx(3 / 6 - 2 / 6, abs=1e-14)
    assert result.pct_explained == pytest.approx(100 * (1 / 9) / (1 / 6), abs=1e-5)
    # no subsampling and no permutation: the seed cannot matter here
    again = fairlie_decompose(g1, g2, replications=1, seed=77, ordering="fixed")
    assert again.contributions[0].coef == result.contributions[0].coef


def test_fairlie_matches_plain_enumeration_oracle():
    g1 = random_group("a", 37, 18, shift=0.1)
    g2 = random_group("b", 38, 18)
    beta = fit_logit(g1.X, g1.y).beta
    expected = exact_fairlie_small(g1, g2, beta, ordering=g1.X.variable_names)
    result = fairlie_decompose(g1, g2, replications=1, seed=3, ordering="fixed")
    for c in result.contributions:
        assert c.coef == pytest.approx(expected[c.variable], abs=1e-12), c.variable


def test_fairlie_seed_reproducibility():
    g1 = random_group("a", 39, 220, shift=0.1)
    g2 = random_group("b", 40, 150)
    a = fairlie_decompose(g1, g2, replications=30, seed=11)
    b = fairlie_decompose(g1, g2, replications=30, seed=11)
    c = fairlie_decompose(g1, g2, replications=30, seed=12)
    for ca, cb in zip(a.contributions, b.contributions):
        assert ca.coef == cb.coef and ca.se == cb.se
    assert any(ca.coef != cc.coef for ca, cc in zip(a.contributions, c.contributions))


def test_fairlie_thread_count_does_not_change_numbers():
    g1 = random_group("a", 41, 260, shift=0.1)
    g2 = random_group("b", 42, 180)
    single = fairlie_decompose(g1, g2, replications=24, seed=5, threads=1)
    pooled = fairlie_decompose(g1, g2, replications=24, seed=5, threads=4)
    for cs, cp in zip(single.contributions, pooled.contributions):
        assert cs.coef == cp.coef
        assert cs.se == cp.se


def test_fairlie_two_seeds_agree_within_monte_carlo_error():
    g1 = random_group("a", 43, 400, shift=0.12)
    g2 = random_group("b", 44, 260)
    a = fairlie_decompose(g1, g2, replications=500, seed=101)
    b = fairlie_decompose(g1, g2, replications=500, seed=202)
    for ca, cb in zip(a.contributions, b.contributions):
        spread = 3.0 * math.hypot(ca.se, cb.se)
        assert abs(ca.coef - cb.coef) <= spread + 1e-12, ca.variable


def test_fairlie_near_linear_regime_matches_oaxaca():
    # weak effects keep probabilities near 1/2 where the logistic curve
    # is almost linear, so both decompositions see about the same split
    rng = np.random.default_rng(45)
    n = 4000
    x1 = (rng.random(n) < 0.55).astype(float)
    x2 = (rng.random(n) < 0.40).astype(float)
    x1[:2] = x2[:2] = [0.0, 1.0]  # anchor category declaration order
    y1 = (rng.random(n) < logistic(0.05 + 0.12 * x1)).astype(float)
    y2 = (rng.random(n) < logistic(0.05 + 0.12 * x2)).astype(float)

    def group(label, x, y):
        cats = np.where(x > 0, "urban", "rural")
        return make_group(label, y, base={"residence": "rural"}, residence=cats)

    g1, g2 = group("a", x1, y1), group("b", x2, y2)
    nonlinear = fairlie_decompose(g1, g2, replications=50, seed=7)
    linear = oaxaca_linear(g1, g2)
    assert nonlinear.total_explained == pytest.approx(linear.explained, rel=0.02)


def test_fairlie_pooled_coefficients():
    g1 = random_group("a", 46, 120, shift=0.1)
    g2 = random_group("b", 47, 100)
    result = fairlie_decompose(g1, g2, replications=2, seed=4, coef_source="pooled")
    stacked = np.vstack([g1.X.values, g2.X.values])
    fit = fit_logit(stacked, np.concatenate([g1.y, g2.y]))
    expected = float(
        logistic(g1.X.values @ fit.beta).mean()
        - logistic(g2.X.values @ fit.beta).mean()
    )
    assert result.total_explained == pytest.approx(expected, abs=1e-12)
    assert result.coef_source == "pooled"


def test_fairlie_coef_source_changes_results():
    g1 = random_group("a", 48, 150, shift=0.15)
    g2 = random_group("b", 49, 130)
    one = fairlie_decompose(g1, g2, replications=3, seed=6, coef_source="group1")
    two = fairlie_decompose(g1, g2, replications=3, seed=6, coef_source="group2")
    assert one.total_explained != two.total_explained


def test_fairlie_single_replication_se_is_nan():
    g1 = random_group("a", 50, 90, shift=0.1)
    g2 = random_group("b", 51, 70)
    result = fairlie_decompose(g1, g2, replications=1, seed=2)
    for c in result.contributions:
        assert math.isnan(c.se)
    assert "—" in decomposition_report(result)


def test_fairlie_zero_gap_reports_na():
    g1 = make_group(
        "a",
        [1, 0, 1, 0],
        base={"residence": "rural"},
        residence=["urban", "urban", "rural", "rural"],
    )
    g2 = make_group(
        "b",
        [1, 0, 1, 0],
        base={"residence": "rural"},
        residence=["urban", "rural", "rural", "rural"],
    )
    assert g1.y.mean() == g2.y.mean()
    result = fairlie_decompose(g1, g2, replications=1, seed=1, ordering="fixed")
    assert result.pct_explained is None
    assert all(c.pct is None for c in result.contributions)
    assert "n/a" in decomposition_report(result)


def test_fairlie_validation_errors():
    g1 = random_group("a", 52, 60)
    g2 = random_group("b", 53, 60)
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, replications=0, seed=1)
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed=-1)
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed="7")
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed=True)
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed=1, coef_source="grand")
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed=1, ordering="shuffled")
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, seed=1, threads=0)
    bare = make_group("c", [0, 1] * 30, residence=["residence_0", "residence_1"] * 30)
    with pytest.raises(ShapeError):
        fairlie_decompose(g1, bare, seed=1)


def test_fairlie_respects_threads_env(monkeypatch):
    g1 = random_group("a", 54, 100, shift=0.1)
    g2 = random_group("b", 55, 80)
    monkeypatch.setenv("GAPDECOMP_THREADS", "3")
    from_env = fairlie_decompose(g1, g2, replications=12, seed=8)
    monkeypatch.setenv("GAPDECOMP_THREADS", "1")
    sequential = fairlie_decompose(g1, g2, replications=12, seed=8)
    for ce, cs in zip(from_env.contributions, sequential.contributions):
        assert ce.coef == cs.coef
    monkeypatch.setenv("GAPDECOMP_THREADS", "zero")
    with pytest.raises(ConfigError):
        fairlie_decompose(g1, g2, replications=12, seed=8)


# -- percentages and reports ---------------------------------------------------------


def test_percentage_contributions_routes():
    assert percentage_contributions({"a": 0.02, "b": -0.01}, 0.04) == {
        "a": 50.0,
        "b": -25.0,
    }
    np.testing.assert_allclose(
        percentage_contributions(np.array([0.02, -0.01]), 0.04), [50.0, -25.0]
    )
    with pytest.raises(UndefinedPercentageError):
        percentage_contributions({"a": 0.02}, 0.0)


def test_decomposition_report_layout():
    g1 = random_group("a", 56, 140, shift=0.12)
    g2 = random_group("b", 57, 110)
    result = fairlie_decompose(g1, g2, replications=8, seed=13)
    text = decomposition_report(result)
    assert "Number of observations" in text
    assert "Pr(outcome != 0 | G = a)" in text
    assert "Pr(outcome != 0 | G = b)" in text
    assert "Difference" in text
    assert "Total explained" in text
    assert "% explained" in text
    assert "residence" in text and "wealth" in text
    assert f"seed: {result.seed}" in text


def test_result_json_dict_roundtrip_values():
    g1 = random_group("a", 58, 90, shift=0.1)
    g2 = random_group("b", 59, 80)
    result = fairlie_decompose(g1, g2, replications=4, seed=21)
    d = result.to_json_dict()
    assert d["n1"] == g1.n and d["n2"] == g2.n
    assert d["gap"] == result.gap
    assert d["explained"] == result.total_explained
    assert d["replications"] == 4 and d["seed"] == 21
    assert [c["variable"] for c in d["contributions"]] == list(
        g1.X.variable_names
    )
    one = fairlie_decompose(g1, g2, replications=1, seed=21)
    assert all(c["se"] is None for c in one.to_json_dict()["contributions"])
