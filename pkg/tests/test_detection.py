import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qspoof.detection import (DecisionConfig, DegenerateHypothesesError,
                              DegenerateHypothesesWarning, FockCutoff, Hypothesis, classify,
                              helstrom_threshold, optimal_heterodyne_threshold, p_het,
                              p_het_excess, p_opt, p_opt_excess, p_opt_oracle,
                              thermal_tail_mass)
from qspoof.scenario import DEFAULT_SCENARIO, hypothesis_noise_numbers

ONE_KM = hypothesis_noise_numbers(DEFAULT_SCENARIO)
TEN_KM = hypothesis_noise_numbers(DEFAULT_SCENARIO.replace(range_m=1e4))


def series_p_opt(n0, n1, terms=5000):
    """Literal Helstrom sums with the crossover found by direct comparison."""
    n = np.arange(terms)
    p0 = (n0 / (n0 + 1)) ** n / (n0 + 1)
    p1 = (n1 / (n1 + 1)) ** n / (n1 + 1)
    pick_h0 = p0 >= p1
    return 0.5 * p0[pick_h0].sum() + 0.5 * p1[~pick_h0].sum()


def test_threshold_hand_values():
    # floor(ln(3/2) / ln(4/3)) = floor(1.4094)
    assert helstrom_threshold(1.0, 2.0) == 1
    assert helstrom_threshold(32.0103, 32.0206) == 32


def test_threshold_errors():
    with pytest.raises(DegenerateHypothesesError):
        helstrom_threshold(3.0, 3.0)
    with pytest.raises(ValueError):
        helstrom_threshold(0.0, 1.0)
    with pytest.raises(ValueError):
        helstrom_threshold(2.0, 1.0)


def test_p_opt_toy_pair():
    # 1/2 (1 - (1/2)^2) + 1/2 (2/3)^2 = 0.375 + 0.2222...
    assert p_opt(1.0, 2.0) == pytest.approx(0.375 + 2 / 9, abs=1e-15)
    assert p_opt(1.0, 2.0) == pytest.approx(series_p_opt(1.0, 2.0), abs=1e-14)


def test_p_opt_degenerate_returns_half():
    with pytest.warns(DegenerateHypothesesWarning):
        assert p_opt(5.0, 5.0) == 0.5
    assert p_opt_oracle(5.0, 5.0) == 0.5


@pytest.mark.parametrize("n0, n1", [(0.5, 0.7), (1.0, 2.0), (3.0, 10.0), (32.0, 33.0),
                                    (ONE_KM.n0, ONE_KM.n1)])
def test_p_opt_matches_series(n0, n1):
    assert p_opt(n0, n1) == pytest.approx(series_p_opt(n0, n1), abs=1e-13)


def test_p_opt_one_km_excess():
    excess = p_opt_excess(ONE_KM.n0, ONE_KM.n1)
    assert excess == pytest.approx(p_opt_oracle(ONE_KM.n0, ONE_KM.n1) - 0.5, abs=1e-12)
    assert 5e-5 < excess < 7e-5


def test_oracle_toy_pair():
    assert p_opt_oracle(1.0, 2.0, FockCutoff(200)) == pytest.approx(p_opt(1.0, 2.0), abs=1e-12)


def test_oracle_refuses_short_cutoff():
    with pytest.raises(ValueError, match="tail mass"):
        p_opt_oracle(32.0, 33.0, FockCutoff(100))


def test_auto_cutoff_is_minimal():
    c = FockCutoff.for_pair(32.0, 33.0)
    assert thermal_tail_mass(33.0, c.n_max) < 1e-12
    assert thermal_tail_mass(33.0, c.n_max - 1) >= 1e-12


def test_oracle_range_grid():
    worst = 0.0
    for r in np.arange(1, 51) * 1e3:
        pair = hypothesis_noise_numbers(DEFAULT_SCENARIO.replace(range_m=float(r)))
        worst = max(worst, abs(p_opt(pair.n0, pair.n1) - p_opt_oracle(pair.n0, pair.n1)))
    assert worst < 1e-12


def test_mu_opt_hand_value():
    mu = optimal_heterodyne_threshold(1.0, 2.0)
    assert mu**2 == pytest.approx(6 * math.log(1.5), rel=1e-14)
    assert mu == pytest.approx(1.5598, abs=1e-4)


@pytest.mark.parametrize("n0", [0.0, 1.0, 32.0])
def test_mu_opt_degenerate_limit(n0):
    assert optimal_heterodyne_threshold(n0, n0) ** 2 == pytest.approx(n0 + 1, rel=1e-15)
    assert optimal_heterodyne_threshold(n0, n0 * (1 + 1e-12) + 1e-12) ** 2 == pytest.approx(
        n0 + 1, rel=1e-9)


def test_mu_opt_rejects_reversed():
    with pytest.raises(ValueError):
        optimal_heterodyne_threshold(2.0, 1.0)


@pytest.mark.parametrize("n0, n1", [(1.0, 2.0), (0.0, 0.3), (32.0, 33.0), (5.0, 50.0)])
def test_mu_opt_maximizes_p_het(n0, n1):
    mu_opt = optimal_heterodyne_threshold(n0, n1)
    grid = np.linspace(0, 5 * math.sqrt(n1 + 1), 20001)
    vals = np.array([p_het_excess(n0, n1, m) for m in grid])
    step = grid[1] - grid[0]
    assert abs(grid[vals.argmax()] - mu_opt) <= step
    assert p_het_excess(n0, n1, mu_opt) >= vals.max()


def test_p_het_limits_and_hand_value():
    assert p_het(1.0, 2.0, 0.0) == 0.5
    assert p_het(1.0, 2.0, 1e3) == 0.5
    mu = optimal_heterodyne_threshold(1.0, 2.0)
    # exp(-mu^2/2) = 8/27, exp(-mu^2/3) = 4/9
    assert p_het(1.0, 2.0, mu) == pytest.approx(0.5 * (1 - 8 / 27) + 0.5 * 4 / 9, abs=1e-15)
    assert p_het(1.0, 2.0, mu) == pytest.approx(0.57406, abs=2e-5)


def test_p_het_ten_km():
    mu = optimal_heterodyne_threshold(TEN_KM.n0, TEN_KM.n1)
    excess = p_het_excess(TEN_KM.n0, TEN_KM.n1, mu)
    assert 5e-9 <= excess <= 2e-8


def test_p_het_excess_matches_direct_formula_when_resolvable():
    n0, n1, mu = 2.0, 3.5, 1.7
    direct = 0.5 * (1 - math.exp(-mu**2 / (n0 + 1))) + 0.5 * math.exp(-mu**2 / (n1 + 1))
    assert p_het(n0, n1, mu) == pytest.approx(direct, abs=1e-15)


pairs = st.tuples(st.floats(1e-3, 1e4), st.floats(1e-9, 1e3)).map(lambda t: (t[0], t[0] + t[1]))


@settings(max_examples=300, deadline=None)
@given(pairs)
def test_heterodyne_never_beats_helstrom(pair):
    n0, n1 = pair
    mu = optimal_heterodyne_threshold(n0, n1)
    ph = p_het_excess(n0, n1, mu)
    po = p_opt_excess(n0, n1)
    assert 0.0 <= ph <= po * (1 + 1e-9) <= 0.5


@pytest.mark.parametrize("sep", [1e-6, 1e-2, 1.0])
def test_monotone_in_background(sep):
    n0 = np.linspace(0.1, 200, 400)
    po = [p_opt_excess(a, a + sep) for a in n0]
    ph = [p_het_excess(a, a + sep, optimal_heterodyne_threshold(a, a + sep)) for a in n0]
    assert np.all(np.diff(po) <= 1e-15 * np.abs(po[:-1]))
    assert np.all(np.diff(ph) <= 1e-15 * np.abs(ph[:-1]))


def test_classify():
    c = 2 - 1j
    assert classify(c, c, 0.5) == Hypothesis.H0
    assert classify(c + 3, c, 3.0) == Hypothesis.H0  # boundary inclusive
    assert classify(c + 3.0000001, c, 3.0) == Hypothesis.H1
    assert classify(c + 1e-9, c, 0.0) == Hypothesis.H1
    out = classify(np.array([c, c + 5]), c, 1.0)
    np.testing.assert_array_equal(out, [0, 1])


def test_decision_config_validation():
    DecisionConfig(1.0)
    with pytest.raises(ValueError):
        DecisionConfig(-1.0)
    with pytest.raises(ValueError):
        DecisionConfig(1.0, prior_h1=1.5)


def test_no_warning_for_distinct_pairs():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        p_opt(1.0, 1.5)
