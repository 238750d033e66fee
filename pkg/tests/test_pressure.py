import math

import numpy as np
import pytest

import affthermo as at
from affthermo import SubshiftKind, affinity_dimension, gibbs_weights, measure_diagnostics, pressure_dispatch, pressure_estimate, pressure_gap
from affthermo.errors import EmptySigma, MissingInvertible, MissingRankOne, PreconditionError
from affthermo.pressure import CylinderMeasure, phi_proportional_measure, quasi_multiplicativity_report, uniform_measure

from conftest import random_contractive_tuple

NEG_INF = float("-inf")


def test_dispatch_zero_exponent(gap_tuple):
    est = pressure_dispatch(gap_tuple, 0.0, 6)
    assert est.lower == est.upper == pytest.approx(math.log(3), abs=1e-14)


def test_dispatch_log2_then_zero(proj_identity_pair):
    for n in range(1, 13):
        est = pressure_dispatch(proj_identity_pair, 1.0, n)
        assert est.lower == pytest.approx(math.log(2), abs=1e-12)
        assert est.upper == pytest.approx(math.log(2), abs=1e-12)
    for s in (1.25, 1.5, 2.0):
        for n in range(1, 13):
            est = pressure_dispatch(proj_identity_pair, s, n)
            assert est.lower == 0.0 and est.upper == 0.0


def test_dispatch_sigma_example(sigma_pair):
    # only two surviving words per level, each of norm one
    for n in (2, 5, 9):
        est = pressure_dispatch(sigma_pair, 0.7, n)
        assert est.upper == pytest.approx(math.log(2.0) / n, abs=1e-12)


def test_dispatch_no_invertible_above_one():
    ifs = at.AffineIFS.from_matrices([[[0, 0.5], [0, 0]], [[0.4, 0], [0, 0]]])
    est = pressure_dispatch(ifs, 1.5, 6)
    assert est.lower == NEG_INF and est.upper == NEG_INF


def test_fekete_monotone_upper():
    rng = np.random.default_rng(31)
    for _ in range(30):
        ifs = random_contractive_tuple(rng, 2)
        s = rng.uniform(0.0, 2.5)
        prev = math.inf
        for n in range(1, 6):
            est = pressure_estimate(ifs, SubshiftKind.FULL, s, n)
            assert est.upper <= prev + 1e-12
            assert est.lower <= est.upper + 1e-12
            prev = est.upper


def test_finite_depth_lipschitz_and_monotone():
    rng = np.random.default_rng(32)
    grid = np.linspace(0.0, 2.5, 11)
    for _ in range(20):
        ifs = random_contractive_tuple(rng, 3)
        uppers = [pressure_estimate(ifs, SubshiftKind.FULL, float(s), 4).upper for s in grid]
        log_top = math.log(ifs.max_norm())
        for (t, pt), (s, ps) in zip(zip(grid, uppers), zip(grid[1:], uppers[1:])):
            if ps == NEG_INF or pt == NEG_INF:
                continue
            assert ps <= pt + 1e-12  # non-increasing in s
            assert ps <= pt + (s - t) * log_top + 1e-9  # Lipschitz decline


def test_dispatch_consistency_with_full_shift():
    rng = np.random.default_rng(33)
    for _ in range(20):
        ifs = random_contractive_tuple(rng, 2)
        for s in (0.4, 0.9):
            routed = pressure_dispatch(ifs, s, 5)
            direct = pressure_estimate(ifs, SubshiftKind.FULL, s, 5)
            assert routed.upper == pytest.approx(direct.upper, abs=1e-12)


def test_conformal_bounds_coincide(sierpinski):
    for s in (0.0, 0.5, 1.3, 2.0, 2.9):
        est = pressure_estimate(sierpinski, SubshiftKind.FULL, s, 3)
        assert est.lower == est.upper
        assert est.certificate in ("conformal", "exact-count")


def test_affinity_dimension_three_similarities(sierpinski):
    lo, hi = affinity_dimension(sierpinski, SubshiftKind.FULL, tol=1e-3)
    assert hi - lo <= 1e-3
    assert lo <= math.log(3) / math.log(2) <= hi


def test_affinity_dimension_single_map():
    ifs = at.AffineIFS.from_matrices([[[0.6, 0], [0, 0.6]]])
    lo, hi = affinity_dimension(ifs, SubshiftKind.FULL, tol=1e-3)
    assert lo <= 0.0 <= hi


def test_affinity_dimension_two_halves_exact():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.5]]] * 2)
    lo, hi = affinity_dimension(ifs, SubshiftKind.FULL, tol=1e-3)
    assert lo <= 1.0 <= hi


def test_affinity_dimension_requires_contractive():
    ifs = at.AffineIFS.from_matrices([[[1.2, 0], [0, 0.5]]])
    with pytest.raises(PreconditionError):
        affinity_dimension(ifs)


def test_pressure_gap_certified(gap_tuple):
    result = pressure_gap(gap_tuple, 1.0, max_depth=14)
    assert result.status == "certified"
    assert result.lower_full > result.upper_invertible
    assert result.depth <= 14


def test_pressure_gap_zero_exponent(gap_tuple):
    result = pressure_gap(gap_tuple, 0.0)
    assert result.status == "certified"
    assert result.lower_full == pytest.approx(math.log(3))
    assert result.upper_invertible == pytest.approx(math.log(2))


def test_pressure_gap_preconditions():
    no_rank_one = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.5]], [[0.4, 0], [0, 0.3]]])
    with pytest.raises(MissingRankOne):
        pressure_gap(no_rank_one, 0.5)
    no_invertible = at.AffineIFS.from_matrices([[[0.2, 0.2], [0.2, 0.2]], [[0, 0.4], [0, 0]]])
    with pytest.raises(MissingInvertible):
        pressure_gap(no_invertible, 0.5)


def test_gibbs_weights_uniform_for_equal_ratios():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.5]]] * 2)
    mu = gibbs_weights(ifs, 0.8, 5)
    assert np.allclose(mu.weights, 2.0**-5)


def test_gibbs_weights_sigma_example(sigma_pair):
    mu = gibbs_weights(sigma_pair, 1.0, 4)
    assert sorted(mu.words) == [(0, 1, 1, 1), (1, 1, 1, 1)]
    assert np.allclose(mu.weights, 0.5)


def test_gibbs_weights_empty_sigma():
    ifs = at.AffineIFS.from_matrices([[[0, 0.5], [0, 0]]])
    with pytest.raises(EmptySigma):
        gibbs_weights(ifs, 0.5, 3)


def test_measure_diagnostics_uniform_entropy():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.5]]] * 2)
    mu = uniform_measure(ifs, SubshiftKind.FULL, 1)
    d = measure_diagnostics(ifs, mu, 0.8)
    assert d.entropy_rate == pytest.approx(math.log(2))
    assert d.defect >= -1e-9


def test_measure_diagnostics_phi_equality(gap_tuple):
    for s in (0.5, 1.0, 1.7):
        mu = phi_proportional_measure(gap_tuple, SubshiftKind.FULL, s, 4)
        d = measure_diagnostics(gap_tuple, mu, s)
        assert abs(d.defect) <= 1e-9


def test_measure_diagnostics_point_mass(gap_tuple):
    words = [(0, 0, 0)]
    mu = CylinderMeasure(3, tuple(words), np.array([1.0]), "custom", SubshiftKind.FULL)
    d = measure_diagnostics(gap_tuple, mu, 0.9)
    assert d.entropy_rate == 0.0
    from affthermo import svf_phi, word_product
    assert d.energy_rate == pytest.approx(math.log(svf_phi(word_product(gap_tuple, words[0]), 0.9)) / 3)


def test_cylinder_measure_validation():
    with pytest.raises(PreconditionError):
        CylinderMeasure(1, ((0,), (1,)), np.array([0.6, 0.6]), "custom")
    with pytest.raises(PreconditionError):
        CylinderMeasure(1, ((0,), (1,)), np.array([1.4, -0.4]), "custom")
    from affthermo.errors import DepthMismatch
    with pytest.raises(DepthMismatch):
        CylinderMeasure(2, ((0,), (1,)), np.array([0.5, 0.5]), "custom")


def test_quasi_multiplicativity_report(gap_tuple):
    report = quasi_multiplicativity_report(gap_tuple, 0.8)
    assert report
    for low, high in report.values():
        assert 0.0 < low <= high <= 1.0 + 1e-9
