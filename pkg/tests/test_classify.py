import math

import numpy as np
import pytest

import affthermo as at
from affthermo import Mat2, find_domination_certificate, is_irreducible, is_strictly_affine, jsr_bounds
from affthermo.classify import verify_certificate
from affthermo.errors import NoInvertibleLetters, RankZeroLetter

from conftest import random_contractive_tuple


def test_irreducible_upper_triangular_pair():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0.1], [0, 0.3]], [[0.4, 0.2], [0, 0.2]]])
    result = is_irreducible(ifs)
    assert not result.irreducible
    assert result.common_line == at.Direction(0.0)


def test_irreducible_rotation_pair():
    ifs = at.AffineIFS.from_matrices(
        [(0.5 * Mat2.rotation(1.0)).to_array(), [[0.5, 0], [0, 0.2]]]
    )
    assert is_irreducible(ifs).irreducible


def test_irreducible_diagonal_tuple():
    ifs = at.AffineIFS.from_matrices([[[0.4, 0], [0, 0.4]], [[0.4, 0], [0, 0]]])
    result = is_irreducible(ifs)
    assert not result.irreducible
    assert result.common_line is not None


def test_common_line_witness_is_invariant():
    # the returned line must actually be preserved by every letter
    rng = np.random.default_rng(21)
    for _ in range(50):
        u = rng.standard_normal((2, 2))
        base = np.array([[rng.uniform(0.2, 0.8), rng.uniform(-0.3, 0.3)], [0.0, rng.uniform(0.2, 0.8)]])
        other = np.array([[rng.uniform(0.2, 0.8), rng.uniform(-0.3, 0.3)], [0.0, rng.uniform(0.2, 0.8)]])
        ifs = at.AffineIFS.from_matrices([base, other])
        result = is_irreducible(ifs)
        assert not result.irreducible
        x = result.common_line.unit_vector()
        for m in ifs.matrices:
            y = m.apply(x)
            cross = abs(y[0] * x[1] - y[1] * x[0])
            assert cross <= 1e-9 * max(float(np.hypot(*y)), 1.0)


def test_domination_positive_tuple(gap_tuple):
    cert = find_domination_certificate(gap_tuple)
    assert cert is not None
    assert 0.0 < cert.kappa <= 1.0
    # the cone sits inside the first quadrant of directions
    for lo, hi in cert.intervals:
        assert hi - lo < math.pi / 2 + 0.5


def test_domination_rotation_inconclusive():
    ifs = at.AffineIFS.from_matrices(
        [(0.5 * Mat2.rotation(math.pi / 2)).to_array(), [[0.5, 0], [0, 0.2]]]
    )
    assert find_domination_certificate(ifs) is None


def test_domination_invertible_pair_kappa_floor():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.1]], [[0.4, 0.2], [0.1, 0.3]]])
    cert = find_domination_certificate(ifs)
    assert cert is not None
    # independent grid-search oracle for the cone constant at depth 6
    thetas = np.concatenate(
        [np.linspace(lo, hi, 500) for lo, hi in cert.intervals]
    )
    X = np.stack([np.cos(thetas), np.sin(thetas)])
    mats = [m.to_array() for m in ifs.matrices]
    observed = 1.0
    frontier = [np.eye(2)]
    for _ in range(6):
        frontier = [p @ m for p in frontier for m in mats]
        for p in frontier:
            norm = np.linalg.norm(p, 2)
            restricted = np.min(np.hypot(*(p @ X)))
            observed = min(observed, restricted / norm)
    assert observed >= cert.kappa


def test_domination_rejects_zero_letter():
    ifs = at.AffineIFS.from_matrices([[[0, 0], [0, 0]], [[0.5, 0], [0, 0.5]]])
    with pytest.raises(RankZeroLetter):
        find_domination_certificate(ifs)


def test_certificate_reverification(gap_tuple):
    cert = find_domination_certificate(gap_tuple)
    assert verify_certificate(gap_tuple, cert, grid_scale=2, extra_depth=2)


def test_strictly_affine_single_diagonal():
    ifs = at.AffineIFS.from_matrices([[[0.5, 0], [0, 0.25]]])
    result = is_strictly_affine(ifs)
    assert result.status == "witness"
    assert result.witness == (0,)


def test_strictly_affine_rotation_inconclusive():
    ifs = at.AffineIFS.from_matrices([(0.9 * Mat2.rotation(math.pi / 2)).to_array()])
    assert is_strictly_affine(ifs, max_depth=6).status == "inconclusive"


def test_strictly_affine_positive_pair():
    ifs = at.AffineIFS.from_matrices([[[0.4, 0.1], [0.1, 0.3]], [[0.3, 0.1], [0.2, 0.4]]])
    result = is_strictly_affine(ifs, max_depth=3)
    assert result.status == "witness"
    assert len(result.witness) <= 3


def test_strictly_affine_requires_invertible():
    ifs = at.AffineIFS.from_matrices([[[0, 1], [0, 0]]])
    with pytest.raises(NoInvertibleLetters):
        is_strictly_affine(ifs)


def test_jsr_scalar_matrix():
    ifs = at.AffineIFS.from_matrices([[[0.7, 0], [0, 0.7]]])
    assert jsr_bounds(ifs, 4) == (0.7, 0.7)


def test_jsr_sigma_example(sigma_pair):
    lower, upper = jsr_bounds(sigma_pair, 4)
    assert lower == pytest.approx(1.0)
    assert upper == pytest.approx(1.0)


def test_jsr_mixed_pair_brackets_half():
    ifs = at.AffineIFS.from_matrices(
        [[[0.5, 0], [0, 0.2]], (0.5 * Mat2.rotation(math.pi / 2)).to_array()]
    )
    lower, upper = jsr_bounds(ifs, 8)
    assert lower <= 0.5 <= upper
    assert upper - lower <= 0.05


def test_jsr_bracket_monotone():
    rng = np.random.default_rng(22)
    for _ in range(20):
        ifs = random_contractive_tuple(rng, 2)
        prev = (0.0, math.inf)
        for n in range(1, 6):
            lower, upper = jsr_bounds(ifs, n)
            assert lower >= prev[0] - 1e-12
            assert upper <= prev[1] + 1e-12
            assert lower <= upper + 1e-12
            prev = (lower, upper)


def test_classify_gap_tuple(gap_tuple):
    info = at.classify(gap_tuple)
    assert info.rank_profile == [2, 2, 1]
    assert info.contains_rank_one
    assert info.contains_invertible
    assert info.irreducible.irreducible
    assert info.dominated is not None
    assert info.continuity_at_one is False
    assert info.continuity_at_zero is True
    report = info.to_report()
    assert "dominated: certified" in report
    assert "continuity_at_one: False" in report


def test_classify_invertible_irreducible_continuous_at_one():
    ifs = at.AffineIFS.from_matrices(
        [(0.5 * Mat2.rotation(1.0)).to_array(), [[0.5, 0], [0, 0.2]]]
    )
    info = at.classify(ifs)
    assert not info.contains_rank_one
    assert info.continuity_at_one is True


def test_classify_single_nilpotent_discontinuous_at_zero():
    ifs = at.AffineIFS.from_matrices([[[0, 1], [0, 0]]])
    info = at.classify(ifs)
    assert info.continuity_at_zero is False


def test_irreducible_delta_lower_bound():
    # for irreducible tuples no direction is crushed by every letter
    ifs = at.AffineIFS.from_matrices(
        [(0.5 * Mat2.rotation(1.0)).to_array(), [[0.5, 0], [0, 0.2]]]
    )
    assert is_irreducible(ifs).irreducible
    thetas = np.linspace(0, math.pi, 2000, endpoint=False)
    X = np.stack([np.cos(thetas), np.sin(thetas)])
    best = np.zeros(len(thetas))
    for m in ifs.matrices:
        best = np.maximum(best, np.hypot(*(m.to_array() @ X)))
    assert float(np.min(best)) > 0.0
