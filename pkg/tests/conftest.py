import numpy as np
import pytest

import affthermo as at

GAP_MATRICES = [
    [[0.4, 0.1], [0.1, 0.3]],
    [[0.3, 0.1], [0.2, 0.4]],
    [[0.2, 0.2], [0.2, 0.2]],
]
GAP_TRANSLATIONS = [[0, 0], [0.5, 0], [0.25, 0.5]]


@pytest.fixture
def gap_tuple():
    """Positive dominated pair plus one positive rank-one letter."""
    return at.AffineIFS.from_matrices(GAP_MATRICES, GAP_TRANSLATIONS)


@pytest.fixture
def sigma_pair():
    """The two-letter tuple whose nonzero-product shift has two points."""
    return at.AffineIFS.from_matrices([[[0, 1], [0, 0]], [[0, 0], [0, 1]]])


@pytest.fixture
def proj_identity_pair():
    """diag(1,0) together with the identity: pressure log 2 then 0."""
    return at.AffineIFS.from_matrices([[[1, 0], [0, 0]], [[1, 0], [0, 1]]])


@pytest.fixture
def sierpinski():
    return at.AffineIFS.from_matrices(
        [[[0.5, 0], [0, 0.5]]] * 3,
        [[0, 0], [0.5, 0], [0.25, 0.5]],
    )


def random_matrix(rng, scale=1.0):
    return scale * (2.0 * rng.random((2, 2)) - 1.0)


def random_contractive_tuple(rng, count, top=0.9):
    mats = []
    for _ in range(count):
        m = random_matrix(rng)
        norm = np.linalg.norm(m, 2)
        if norm > 0:
            m *= rng.uniform(0.2, top) / norm
        mats.append(m)
    return at.AffineIFS.from_matrices(mats)
