#  -*- coding: utf-8 -*-

"""
    The script 'test_steinitz' checks the rearrangement of zero-sum families of vectors and the subset selections built
    on it, including the comparison with an exhaustive search on small families.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
import pytest

from freediv import steinitz
from freediv.steinitz import SteinitzInstance, InfeasibleInput

# Defining the tolerance when comparing the results with the expected ones:
PRECISION = 9
RELATIVE_TOLERANCE = 10 ** -PRECISION
ABSOLUTE_TOLERANCE = RELATIVE_TOLERANCE


# Function for drawing a family of vectors summing to zero:
#-----------------------------------------------------------
def zero_sum_family(k, n_dim, seed):
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((k, n_dim))
    vectors -= vectors.mean(axis=0)
    return vectors / np.max(np.linalg.norm(vectors, axis=1))


# Function for drawing vectors with norms below a cap:
#-----------------------------------------------------
def capped_family(k, n_dim, cap, seed):
    rng = np.random.default_rng(seed)
    directions = rng.standard_normal((k, n_dim))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    return directions * (cap * rng.uniform(0., 1., size=(k, 1)))


########################################################################################################################
# REARRANGEMENTS
########################################################################################################################

def test_rearrangement_of_the_unit_cross():
    vectors = [[1., 0.], [-1., 0.], [0., 1.], [0., -1.]]
    result = steinitz.rearrange_zero_sum(vectors)
    assert result.kind == "permutation"
    assert sorted(result.indices) == [0, 1, 2, 3]
    assert result.certified_bound == pytest.approx(2.)
    assert result.deviation <= 2. + ABSOLUTE_TOLERANCE
    assert np.max(steinitz.prefix_norms(vectors, result.indices)) == pytest.approx(result.deviation)


def test_rearrangement_of_opposite_vectors():
    result = steinitz.rearrange_zero_sum([[3., 4.], [-3., -4.]])
    assert sorted(result.indices) == [0, 1]
    assert result.details["effective_dim"] == 1
    assert result.deviation == pytest.approx(5.)
    np.testing.assert_allclose(result.details["prefix_norms"], [5., 0.], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


@pytest.mark.parametrize("seed", range(100))
def test_random_rearrangements_are_certified(seed):
    # Sizes cycle through 12, 40 and 120 vectors, with two families of 500 vectors:
    k = 500 if seed % 50 == 49 else [12, 40, 120][seed % 3]
    n_dim = 1 + seed % 6
    vectors = zero_sum_family(k, n_dim, seed)
    result = steinitz.rearrange_zero_sum(vectors, seed=seed)
    assert sorted(result.indices) == list(range(k))
    assert result.deviation <= n_dim + 1e-6
    assert np.max(steinitz.prefix_norms(vectors, result.indices)) <= n_dim + 1e-6
    assert result.is_certified()


def test_bound_uses_the_dimension_of_the_span():
    rng = np.random.default_rng(4)
    planar = zero_sum_family(30, 2, 4)
    rotation, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    padded = np.hstack([planar, np.zeros((30, 4))]) @ rotation.T
    instance = SteinitzInstance(padded)
    assert instance.n_dim == 6
    assert instance.effective_dim() == 2
    result = steinitz.rearrange_zero_sum(instance)
    assert result.details["effective_dim"] == 2
    assert result.certified_bound == pytest.approx(2. * instance.norm_cap)
    assert result.deviation <= result.certified_bound + 1e-6
    ambient = steinitz.rearrange_zero_sum(instance, reduce_to_span=False)
    assert ambient.certified_bound == pytest.approx(6. * instance.norm_cap)


def test_rearrangement_refuses_a_nonzero_sum():
    with pytest.raises(InfeasibleInput):
        steinitz.rearrange_zero_sum([[1., 0.], [0., 1.], [0.5, 0.5]])


def test_small_families_are_kept_in_place():
    result = steinitz.rearrange_zero_sum([[1., 0., 0.], [-1., 0., 0.]], reduce_to_span=False)
    assert result.indices == [0, 1]
    assert steinitz.rearrange_zero_sum(np.zeros((0, 2))).indices == []


########################################################################################################################
# SELECTIONS
########################################################################################################################

def test_selection_among_equal_vectors():
    vectors = [[0.1, 0.]] * 10
    result = steinitz.subset_select(vectors, 0.3)
    assert result.kind == "subset"
    assert len(result.indices) == 3
    assert result.deviation < 1e-12
    assert result.certified_bound == pytest.approx(0.1)


def test_selection_extremes():
    vectors = capped_family(20, 3, 0.2, 1)
    assert steinitz.subset_select(vectors, 0.).indices == []
    full = steinitz.subset_select(vectors, 1.)
    assert full.indices == list(range(20))
    assert full.deviation < 1e-12
    with pytest.raises(ValueError):
        steinitz.subset_select(vectors, -0.1)
    with pytest.raises(InfeasibleInput):
        steinitz.subset_select(vectors, 0.5, eps=0.01)


def test_selection_of_a_zero_sum_family():
    vectors = zero_sum_family(40, 2, 9)
    result = steinitz.subset_select(vectors, 0.5)
    assert len(result.indices) == 20
    assert result.deviation <= 2. * result.details["eps"] + 1e-6


def test_selection_among_many_small_vectors():
    vectors = capped_family(500, 4, 0.05, 2)
    result = steinitz.subset_select(vectors, 0.37)
    assert result.certified_bound <= 4. * 0.05 + 1e-12
    assert result.deviation <= result.certified_bound + 1e-6
    assert len(set(result.indices)) == len(result.indices)
    expected = np.linalg.norm(vectors[result.indices].sum(axis=0) - 0.37 * vectors.sum(axis=0))
    assert result.deviation == pytest.approx(expected)


def test_selection_against_exhaustive_search():
    for seed in range(4):
        vectors = capped_family(12, 2, 1., 10 + seed)
        for t in [0.25, 0.5, 0.8]:
            result = steinitz.subset_select(vectors, t)
            best = steinitz.exhaustive_best_subset(vectors, t)
            assert best.deviation <= result.deviation + 1e-12
            assert result.deviation <= result.certified_bound + 1e-9


@pytest.mark.parametrize("seed", range(100))
def test_random_selections_are_certified(seed):
    rng = np.random.default_rng(1000 + seed)
    k = [8, 30, 100][seed % 3]
    n_dim = 1 + seed % 6
    cap = rng.uniform(0.01, 1.)
    t = rng.uniform(0., 1.)
    vectors = capped_family(k, n_dim, cap, 1000 + seed)
    result = steinitz.subset_select(vectors, t, eps=cap)
    assert result.deviation <= n_dim * cap + 1e-6
    assert len(set(result.indices)) == len(result.indices)
    if k <= 18:
        best = steinitz.exhaustive_best_subset(vectors, t)
        assert best.deviation <= result.deviation + 1e-12
        assert result.deviation <= best.deviation + n_dim * cap + 1e-6


def test_exhaustive_search_is_limited():
    with pytest.raises(ValueError):
        steinitz.exhaustive_best_subset(np.ones((19, 1)), 0.5)


def test_selection_along_a_triangular_array():
    v = np.array([0.6, 0.8])
    sizes = [2, 4, 8, 16, 32]
    rows = [SteinitzInstance(np.tile(v / n, (n, 1))) for n in sizes]
    results = steinitz.array_select(rows, 1. / 3.)
    deviations = [result.deviation for result in results]
    assert np.all(np.diff(deviations) < 0.)
    for n, result in zip(sizes, results):
        np.testing.assert_allclose(result.deviation, abs(round(n / 3.) / n - 1. / 3.), RELATIVE_TOLERANCE,
                                   ABSOLUTE_TOLERANCE)
        assert result.deviation <= result.certified_bound + 1e-12
        assert result.details["target_deviation"] <= result.details["target_budget"] + 1e-12
        assert result.details["row_cap"] == pytest.approx(1. / n)


def test_errors_of_a_row_are_recorded():
    rows = [capped_family(5, 2, 1., 3), capped_family(8, 2, 1., 4)]
    results = steinitz.array_select(rows, 1.5)
    assert len(results) == 2
    for result in results:
        assert "error" in result.details
        assert np.isnan(result.certified_bound)


########################################################################################################################
# INPUTS AND OUTPUTS
########################################################################################################################

def test_reading_vectors_from_a_csv_file(tmp_path):
    path = tmp_path / "vectors.csv"
    path.write_text("# the unit cross\n1,0\n-1,0\n0,1\n0,-1\n")
    instance = steinitz.read_vectors_csv(str(path))
    assert len(instance) == 4 and instance.n_dim == 2
    assert instance.norm_cap == pytest.approx(1.)
    document = steinitz.rearrange_zero_sum(instance).to_json()
    assert document["kind"] == "permutation"
    assert isinstance(document["prefix_norms"], list)
    assert SteinitzInstance.from_json(instance.to_json()).n_dim == 2
