#  -*- coding: utf-8 -*-

"""
    The script 'test_dist' checks the distributions of freediv: moments of semicircular laws, the moment-cumulant
    conversion in both directions, realized matrix models, free convolution and convolution powers.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
import pytest

from freediv import dist
from freediv.balgebra import DimensionMismatch, op_norm

# Defining the tolerance when comparing the results with the expected ones:
PRECISION = 9
RELATIVE_TOLERANCE = 10 ** -PRECISION
ABSOLUTE_TOLERANCE = RELATIVE_TOLERANCE

# Dimensions and orders of the random cumulant sequences (with d = 3, tensors of order 8 would not fit):
ROUNDTRIP_SIZES = [(1, 8), (2, 8), (2, 6), (3, 4), (3, 5)]


# Function for convolving a distribution with itself a given number of times:
#----------------------------------------------------------------------------
def fold(kappa, p):
    result = kappa
    for i in range(p - 1):
        result = dist.free_convolve(result, kappa)
    return result


########################################################################################################################
# CONSTRUCTORS
########################################################################################################################

def test_scalar_semicircle_has_catalan_moments():
    kappa = dist.semicircular(np.array([[1.]]), order=6)
    assert kappa.bound == pytest.approx(2.)
    moments = dist.moments_from_cumulants(kappa)
    identity = np.eye(1)
    for n, expected in [(1, 0.), (2, 1.), (3, 0.), (4, 2.), (5, 0.), (6, 5.)]:
        np.testing.assert_allclose(moments.evaluate(n, [identity] * (n - 1)), [[expected]],
                                   RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


def test_semicircular_variance_from_kraus_operators():
    rng = np.random.default_rng(12)
    K = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    kappa = dist.semicircular(dist.kraus_map([K]), order=3)
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    np.testing.assert_allclose(kappa.evaluate(2, [b]), K @ b @ K.conj().T, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    np.testing.assert_allclose(kappa.first(), np.zeros((2, 2)), RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    assert kappa.infinitely_divisible


def test_semicircular_refuses_maps_that_are_not_completely_positive():
    with pytest.raises(ValueError):
        dist.semicircular(-np.eye(4), order=3)
    transpose = dist.map_matrix(lambda b: b.T, dim=2)
    assert not dist.is_completely_positive(transpose)
    assert dist.is_completely_positive(dist.kraus_map([np.eye(2)]))
    with pytest.raises(ValueError):
        dist.semicircular(transpose, order=3)


def test_point_mass():
    b = np.array([[1., 2j], [-2j, 0.5]])
    kappa = dist.point_mass(b, order=4)
    np.testing.assert_allclose(kappa.first(), b, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    assert kappa.max_basis_norm(3) == 0.
    assert kappa.bound == pytest.approx(op_norm(b))
    with pytest.raises(ValueError):
        dist.point_mass(np.array([[0., 1.], [0., 0.]]), order=3)


def test_tensor_size_limit():
    dist.check_tensor_size(3, 7)
    with pytest.raises(ValueError):
        dist.check_tensor_size(3, 8)
    with pytest.raises(ValueError):
        dist.check_tensor_size(2, 0)
    with pytest.raises(DimensionMismatch):
        dist.CumulantSequence(2, [np.zeros(4), np.zeros(4)])


########################################################################################################################
# MOMENT-CUMULANT RELATION
########################################################################################################################

@pytest.mark.parametrize("seed", range(20))
def test_moments_and_cumulants_are_inverse(seed):
    dim, order = ROUNDTRIP_SIZES[seed % len(ROUNDTRIP_SIZES)]
    kappa = dist.random_cumulants(dim, order, seed=seed, scale=0.1)
    moments = dist.moments_from_cumulants(kappa)
    assert dist.cumulants_from_moments(moments).distance(kappa) < 1e-10
    assert dist.moments_from_cumulants(dist.cumulants_from_moments(moments)).distance(moments) < 1e-10


def test_second_moment_of_a_shifted_law():
    # m_2(b) = kappa_2(b) + kappa_1 b kappa_1:
    kappa = dist.random_cumulants(2, 3, seed=8)
    moments = dist.moments_from_cumulants(kappa)
    rng = np.random.default_rng(1)
    b = rng.standard_normal((2, 2))
    expected = kappa.evaluate(2, [b]) + kappa.first() @ b @ kappa.first()
    np.testing.assert_allclose(moments.evaluate(2, [b]), expected, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


########################################################################################################################
# REALIZED MODELS
########################################################################################################################

def test_realized_moments_match_direct_products():
    model = dist.random_realized_model(2, 3, seed=5, scale=1.)
    moments = dist.moments_from_realized(model, order=4)
    a = np.asarray(model.matrix)
    rng = np.random.default_rng(9)
    b1, b2, b3 = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for i in range(3)]
    np.testing.assert_allclose(moments.evaluate(1, []), model.expectation(a), RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    word = a @ model.embed(b1) @ a @ model.embed(b2) @ a @ model.embed(b3) @ a
    np.testing.assert_allclose(moments.evaluate(4, [b1, b2, b3]), model.expectation(word),
                               RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    assert moments.adjoint_defect() < 1e-12


def test_realized_model_bounds_and_expectation():
    model = dist.random_realized_model(2, 4, seed=2, scale=1.)
    assert model.bound == pytest.approx(1.)
    report = dist.check_expectation_properties(model, seed=3)
    assert report["passed"]
    moments = dist.moments_from_realized(model, order=5)
    passed, ratio = dist.exp_bound_check(moments, M=1.)
    assert passed and ratio <= 1. + 1e-9
    cumulants = dist.cumulants_from_moments(moments)
    passed, ratio = dist.cumulant_bound_check(cumulants, M=1.)
    assert passed


@pytest.mark.parametrize("seed", range(10))
def test_cumulants_of_realized_models_satisfy_the_bound(seed):
    multiplicity = 1 + seed % 8
    scale = [0.5, 1., 2.][seed % 3]
    model = dist.random_realized_model(2, multiplicity, seed=100 + seed, scale=scale)
    assert model.bound == pytest.approx(scale)
    moments = dist.moments_from_realized(model, order=6)
    passed, ratio = dist.exp_bound_check(moments, M=model.bound, seed=seed)
    assert passed
    passed, ratio = dist.cumulant_bound_check(dist.cumulants_from_moments(moments), M=model.bound)
    assert passed


def test_realized_model_must_be_self_adjoint():
    with pytest.raises(ValueError):
        dist.RealizedModel(np.array([[0., 1.], [0., 0.]]), 1)
    with pytest.raises(DimensionMismatch):
        dist.RealizedModel(np.eye(3), 2)


def test_a_blown_bound_is_detected():
    moments = dist.moments_from_realized(dist.random_realized_model(1, 4, seed=1, scale=1.), order=4)
    passed, ratio = dist.exp_bound_check(moments, M=0.1)
    assert not passed and ratio > 1.


########################################################################################################################
# CONVOLUTIONS
########################################################################################################################

def test_free_convolution_of_semicircles():
    first = dist.semicircular(np.array([[1.]]), order=4)
    second = dist.semicircular(np.array([[1.]]), order=4)
    total = dist.free_convolve(first, second)
    np.testing.assert_allclose(total.evaluate(2, [np.eye(1)]), [[2.]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    assert total.bound == pytest.approx(4.)
    assert total.infinitely_divisible
    with pytest.raises(DimensionMismatch):
        dist.free_convolve(first, dist.semicircular(np.array([[1.]]), order=3))


def test_convolution_powers():
    semicircle = dist.semicircular(np.eye(4), order=3)
    power = dist.convolution_power(semicircle, 0.25)
    assert power.certified
    np.testing.assert_allclose(power.tensor(2), 0.25 * np.asarray(semicircle.tensor(2)),
                               RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    generic = dist.cumulants_from_moments(dist.moments_from_realized(dist.random_realized_model(2, 2, seed=4),
                                                                     order=3))
    assert not dist.convolution_power(generic, 0.5).certified
    assert dist.convolution_power(generic, 2.).certified
    with pytest.raises(ValueError):
        dist.convolution_power(generic, 0.)


def test_convolution_of_point_masses_adds_their_values():
    b = np.array([[0.5, 0.2], [0.2, -1.]])
    c = np.diag([-0.3, 0.7])
    total = dist.free_convolve(dist.point_mass(b, order=4), dist.point_mass(c, order=4))
    assert total.distance(dist.point_mass(b + c, order=4)) < 1e-12
    assert total.bound >= op_norm(b + c)


def test_free_convolution_is_commutative_and_associative():
    first, second, third = [dist.random_cumulants(2, 4, seed=seed, scale=0.5) for seed in [11, 12, 13]]
    assert dist.free_convolve(first, second).distance(dist.free_convolve(second, first)) == 0.
    left = dist.free_convolve(dist.free_convolve(first, second), third)
    right = dist.free_convolve(first, dist.free_convolve(second, third))
    assert left.distance(right) < 1e-12


@pytest.mark.parametrize("p", [2, 3])
def test_convolving_the_root_of_order_p_p_times_gives_back_the_distribution(p):
    mu = dist.free_convolve(dist.semicircular(dist.kraus_map([np.array([[1., 0.5], [0., 1.]])]), order=5),
                            dist.point_mass(np.diag([0.4, -0.1]), order=5))
    root = dist.convolution_power(mu, 1. / p)
    assert root.certified
    assert fold(root, p).distance(mu) < 1e-12
    generic = dist.random_cumulants(2, 5, seed=p, scale=0.5)
    assert fold(dist.convolution_power(generic, 1. / p), p).distance(generic) < 1e-12


def test_powers_of_powers():
    mu = dist.random_cumulants(2, 4, seed=5, scale=0.5)
    for s, t in [(0.5, 3.), (2., 0.25), (1.5, 1.5)]:
        composed = dist.convolution_power(dist.convolution_power(mu, s), t)
        assert composed.distance(dist.convolution_power(mu, s * t)) < 1e-12


def test_bounds_of_convolution_powers():
    semicircle = dist.semicircular(np.eye(4), order=3)
    assert dist.convolution_power(semicircle, 0.25).bound == pytest.approx(semicircle.bound * 0.5)
    assert dist.convolution_power(semicircle, 4.).bound == pytest.approx(semicircle.bound * 4.)
    model = dist.random_realized_model(2, 3, seed=4, scale=1.)
    generic = dist.cumulants_from_moments(dist.moments_from_realized(model, order=5))
    assert not generic.infinitely_divisible
    # Without divisibility, the bound of a fractional power only uses the cumulant bound:
    root = dist.convolution_power(generic, 0.5)
    assert root.bound == pytest.approx((2. + np.sqrt(0.5)) ** 2 * generic.bound)
    passed, ratio = dist.exp_bound_check(dist.moments_from_cumulants(root), M=root.bound)
    assert passed
    passed, ratio = dist.cumulant_bound_check(root, M=root.bound)
    assert passed
    # An integer power is the law of a sum of free copies:
    square = dist.convolution_power(generic, 2.)
    assert square.bound == pytest.approx(2. * generic.bound)
    passed, ratio = dist.exp_bound_check(dist.moments_from_cumulants(square), M=square.bound)
    assert passed


def test_centering():
    b = np.diag([0.3, -0.2])
    mu = dist.free_convolve(dist.semicircular(np.eye(4), order=3), dist.point_mass(b, order=3))
    centered, shift = dist.center(mu)
    np.testing.assert_allclose(shift, b, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    np.testing.assert_allclose(centered.first(), np.zeros((2, 2)), RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    np.testing.assert_allclose(centered.tensor(2), mu.tensor(2), RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


def test_json_form_of_distributions():
    kappa = dist.free_convolve(dist.semicircular(np.eye(4), order=3), dist.point_mass(np.diag([1., -1.]), order=3))
    back = dist.distribution_from_json(kappa.to_json())
    assert isinstance(back, dist.CumulantSequence)
    assert back.distance(kappa) == 0.
    assert back.infinitely_divisible
    model = dist.random_realized_model(2, 2, seed=3)
    assert isinstance(dist.distribution_from_json(model.to_json()), dist.RealizedModel)
    with pytest.raises(ValueError):
        dist.distribution_from_json({"dim": 2})
