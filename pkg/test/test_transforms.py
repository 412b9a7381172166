#  -*- coding: utf-8 -*-

"""
    The script 'test_transforms' checks the Cauchy, F- and Voiculescu transforms against closed forms for semicircular
    laws and point masses, compares series and exact evaluations, and checks the subordination fixed point.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
import pytest

from freediv import dist, transforms
from freediv.hinchin import build_probes
from freediv.transforms import CauchyProvider, DomainViolation

PRECISION = 8
RELATIVE_TOLERANCE = 10 ** -PRECISION
ABSOLUTE_TOLERANCE = RELATIVE_TOLERANCE


# Function for computing the closed form of the Cauchy transform of a scalar semicircle:
#---------------------------------------------------------------------------------------
def semicircle_cauchy_closed_form(z, variance=1.):
    # The product of principal square roots behaves like z at infinity in the upper half-plane:
    radius = 2. * np.sqrt(variance)
    return (z - np.sqrt(z - radius) * np.sqrt(z + radius)) / (2. * variance)


########################################################################################################################
# CAUCHY TRANSFORMS
########################################################################################################################

def test_semicircle_cauchy_transform_by_fixed_point():
    provider = CauchyProvider(dist.semicircular(np.array([[1.]]), order=4))
    assert provider.method == "semicircular"
    g = provider(np.array([[2j]]))
    np.testing.assert_allclose(g, [[-0.41421356237j]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    np.testing.assert_allclose(provider.f(np.array([[2j]])), [[2.41421356237j]], RELATIVE_TOLERANCE,
                               ABSOLUTE_TOLERANCE)
    wide = CauchyProvider(dist.semicircular(np.array([[2.]]), order=4))
    np.testing.assert_allclose(wide(np.array([[3j]])), [[-0.28077640640j]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


def test_semicircle_cauchy_series_stays_within_its_tail_bound():
    kappa = dist.semicircular(np.array([[1.]]), order=8)
    for x in [-2., -1., 0., 0.5, 2.]:
        z = x + 5j
        value, tail = transforms.cauchy_series(kappa, np.array([[z]]))
        assert abs(value[0, 0] - semicircle_cauchy_closed_form(z)) <= tail + 1e-12


def test_cauchy_series_refuses_points_outside_its_domain():
    kappa = dist.semicircular(np.array([[1.]]), order=4)
    with pytest.raises(DomainViolation):
        transforms.cauchy_series(kappa, np.array([[2j]]))
    with pytest.raises(DomainViolation):
        transforms.cauchy_series(kappa, np.array([[-5j]]))


def test_series_and_resolvent_agree_for_realized_models():
    model = dist.random_realized_model(2, 3, seed=7, scale=1.)
    moments = dist.moments_from_realized(model, order=8)
    rng = np.random.default_rng(2)
    for i in range(3):
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = (h + h.conj().T) / 4. + 4j * np.eye(2)
        exact = transforms.cauchy_realized(model, b)
        value, tail = transforms.cauchy_series(moments, b)
        assert np.linalg.norm(value - exact, ord=2) <= tail + 1e-10


def test_point_mass_cauchy_transform():
    b0 = np.diag([0.5, -0.5])
    provider = CauchyProvider(dist.point_mass(b0, order=3))
    point = np.diag([1. + 3j, 2j])
    np.testing.assert_allclose(provider(point), np.linalg.inv(point - b0), RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


def test_f_transform_increases_the_imaginary_part():
    np.testing.assert_allclose(transforms.f_transform(dist.semicircular(np.array([[1.]]), order=4), np.array([[2j]])),
                               [[2.41421356237j]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    point = np.array([[0.5 + 3j, 1.], [1., -1. + 2j]])
    np.testing.assert_allclose(transforms.f_transform(dist.point_mass(np.zeros((2, 2)), order=3), point), point,
                               RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    model = dist.random_realized_model(2, 4, seed=8, scale=1.)
    for b in [2j * np.eye(2), point]:
        f = transforms.f_transform(model, b)
        gap = (f - f.conj().T) / 2j - (b - b.conj().T) / 2j
        assert np.linalg.eigvalsh(gap)[0] >= -1e-8


def test_level_two_cauchy_transform_of_a_point_mass():
    b0 = np.array([[0.2, 0.1], [0.1, -0.3]])
    kappa = dist.point_mass(b0, order=4)
    point = 10j * np.eye(4)
    point[:2, 2:] = np.eye(2)
    point[2:, :2] = np.eye(2)
    value, tail = transforms.cauchy_series(kappa, point)
    expected = np.linalg.inv(point - np.kron(np.eye(2), b0))
    assert np.linalg.norm(value - expected, ord=2) <= tail + 1e-12


########################################################################################################################
# VOICULESCU TRANSFORMS
########################################################################################################################

def test_voiculescu_transform_of_a_semicircle():
    kappa = dist.semicircular(np.array([[1.]]), order=6)
    for z in [9j, 1. + 10j, -3. + 12j]:
        phi, tail = transforms.voiculescu_series(kappa, np.array([[z]]))
        np.testing.assert_allclose(phi, [[1. / z]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    with pytest.raises(DomainViolation):
        transforms.voiculescu_series(kappa, np.array([[4j]]))


def test_voiculescu_transform_of_a_point_mass_is_constant():
    b0 = np.diag([1., -2.])
    kappa = dist.point_mass(b0, order=4)
    phi, tail = transforms.voiculescu_series(kappa, 20j * np.eye(2))
    np.testing.assert_allclose(phi, b0, RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)


def test_voiculescu_transform_by_inversion():
    kappa = dist.semicircular(np.array([[1.]]), order=6)
    phi = transforms.voiculescu_via_inversion(kappa, np.array([[9j]]))
    np.testing.assert_allclose(phi, [[1. / 9j]], RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    model = dist.random_realized_model(2, 3, seed=1, scale=1.)
    b = 8j * np.eye(2) + np.diag([0.5, -0.5])
    by_series, tail = transforms.voiculescu_series(model, b)
    by_inversion, info = transforms.voiculescu_via_inversion(model, b, full_output=True)
    assert info["residual"] < 1e-10
    assert np.linalg.norm(by_series - by_inversion, ord=2) <= tail + 1e-8


@pytest.mark.parametrize("dim, level", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_voiculescu_series_and_inversion_agree_far_in_the_half_plane(dim, level):
    model = dist.random_realized_model(dim, 3, seed=10 + dim, scale=1.)
    kappa = dist.cumulants_from_moments(dist.moments_from_realized(model, order=8))
    M = kappa.bound
    points = build_probes(20, M, dim=dim, seed=level)
    points = points.level_two() if level == 2 else transforms.iter_probes(points)
    assert len(points) == 20
    for c in points:
        assert c.shape == (level * dim, level * dim)
        by_series, tail = transforms.voiculescu_series(kappa, c, tail_order=8)
        assert tail <= M * 4. ** -8 / 0.75
        by_inversion, info = transforms.voiculescu_via_inversion(model, c, full_output=True)
        assert info["residual"] < 1e-10
        assert np.linalg.norm(by_series - by_inversion, ord=2) <= 1e-10 + tail + 1e-8


def test_voiculescu_transforms_of_distributions_have_negative_imaginary_part():
    kappa = dist.free_convolve(dist.semicircular(dist.kraus_map([np.array([[1., 1.], [0., 1.]])]), order=4),
                               dist.point_mass(np.diag([0.3, -0.1]), order=4))
    lam = 17. * kappa.bound
    probes = [lam * 1j * np.eye(2), lam * 1j * np.eye(2) + np.array([[0., 1.], [1., 0.]])]
    report = transforms.voiculescu_negativity_check(kappa, probes)
    assert report["passed"]
    assert report["worst"] <= 0.


########################################################################################################################
# SUBORDINATION
########################################################################################################################

def test_subordination_of_two_semicircles():
    semicircle = dist.semicircular(np.array([[1.]]), order=4)
    point = np.array([[3j]])
    value, info = transforms.subordination_convolve(semicircle, semicircle, point, full_output=True)
    np.testing.assert_allclose(value, [[semicircle_cauchy_closed_form(3j, variance=2.)]],
                               RELATIVE_TOLERANCE, ABSOLUTE_TOLERANCE)
    assert info["f_defect"] < 1e-8
    assert info["sum_defect"] < 1e-8


def test_subordination_agrees_with_the_sum_of_cumulants():
    first = dist.random_realized_model(2, 3, seed=3, scale=1.)
    second = dist.random_realized_model(2, 3, seed=4, scale=1.)
    summed = dist.free_convolve(dist.cumulants_from_moments(dist.moments_from_realized(first, order=6)),
                                dist.cumulants_from_moments(dist.moments_from_realized(second, order=6)))
    provider = CauchyProvider(summed)
    assert provider.method == "series"
    point = 8j * np.eye(2)
    by_cumulants = provider(point)
    by_subordination = transforms.subordination_convolve(first, second, point)
    assert np.linalg.norm(by_cumulants - by_subordination, ord=2) <= provider.last_tail_bound + 1e-8


def test_convolution_with_a_point_mass_is_a_translation():
    b0 = np.diag([0.4, -0.4])
    model = dist.random_realized_model(2, 3, seed=6, scale=1.)
    point = 6j * np.eye(2) + np.diag([1., 0.])
    value = transforms.subordination_convolve(model, dist.point_mass(b0, order=3), point)
    np.testing.assert_allclose(value, transforms.cauchy_realized(model, point - b0), RELATIVE_TOLERANCE,
                               ABSOLUTE_TOLERANCE)


########################################################################################################################
# PROFILES AND SWEEPS
########################################################################################################################

def test_convergence_profile_decreases():
    limit = dist.semicircular(np.array([[1.]]), order=8)
    sequence = [dist.semicircular(np.array([[1. + 2. ** -i]]), order=8) for i in range(0, 31, 5)]
    profile = transforms.convergence_profile(sequence, limit, [np.array([[20j]])])
    for column in ["moment_distance", "cauchy_distance", "f_distance", "voiculescu_distance"]:
        values = profile[column].values
        assert np.all(np.diff(values) < 0.)
        assert values[-1] < 1e-6


def test_probe_sweep_table(tmp_path):
    model = dist.random_realized_model(1, 4, seed=2, scale=1.)
    path = tmp_path / "sweep.csv"
    table = transforms.probe_sweep(model, [np.array([[8j]]), np.array([[1. + 8j]])], inversion=True, path=str(path))
    assert len(table) == 8
    assert list(table.columns[:6]) == ["probe_id", "level", "transform", "convention", "tail_bound", "iterations"]
    assert {"re_0_0", "im_0_0"} <= set(table.columns)
    assert path.exists()
    phi = table[table["transform"] == "phi"]
    phi_inversion = table[table["transform"] == "phi_inversion"]
    by_series = phi["re_0_0"].values + 1j * phi["im_0_0"].values
    by_inversion = phi_inversion["re_0_0"].values + 1j * phi_inversion["im_0_0"].values
    assert np.all(np.abs(by_series - by_inversion) <= phi["tail_bound"].values + 1e-8)
