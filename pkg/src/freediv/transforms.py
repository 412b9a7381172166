#  -*- coding: utf-8 -*-

"""
    The script 'transforms' computes the analytic transforms of B-valued distributions at points b of the upper
    half-plane M_k^+(B):
        - the Cauchy transform G(b) = mu((b - X)^-1) = sum_n b^-1 mu((X b^-1)^n), which maps the upper half-plane into the
          lower one, either as a truncated series, exactly for realized models, or by the fixed-point equation
          G = (b - kappa_1 - eta(G))^-1 for semicircular laws;
        - the F-transform F = 1/G;
        - the Voiculescu transform phi(b) = sum_n kappa_n(b^-1, ..., b^-1) = F^<-1>(b) - b, as a series or by numerical
          inversion of F;
        - the free additive convolution of two Cauchy transforms through the subordination fixed point.
    Points of level k >= 2 are (kd) x (kd) matrices, and moments are amplified by multilinearity.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
import pandas as pd

from . import parameters as param
from .balgebra import (NumericalFailure, Singular, DimensionMismatch, ProbePoint, invert, op_norm, imag_part,
                       imaginary_margin, hermitian_eigenvalues)
from .dist import (TruncatedMoments, CumulantSequence, RealizedModel, moments_from_cumulants, moments_from_realized,
                   cumulants_from_moments, is_completely_positive)


class DomainViolation(NumericalFailure):
    """Raised when a point lies outside the domain where a series is known to converge."""
    pass


class NoConvergence(NumericalFailure):
    """Raised when a fixed-point iteration does not converge within the allowed number of iterations."""
    pass


########################################################################################################################
# DOMAINS AND PROBES
########################################################################################################################

class TransformDomain(object):
    """
    The set of points b of M_k^+(B) with ||b^-1|| < radius, where the radius is 1/M for the Cauchy and F series
    ("cauchy" rule) and 1/(4M) for the Voiculescu series ("voiculescu" rule).
    """

    rules = {"cauchy": 1., "voiculescu": 4.}

    def __init__(self, bound, level=1, rule="cauchy"):
        if rule not in self.rules:
            raise ValueError("Unknown domain rule '%s' (expected one of %s)." % (rule, sorted(self.rules)))
        self.bound = float(bound)
        self.level = int(level)
        self.rule = rule
        self.radius = np.inf if self.bound == 0. else 1. / (self.rules[rule] * self.bound)

    def check(self, b):
        """
        Raises DomainViolation if b is not in the upper half-plane or if ||b^-1|| >= radius.
        :return: the inverse of b and its norm
        """
        value = _point_value(b)
        if imaginary_margin(value) <= 0.:
            raise DomainViolation("The point is not in the upper half-plane.")
        inverse = invert(value)
        inverse_norm = op_norm(inverse)
        if not inverse_norm < self.radius:
            raise DomainViolation("||b^-1|| = %.6g is not below the radius %.6g of the %s series (M = %.6g)."
                                  % (inverse_norm, self.radius, self.rule, self.bound))
        return inverse, inverse_norm


def _point_value(b):
    if isinstance(b, ProbePoint):
        return np.asarray(b.value)
    value = np.asarray(b, dtype=complex)
    if value.ndim == 0:
        value = value.reshape(1, 1)
    return value


def _level_of(value, dim):
    if value.ndim != 2 or value.shape[0] != value.shape[1] or value.shape[0] % dim != 0:
        raise DimensionMismatch("A point for a distribution over M_%d(C) must be a square matrix of size divisible "
                                "by %d, got shape %s." % (dim, dim, value.shape))
    return value.shape[0] // dim


def iter_probes(probes):
    """Returns the list of probe matrices held by a ProbeSet, a list of ProbePoint/matrices, or a single point."""
    if isinstance(probes, ProbePoint):
        return [np.asarray(probes.value)]
    if hasattr(probes, "probes"):
        probes = probes.probes
    return [_point_value(c) for c in probes]


def _moments_of(source):
    if isinstance(source, TruncatedMoments):
        return source
    if isinstance(source, CumulantSequence):
        return moments_from_cumulants(source)
    if isinstance(source, RealizedModel):
        return moments_from_realized(source)
    raise TypeError("Cannot read moments from an object of type %s." % type(source).__name__)


def _cumulants_of(source):
    if isinstance(source, CumulantSequence):
        return source
    if isinstance(source, TruncatedMoments):
        return cumulants_from_moments(source)
    if isinstance(source, RealizedModel):
        return cumulants_from_moments(moments_from_realized(source))
    raise TypeError("Cannot read cumulants from an object of type %s." % type(source).__name__)


def _tail_order(requested, available):
    if requested is None:
        requested = min(param.tail_order, available)
    if int(requested) != requested or requested < 0 or requested > available:
        raise ValueError("The series order must be an integer between 0 and %d, got %s." % (available, requested))
    return int(requested)


########################################################################################################################
# CAUCHY TRANSFORMS
########################################################################################################################

def cauchy_series(mu, b, tail_order=None):
    """
    This function computes the truncated series G(b) = sum_(n=0..N) b^-1 m_n(b^-1, ..., b^-1) b^-1 (with m_0 = 1), at
    any level k.
    :param mu: a TruncatedMoments (or a CumulantSequence, converted first)
    :param b: a ProbePoint or a (kd) x (kd) matrix, with ||b^-1|| < 1/M
    :param tail_order: the largest order N kept in the series (default: tail_order in parameters.py)
    :return: a pair (value, tail_bound), where tail_bound = ||b^-1|| r^(N+1) / (1 - r) with r = M ||b^-1|| bounds the
    neglected terms
    """
    mu = _moments_of(mu)
    order = _tail_order(tail_order, mu.order)
    value = _point_value(b)
    level = _level_of(value, mu.dim)
    inverse, inverse_norm = TransformDomain(mu.bound, level, "cauchy").check(value)

    result = np.array(inverse)
    for n in range(1, order + 1):
        moment = mu.evaluate_amplified(n, [inverse] * (n - 1), level=level)
        result = result + inverse @ moment @ inverse

    ratio = mu.bound * inverse_norm
    tail_bound = inverse_norm * ratio ** (order + 1) / (1. - ratio)
    return result, tail_bound


def cauchy_realized(model, b):
    """
    This function computes exactly the Cauchy transform of a realized model: the block partial trace of the resolvent
    (b (x) I_N - I_k (x) a)^-1.
    :param model: a RealizedModel
    :param b: a point of M_k^+(B)
    :return: the (kd) x (kd) matrix G(b)
    """
    value = _point_value(b)
    level = _level_of(value, model.dim)
    n_mult = model.multiplicity
    size = value.shape[0]
    resolvent_argument = np.kron(value, np.eye(n_mult)) - np.kron(np.eye(level), np.asarray(model.matrix))
    try:
        resolvent = invert(resolvent_argument)
    except Singular as error:
        raise Singular("The resolvent of a self-adjoint model is singular at this point: %s" % error)
    return np.einsum('aibi->ab', np.asarray(resolvent).reshape(size, n_mult, size, n_mult)) / n_mult


def is_semicircular_type(kappa, tol=None):
    """
    Returns True if kappa is the cumulant sequence of delta_c [+] S_eta: self-adjoint kappa_1, completely positive
    kappa_2 and vanishing higher cumulants.
    """
    if tol is None:
        tol = param.identity_tolerance
    if not isinstance(kappa, CumulantSequence):
        return False
    if any(kappa.max_basis_norm(n) > tol for n in range(3, kappa.order + 1)):
        return False
    first = kappa.first()
    if op_norm(first - first.conj().T) > tol:
        return False
    if kappa.order >= 2:
        return is_completely_positive(np.asarray(kappa.tensors[1]).T)
    return True


def semicircular_cauchy(kappa, b, tol=None, max_iter=None, damping=None):
    """
    This function computes the Cauchy transform of delta_c [+] S_eta by solving G = (b - c - eta(G))^-1 with the
    iteration W <- (b - c - eta(W))^-1, started at W = b^-1. Whenever a step is longer than the previous one, the step
    is replaced by the averaged one W <- W + damping ((b - c - eta(W))^-1 - W).
    The iteration stops when the step is below tol min(1, ||W||)^2, so that F = W^-1 is also accurate to about tol.
    :param kappa: a CumulantSequence with vanishing cumulants of order >= 3
    :param b: a point of M_k^+(B)
    :param tol: the stopping tolerance (default: fixed_point_tol in parameters.py)
    :param max_iter: the largest number of iterations (default: 20 times fixed_point_max_iter)
    :param damping: the factor of the averaged step (default: fixed_point_damping in parameters.py)
    :return: a pair (G(b), number of iterations)
    """
    if tol is None:
        tol = param.fixed_point_tol
    if max_iter is None:
        max_iter = 20 * param.fixed_point_max_iter
    if damping is None:
        damping = param.fixed_point_damping
    value = _point_value(b)
    level = _level_of(value, kappa.dim)
    if imaginary_margin(value) <= 0.:
        raise DomainViolation("The point is not in the upper half-plane.")
    shift = kappa.evaluate_amplified(1, [], level=level)

    def variance(w):
        if kappa.order < 2:
            return np.zeros_like(w)
        return kappa.evaluate_amplified(2, [w])

    w = np.array(invert(value))
    previous_step = np.inf
    for iteration in range(1, max_iter + 1):
        new_w = np.asarray(invert(value - shift - variance(w)))
        step = op_norm(new_w - w)
        if step > previous_step:
            new_w = w + damping * (new_w - w)
            step = op_norm(new_w - w)
        w, previous_step = new_w, step
        if step < tol * min(1., op_norm(w)) ** 2:
            return w, iteration
    raise NoConvergence("The semicircular fixed point did not converge after %d iterations." % max_iter)


class CauchyProvider(object):
    """
    A Cauchy transform b -> G(b) computed from a RealizedModel (exact resolvent), from a semicircular-type
    CumulantSequence (fixed-point equation), or from truncated moments (series). Also gives F(b) = G(b)^-1 and
    h(b) = F(b) - b.
    """

    modes = ("auto", "series", "exact")

    def __init__(self, source, tail_order=None, mode="auto"):
        if mode not in self.modes:
            raise ValueError("Unknown mode '%s' (expected one of %s)." % (mode, self.modes))
        self.source = source
        self.dim = source.dim
        self.bound = source.bound
        self.tail_order = tail_order
        self.last_tail_bound = 0.
        self.last_iterations = 0
        if isinstance(source, RealizedModel) and mode != "series":
            self.method = "realized"
        elif mode != "series" and is_semicircular_type(source):
            self.method = "semicircular"
        elif mode == "exact":
            raise ValueError("No exact Cauchy transform is available for %r." % (source,))
        else:
            self.method = "series"
            self.moments = _moments_of(source)

    def __call__(self, b):
        if self.method == "realized":
            self.last_tail_bound, self.last_iterations = 0., 0
            return cauchy_realized(self.source, b)
        if self.method == "semicircular":
            value, self.last_iterations = semicircular_cauchy(self.source, b)
            self.last_tail_bound = 0.
            return value
        value, self.last_tail_bound = cauchy_series(self.moments, b, self.tail_order)
        self.last_iterations = 0
        return value

    def f(self, b):
        """Returns F(b) = G(b)^-1."""
        return np.asarray(invert(self(b)))

    def h(self, b):
        """Returns h(b) = F(b) - b."""
        return self.f(b) - _point_value(b)

    def __repr__(self):
        return "CauchyProvider(method=%s, dim=%d, bound=%.6g)" % (self.method, self.dim, self.bound)


def _provider(source, tail_order=None):
    if isinstance(source, CauchyProvider):
        return source
    return CauchyProvider(source, tail_order=tail_order)


def f_transform(mu, b, tail_order=None):
    """
    Returns F(b) = G(b)^-1.
    :param mu: a CauchyProvider, RealizedModel, CumulantSequence or TruncatedMoments
    :param b: a point of M_k^+(B)
    :param tail_order: the series order used when G is computed as a series
    """
    return _provider(mu, tail_order).f(b)


########################################################################################################################
# VOICULESCU TRANSFORMS
########################################################################################################################

def voiculescu_series(kappa, b, tail_order=None):
    """
    This function computes the truncated series phi(b) = sum_(n=1..N) kappa_n(b^-1, ..., b^-1), at any level k.
    :param kappa: a CumulantSequence (or moments, converted first)
    :param b: a point with ||b^-1|| < 1/(4M)
    :param tail_order: the largest order N kept (default: tail_order in parameters.py)
    :return: a pair (value, tail_bound) with tail_bound = M q^N / (1 - q), q = 4M ||b^-1||
    """
    kappa = _cumulants_of(kappa)
    order = _tail_order(tail_order, kappa.order)
    value = _point_value(b)
    level = _level_of(value, kappa.dim)
    inverse, inverse_norm = TransformDomain(kappa.bound, level, "voiculescu").check(value)

    result = np.zeros_like(value)
    for n in range(1, order + 1):
        result = result + kappa.evaluate_amplified(n, [inverse] * (n - 1), level=level)

    ratio = 4. * kappa.bound * inverse_norm
    tail_bound = kappa.bound * ratio ** order / (1. - ratio)
    return result, tail_bound


def _solve_f_equation(provider, value, tol, max_iter, damping):
    """Solves F(w) = value by w <- w + (value - F(w)), damped whenever the residual increases."""

    def residual_at(w):
        try:
            return op_norm(provider.f(w) - value)
        except NumericalFailure:
            return np.inf

    w = np.array(value)
    residual = residual_at(w)
    if not np.isfinite(residual):
        raise NoConvergence("F cannot be evaluated at the starting point.")
    for iteration in range(1, max_iter + 1):
        if residual < tol:
            return w, iteration - 1, residual
        step = value - provider.f(w)
        factor = 1.
        candidate = w + step
        candidate_residual = residual_at(candidate)
        while candidate_residual > residual and factor > 1e-6:
            factor *= damping
            candidate = w + factor * step
            candidate_residual = residual_at(candidate)
        if not np.isfinite(candidate_residual):
            break
        w, residual = candidate, candidate_residual
    if residual < tol:
        return w, max_iter, residual
    raise NoConvergence("The inversion of F did not converge (residual %.3e after %d iterations); the point may be "
                        "too low in the upper half-plane." % (residual, max_iter))


def voiculescu_via_inversion(mu, b, tol=None, max_iter=None, damping=None, full_output=False):
    """
    This function computes phi(b) = F^<-1>(b) - b, where F^<-1>(b) is found as the solution w of F(w) = b by the
    iteration w <- b - (F(w) - w), started at w = b.
    :param mu: a CauchyProvider, RealizedModel, CumulantSequence or TruncatedMoments
    :param b: a point of M_k^+(B), high enough in the half-plane for the iteration to contract
    :param tol: the tolerance on ||F(w) - b|| (default: fixed_point_tol in parameters.py)
    :param max_iter: the largest number of iterations (default: fixed_point_max_iter in parameters.py)
    :param damping: the factor applied to a step that increases the residual (default: fixed_point_damping)
    :param full_output: if True, a dictionary with the solution w, the residual and the iteration count is also returned
    :return: phi(b), or (phi(b), info) when full_output is True
    """
    if tol is None:
        tol = param.fixed_point_tol
    if max_iter is None:
        max_iter = param.fixed_point_max_iter
    if damping is None:
        damping = param.fixed_point_damping
    provider = _provider(mu)
    value = _point_value(b)
    _level_of(value, provider.dim)
    w, iterations, residual = _solve_f_equation(provider, value, tol, max_iter, damping)
    result = w - value
    if full_output:
        return result, {"w": w, "iterations": iterations, "residual": residual}
    return result


########################################################################################################################
# SUBORDINATION
########################################################################################################################

def subordination_convolve(G1, G2, b, tol=None, max_iter=None, damping=None, full_output=False):
    """
    This function computes the Cauchy transform of mu_1 [+] mu_2 at b through subordination: the point omega_1 is the
    fixed point of w -> b + h_2(b + h_1(w)), with h_i(w) = F_i(w) - w, omega_2 = b + h_1(omega_1), and
    G_(mu_1 [+] mu_2)(b) = G_1(omega_1). At the fixed point, F_1(omega_1) = F_2(omega_2) and
    omega_1 + omega_2 - F_1(omega_1) = b.
    :param G1: the Cauchy transform of mu_1 (a CauchyProvider or anything it accepts)
    :param G2: the Cauchy transform of mu_2
    :param b: a point of M_k^+(B), with a margin large with respect to M_1 + M_2
    :param tol: the stopping tolerance on the step norm (default: fixed_point_tol in parameters.py)
    :param max_iter: the largest number of iterations (default: fixed_point_max_iter in parameters.py)
    :param damping: the factor applied to a step when the step norm increases (default: fixed_point_damping)
    :param full_output: if True, a dictionary with omega_1, omega_2, the iteration count and the defects of both
    identities is also returned
    :return: G_(mu_1 [+] mu_2)(b), or (value, info) when full_output is True
    """
    if tol is None:
        tol = param.fixed_point_tol
    if max_iter is None:
        max_iter = param.fixed_point_max_iter
    if damping is None:
        damping = param.fixed_point_damping
    first, second = _provider(G1), _provider(G2)
    if first.dim != second.dim:
        raise DimensionMismatch("Both distributions must be defined over the same algebra.")
    value = _point_value(b)
    _level_of(value, first.dim)

    def iteration_map(w):
        return value + second.h(value + first.h(w))

    w = np.array(value)
    previous_step = np.inf
    converged = False
    for iteration in range(1, max_iter + 1):
        new_w = iteration_map(w)
        step = op_norm(new_w - w)
        if step > previous_step:
            new_w = w + damping * (new_w - w)
            step = op_norm(new_w - w)
        w, previous_step = new_w, step
        if step < tol:
            converged = True
            break
    if not converged:
        raise NoConvergence("The subordination iteration did not converge after %d iterations (last step %.3e)."
                            % (max_iter, previous_step))

    omega_1 = w
    omega_2 = value + first.h(omega_1)
    f_1 = first.f(omega_1)
    f_2 = second.f(omega_2)
    result = first(omega_1)
    if full_output:
        return result, {"omega_1": omega_1, "omega_2": omega_2, "iterations": iteration,
                        "f_defect": op_norm(f_1 - f_2),
                        "sum_defect": op_norm(omega_1 + omega_2 - f_1 - value)}
    return result


########################################################################################################################
# CHECKS, PROFILES AND SWEEPS
########################################################################################################################

def voiculescu_negativity_check(kappa, probes, tail_order=None, tol=None):
    """
    This function checks that Im phi(b) <= 0 at every probe, as holds for the Voiculescu transform of a distribution
    on the domain ||b^-1|| < 1/(16M).
    :param kappa: a CumulantSequence
    :param probes: a ProbeSet, or a list of points
    :param tail_order: the series order
    :param tol: the tolerance (default: half_plane_tolerance in parameters.py), increased by the series tail
    :return: a dictionary with the largest eigenvalue of Im phi at each probe, the worst one and a 'passed' flag
    """
    if tol is None:
        tol = param.half_plane_tolerance
    largest_eigenvalues, passed = [], True
    for c in iter_probes(probes):
        phi, tail = voiculescu_series(kappa, c, tail_order)
        largest = float(hermitian_eigenvalues(imag_part(phi))[-1])
        largest_eigenvalues.append(largest)
        if largest > tol + tail:
            passed = False
    return {"largest_eigenvalues": largest_eigenvalues,
            "worst": max(largest_eigenvalues) if largest_eigenvalues else 0.,
            "passed": passed}


def convergence_profile(sequence, limit, probes, tail_order=None):
    """
    This function measures, for each distribution mu_i of a sequence, four distances to a limit mu: the moment tensors
    distance, and the largest distances over the probes between the Cauchy transforms, the F-transforms and the
    Voiculescu transforms (all computed as series).
    :param sequence: a list of CumulantSequence
    :param limit: the CumulantSequence of the limit
    :param probes: the probes, which must lie in the Voiculescu domain of every distribution
    :param tail_order: the series order
    :return: a pandas DataFrame with one line per index
    """
    probe_values = iter_probes(probes)
    limit_moments = moments_from_cumulants(limit)
    limit_values = []
    for c in probe_values:
        g, tail = cauchy_series(limit_moments, c, tail_order)
        phi, tail = voiculescu_series(limit, c, tail_order)
        limit_values.append((g, np.asarray(invert(g)), phi))

    lines = []
    for index, mu in enumerate(sequence):
        moments = moments_from_cumulants(mu)
        line = {"index": index,
                "moment_distance": moments.distance(limit_moments),
                "cauchy_distance": 0., "f_distance": 0., "voiculescu_distance": 0.}
        for c, (g_limit, f_limit, phi_limit) in zip(probe_values, limit_values):
            g, tail = cauchy_series(moments, c, tail_order)
            phi, tail = voiculescu_series(mu, c, tail_order)
            line["cauchy_distance"] = max(line["cauchy_distance"], op_norm(g - g_limit))
            line["f_distance"] = max(line["f_distance"], op_norm(np.asarray(invert(g)) - f_limit))
            line["voiculescu_distance"] = max(line["voiculescu_distance"], op_norm(phi - phi_limit))
        lines.append(line)
    return pd.DataFrame(lines, columns=["index", "moment_distance", "cauchy_distance", "f_distance",
                                        "voiculescu_distance"])


def _entries(prefix_line, matrix):
    line = dict(prefix_line)
    for (i, j), entry in np.ndenumerate(matrix):
        line["re_%d_%d" % (i, j)] = float(np.real(entry))
        line["im_%d_%d" % (i, j)] = float(np.imag(entry))
    return line


def probe_sweep(distribution, probes, tail_order=None, inversion=False, path=None):
    """
    This function evaluates G, F and phi of a distribution at every probe and gathers the results in a table with one
    line per probe and transform: probe id, level k, transform, sign convention, tail bound, number of iterations and
    the real and imaginary parts of every entry of the value.
    :param distribution: a CumulantSequence, TruncatedMoments or RealizedModel
    :param probes: a ProbeSet, or a list of points
    :param tail_order: the series order
    :param inversion: if True, phi is also computed by inversion of F and the iteration count is reported
    :param path: if given, the table is written there as a CSV file
    :return: the pandas DataFrame
    """
    lines = []
    exact = isinstance(distribution, RealizedModel)
    provider = CauchyProvider(distribution, tail_order=tail_order, mode="auto" if exact else "series")
    cumulants = _cumulants_of(distribution)
    for probe_id, c in enumerate(iter_probes(probes)):
        level = _level_of(c, distribution.dim)
        common = {"probe_id": probe_id, "level": level, "convention": param.cauchy_convention}
        g = provider(c)
        g_tail = provider.last_tail_bound
        lines.append(_entries(dict(common, transform="G", tail_bound=g_tail, iterations=np.nan), g))
        lines.append(_entries(dict(common, transform="F", tail_bound=np.nan, iterations=np.nan), invert(g)))
        phi, phi_tail = voiculescu_series(cumulants, c, tail_order)
        lines.append(_entries(dict(common, transform="phi", tail_bound=phi_tail, iterations=np.nan), phi))
        if inversion:
            phi, info = voiculescu_via_inversion(provider, c, full_output=True)
            lines.append(_entries(dict(common, transform="phi_inversion", tail_bound=np.nan,
                                       iterations=info["iterations"]), phi))

    first_columns = ["probe_id", "level", "transform", "convention", "tail_bound", "iterations"]
    data_frame = pd.DataFrame(lines)
    data_frame = data_frame[first_columns + [column for column in data_frame.columns if column not in first_columns]]
    if path is not None:
        data_frame.to_csv(path, na_rep='NA', index=False)
    return data_frame
