#  -*- coding: utf-8 -*-

"""
    The script 'hinchin' contains the divisibility experiment on triangular arrays of B-valued distributions:
        - the probes c_n = d_n + i lambda I, with lambda > 16M, and the finite embedding of a distribution into a real
          vector made of its truncated Voiculescu transforms at the probes, which is additive under free convolution;
        - the builders of triangular arrays from an infinitely divisible target, their centering and the check that
          their entries become infinitesimal;
        - 'run_hinchin', which selects in every row a subset of entries by the Steinitz subset selection, so that the
          convolution of the selected entries approximates the convolution power of order 1/p of the limit;
        - the numerical checkers of the tracial conditions and of complete positivity of truncated moments.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import json
import time
import multiprocessing as mp
from functools import partial

import numpy as np
import pandas as pd

from . import parameters as param
from .balgebra import (as_belement, amplify, hermitian_basis, random_self_adjoint, invert, op_norm, is_self_adjoint,
                       hermitian_eigenvalues, matrix_units, diagonal_amplification, matrix_to_json)
from .dist import (CumulantSequence, TruncatedMoments, RealizedModel, point_mass, semicircular, kraus_map,
                   free_convolve, convolution_power, center, moments_from_cumulants, moments_from_realized)
from .transforms import voiculescu_series, iter_probes
from .steinitz import subset_select


########################################################################################################################
# PROBES AND EMBEDDING
########################################################################################################################

class ProbeSet(object):
    """
    The probes c_n = d_n + i lambda I, where the d_n are self-adjoint with ||d_n|| <= 1 and lambda > 16M, so that
    ||c_n^-1|| <= 1/lambda < 1/(16M). The directions d_n are kept to build matricial probes of higher levels.
    """

    def __init__(self, directions, lam, bound):
        self.lam = float(lam)
        self.bound = float(bound)
        if not self.lam > 16. * self.bound:
            raise ValueError("The probes need lambda > 16M, got lambda = %.6g and M = %.6g." % (self.lam, self.bound))
        self.directions = [as_belement(direction) for direction in directions]
        if len(self.directions) == 0:
            raise ValueError("A probe set must contain at least one probe.")
        self.dim = self.directions[0].shape[0]
        probes = []
        for direction in self.directions:
            if not is_self_adjoint(direction) or op_norm(direction) > 1. + param.identity_tolerance:
                raise ValueError("The probe directions must be self-adjoint with norm at most 1.")
            c = np.asarray(direction) + 1j * self.lam * np.eye(self.dim)
            if self.bound > 0. and not op_norm(invert(c)) < 1. / (16. * self.bound):
                raise ValueError("A probe does not satisfy ||c^-1|| < 1/(16M).")
            probes.append(as_belement(c))
        self.probes = probes

    def __len__(self):
        return len(self.probes)

    def __iter__(self):
        return iter(self.probes)

    def level_two(self):
        """
        Returns probes of M_2(B): C_n = D_n + i lambda I_2d, with D_n the self-adjoint block matrix
        [[d_n, d_(n+1)], [d_(n+1), d_n]] rescaled to norm at most 1.
        """
        count = len(self.directions)
        probes = []
        for n in range(count):
            first, second = self.directions[n], self.directions[(n + 1) % count]
            block = np.asarray(amplify([[first, second], [second, first]]))
            norm = op_norm(block)
            if norm > 1.:
                block = block / norm
            probes.append(block + 1j * self.lam * np.eye(2 * self.dim))
        return probes

    def to_json(self):
        return {"lambda": self.lam, "bound": self.bound,
                "directions": [matrix_to_json(direction) for direction in self.directions]}

    def __repr__(self):
        return "ProbeSet(count=%d, dim=%d, lambda=%.6g, M=%.6g)" % (len(self), self.dim, self.lam, self.bound)


def build_probes(count, M, lam=None, seed=None, dim=None):
    """
    This function builds the probes c_n = d_n + i lambda I. The first directions d_n are the elements of the hermitian
    basis of M_d(C) (so that count >= d^2 probes separate the self-adjoint part of B), the next ones are drawn at
    random from the seed with norm 1.
    :param count: the number of probes
    :param M: the exponential bound of the distributions to be embedded
    :param lam: the imaginary shift lambda (default: probe_lambda_factor * M, or probe_lambda_factor when M = 0)
    :param seed: the seed of the random directions (default: random_seed in parameters.py)
    :param dim: the size d of B (default: dim in parameters.py)
    :return: a ProbeSet
    """
    if dim is None:
        dim = param.dim
    if int(count) != count or count < 1:
        raise ValueError("The number of probes must be a positive integer, got %s." % count)
    if lam is None:
        lam = param.probe_lambda_factor * (M if M > 0. else 1.)
    rng = np.random.default_rng(param.random_seed if seed is None else seed)
    directions = hermitian_basis(dim)[:int(count)]
    while len(directions) < count:
        directions.append(random_self_adjoint(dim, rng, norm=1.))
    return ProbeSet(directions, lam, M)


def _phi_values(mu, probes, tail_order=None):
    """Returns the embedding vector of mu and the tail bound of each probe."""
    pieces, tails = [], []
    for c in iter_probes(probes):
        phi, tail = voiculescu_series(mu, c, tail_order)
        pieces.append(np.concatenate([phi.real.ravel(), phi.imag.ravel()]))
        tails.append(tail)
    return np.concatenate(pieces), np.array(tails)


def phi_embed(mu, probes, tail_order=None, full_output=False):
    """
    This function embeds a distribution into a real vector: the concatenation, over the probes, of the real and
    imaginary parts of all entries of the truncated Voiculescu transform phi_mu(c_n). The vector has length 2 d^2 P for
    P probes, and the embedding of mu [+] nu is the sum of the embeddings of mu and nu.
    :param mu: a CumulantSequence
    :param probes: a ProbeSet (or a list of points in the Voiculescu domain of mu)
    :param tail_order: the series order (default: tail_order in parameters.py)
    :param full_output: if True, the tail bounds of the series at each probe are returned too
    :return: the real vector (and the array of tail bounds)
    """
    vector, tails = _phi_values(mu, probes, tail_order)
    if full_output:
        return vector, tails
    return vector


def _point_mass_embedding(b, probes):
    # phi of delta_b is constant, equal to b at every point and every level 1 probe:
    b = np.asarray(b, dtype=complex)
    piece = np.concatenate([b.real.ravel(), b.imag.ravel()])
    return np.tile(piece, len(iter_probes(probes)))


########################################################################################################################
# TRIANGULAR ARRAYS
########################################################################################################################

class TriangularArray(object):
    """
    A triangular array of distributions: row i holds the CumulantSequence mu_i1, ..., mu_in_i and a self-adjoint shift
    b_i, and represents mu_i = mu_i1 [+] ... [+] mu_in_i [+] delta_(b_i). The target is the expected limit of the mu_i.
    Identical entries of a row may be the same object, which lets every computation on them be done once.
    """

    def __init__(self, rows, shifts, target, shift_limit=None):
        if len(rows) != len(shifts):
            raise ValueError("Each row needs a shift: got %d rows and %d shifts." % (len(rows), len(shifts)))
        if any(len(row) == 0 for row in rows):
            raise ValueError("The rows of a triangular array cannot be empty.")
        self.rows = [list(row) for row in rows]
        self.shifts = [as_belement(b) for b in shifts]
        for b in self.shifts:
            if not is_self_adjoint(b):
                raise ValueError("The shifts b_i must be self-adjoint.")
        self.target = target
        self.dim = target.dim
        self.order = target.order
        self.shift_limit = as_belement(np.zeros((self.dim, self.dim)) if shift_limit is None else shift_limit)

    @property
    def row_sizes(self):
        return [len(row) for row in self.rows]

    def row_sum(self, i):
        """Returns mu_i = mu_i1 [+] ... [+] mu_in_i [+] delta_(b_i), as a CumulantSequence."""
        result = point_mass(self.shifts[i], order=self.order)
        for entry in self.rows[i]:
            result = free_convolve(result, entry)
        return result

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return "TriangularArray(row_sizes=%s, dim=%d, order=%d)" % (self.row_sizes, self.dim, self.order)


def _shift_sizes(shift_plan, n_rows):
    """Returns the scalar factors of the direction of the shifts, for each row, after validating the plan."""
    decay = shift_plan.get("decay", "harmonic")
    if decay == "none":
        return np.zeros(n_rows)
    if decay == "harmonic":
        return 1. / np.arange(1, n_rows + 1)
    if decay == "geometric":
        rate = float(shift_plan.get("rate", 0.5))
        if not 0. <= rate < 1.:
            raise ValueError("A geometric shift plan needs a rate in [0, 1), got %s." % rate)
        return rate ** np.arange(1, n_rows + 1)
    if decay == "explicit":
        values = np.array(shift_plan.get("values", []), dtype=float)
        if len(values) < n_rows:
            raise ValueError("The explicit shift plan gives %d values for %d rows." % (len(values), n_rows))
        values = values[:n_rows]
        if np.any(np.diff(np.abs(values)) > 0.):
            raise ValueError("The explicit shift plan must have nonincreasing absolute values, otherwise the shifts "
                             "may not converge.")
        return values
    raise ValueError("Unknown shift decay '%s' (expected 'none', 'harmonic', 'geometric' or 'explicit')." % decay)


def _random_noise(dim, order, size, rng):
    """Returns a semicircular law whose variance is a random completely positive map eta with ||eta(1)|| = size."""
    operator = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    eta = kraus_map([operator])
    eta_of_unit = (eta @ np.eye(dim).reshape(-1)).reshape(dim, dim)
    eta = eta * (size / op_norm(eta_of_unit))
    return semicircular(eta, order=order)


def build_array_from_id(mu, row_sizes=None, shift_plan=None, noise_scale=None, seed=None, printing_warnings=False):
    """
    This function builds a triangular array converging to an infinitely divisible distribution. Row i holds n_i copies
    of the convolution power mu^[+](1/n_i), each one optionally convolved with a semicircular noise whose variance has
    norm noise_scale/n_i^2, and the shift b_i = limit + s_i direction, where the sizes s_i follow the decay of the
    shift plan. The target of the array is mu [+] delta_limit.
    :param mu: a CumulantSequence, expected to be infinitely divisible
    :param row_sizes: the list of the n_i (default: row_sizes in parameters.py)
    :param shift_plan: a dictionary with the self-adjoint matrices 'direction' and 'limit' and the 'decay' of the sizes:
    'none', 'harmonic' (s_i = 1/i), 'geometric' (s_i = rate^i, with 'rate' < 1) or 'explicit' (with 'values' of
    nonincreasing absolute values); the default is no shift at all
    :param noise_scale: the magnitude of the noise (default: noise_scale in parameters.py)
    :param seed: the seed of the noise (default: random_seed in parameters.py)
    :param printing_warnings: if True, a warning is printed when mu is not known to be infinitely divisible
    :return: a TriangularArray
    """
    if row_sizes is None:
        row_sizes = param.row_sizes
    if noise_scale is None:
        noise_scale = param.noise_scale
    if noise_scale < 0.:
        raise ValueError("The noise scale must be nonnegative, got %s." % noise_scale)
    if any(int(n) != n or n < 1 for n in row_sizes):
        raise ValueError("The row sizes must be positive integers, got %s." % (row_sizes,))
    dim, order = mu.dim, mu.order
    rng = np.random.default_rng(param.random_seed if seed is None else seed)

    if shift_plan is None:
        shift_plan = {"decay": "none"}
    zero_matrix = np.zeros((dim, dim))
    direction = as_belement(shift_plan.get("direction", np.eye(dim)), dim=dim)
    limit = as_belement(shift_plan.get("limit", zero_matrix), dim=dim)
    if not (is_self_adjoint(direction) and is_self_adjoint(limit)):
        raise ValueError("The direction and the limit of the shift plan must be self-adjoint.")
    sizes = _shift_sizes(shift_plan, len(row_sizes))

    rows, shifts = [], []
    for i, n in enumerate(row_sizes):
        n = int(n)
        entry = convolution_power(mu, 1. / n, printing_warnings=printing_warnings)
        if noise_scale > 0.:
            row = [free_convolve(entry, _random_noise(dim, order, noise_scale / n ** 2, rng)) for j in range(n)]
        else:
            row = [entry] * n
        rows.append(row)
        shifts.append(np.asarray(limit) + sizes[i] * np.asarray(direction))

    target = free_convolve(mu, point_mass(limit, order=order))
    return TriangularArray(rows, shifts, target, shift_limit=limit)


def _moment_row_max(row):
    cache = {}
    for entry in row:
        if id(entry) not in cache:
            cache[id(entry)] = moments_from_cumulants(entry).max_basis_norm()
    return max(cache.values())


def infinitesimality_check(array, tol_schedule=None):
    """
    This function checks that the entries of the array tend to delta_0 uniformly: for each row, it computes the largest
    norm of all stored moment maps of the entries (evaluated on matrix units), and requires these row maxima to be
    strictly decreasing and below the tolerance schedule.
    :param array: a TriangularArray
    :param tol_schedule: a list of tolerances (one per row) or a function of the row size n_i; no schedule by default
    :return: a dictionary with the row maxima, the two checks and the verdict ('PASS' or 'FAIL')
    """
    row_max = [_moment_row_max(row) for row in array.rows]
    decreasing = all(later < earlier for earlier, later in zip(row_max, row_max[1:]))
    if tol_schedule is None:
        within_schedule = True
    else:
        if callable(tol_schedule):
            tolerances = [tol_schedule(n) for n in array.row_sizes]
        else:
            tolerances = list(tol_schedule)
            if len(tolerances) != len(row_max):
                raise ValueError("The schedule gives %d tolerances for %d rows." % (len(tolerances), len(row_max)))
        within_schedule = all(value <= tol for value, tol in zip(row_max, tolerances))
    return {"row_max": row_max,
            "decreasing": decreasing,
            "within_schedule": within_schedule,
            "verdict": "PASS" if decreasing and within_schedule else "FAIL"}


def center_array(array):
    """
    Returns the array whose entries are all centered (first cumulant 0), the removed first cumulants being added to
    the shift of their row. Identical entries stay identical objects.
    """
    rows, shifts = [], []
    shift_of_last_row = np.zeros((array.dim, array.dim), dtype=complex)
    for row, shift in zip(array.rows, array.shifts):
        cache = {}
        centered_row = []
        total_shift = np.array(shift)
        for entry in row:
            if id(entry) not in cache:
                cache[id(entry)] = center(entry)
            centered, removed = cache[id(entry)]
            centered_row.append(centered)
            total_shift = total_shift + removed
        rows.append(centered_row)
        shifts.append((total_shift + total_shift.conj().T) / 2.)
        shift_of_last_row = shifts[-1] - np.asarray(shift)
    return TriangularArray(rows, shifts, array.target, shift_limit=np.asarray(array.shift_limit) + shift_of_last_row)


########################################################################################################################
# DIVISIBILITY EXPERIMENT
########################################################################################################################

def _tensors_norm(tensors, dim):
    # Largest operator norm of the maps evaluated on matrix units, over all orders:
    return max(float(np.max(np.linalg.norm(np.asarray(t).reshape(-1, dim, dim), ord=2, axis=(1, 2))))
               for t in tensors)


def _selected_cumulants(entries, indices, shift, t, dim, order):
    """Returns the cumulant tensors of nu = (convolution of the selected entries) [+] delta_(t b)."""
    tensors = [np.zeros((dim * dim,) * n, dtype=complex) for n in range(1, order + 1)]
    for j in indices:
        for n in range(order):
            tensors[n] = tensors[n] + entries[j].tensors[n]
    tensors[0] = tensors[0] + t * np.asarray(shift).reshape(-1)
    return tensors


def _run_row(row_index, array, mu, probes, t, tail_order, mu_phi, mu_tails, printing_warnings=False):
    """Runs the selection on one row and measures the resulting deviations against their budgets."""
    t_start = time.time()
    entries = array.rows[row_index]
    shift = array.shifts[row_index]
    dim, order = array.dim, array.order
    n_i = len(entries)

    cache = {}
    for entry in entries:
        if id(entry) not in cache:
            cache[id(entry)] = _phi_values(entry, probes, tail_order)
    vectors = np.array([cache[id(entry)][0] for entry in entries])
    tails = np.array([cache[id(entry)][1] for entry in entries])

    # Selection in the embedding space:
    selection = subset_select(vectors, t)
    indices = selection.indices
    shift_vector = _point_mass_embedding(shift, probes)
    row_phi = vectors.sum(axis=0) + shift_vector
    nu_phi = vectors[indices].sum(axis=0) + t * shift_vector if indices else t * shift_vector
    phi_deviation = float(np.linalg.norm(nu_phi - t * mu_phi))
    phi_drift = float(np.linalg.norm(row_phi - mu_phi))
    # Error of the truncated series with respect to the transforms, measured in the embedding norm:
    nu_tails = tails[indices].sum(axis=0) if indices else np.zeros(len(mu_tails))
    tail_term = float(np.sqrt(dim * np.sum((nu_tails + t * mu_tails) ** 2)))
    phi_budget = selection.certified_bound + t * phi_drift + tail_term

    # Same comparison for the cumulant tensors:
    nu_tensors = _selected_cumulants(entries, indices, shift, t, dim, order)
    entry_sum = _selected_cumulants(entries, range(n_i), np.zeros((dim, dim)), 0., dim, order)
    row_tensors = [s + (np.asarray(shift).reshape(-1) if n == 0 else 0.) for n, s in enumerate(entry_sum)]
    cumulant_distance = _tensors_norm([nu - t * np.asarray(k) for nu, k in zip(nu_tensors, mu.tensors)], dim)
    cumulant_drift = _tensors_norm([row - np.asarray(k) for row, k in zip(row_tensors, mu.tensors)], dim)
    mean_tensors = [s / n_i for s in entry_sum]
    spread = max(_tensors_norm([np.asarray(entry.tensors[n]) - mean_tensors[n] for n in range(order)], dim)
                 for entry in {id(entry): entry for entry in entries}.values())
    mismatch = abs(len(indices) - t * n_i)
    cumulant_budget = (len(indices) + t * n_i) * spread + mismatch * _tensors_norm(mean_tensors, dim) \
        + t * cumulant_drift

    tol = param.certificate_tol
    verdict = "PASS" if phi_deviation <= phi_budget + tol and cumulant_distance <= cumulant_budget + tol \
        else "INCONCLUSIVE"
    if printing_warnings:
        if verdict != "PASS":
            print("WARNING: the row", row_index, "exceeds its budget (phi deviation %.3e for a budget %.3e, "
                  "cumulant distance %.3e for a budget %.3e)!" % (phi_deviation, phi_budget, cumulant_distance,
                                                                  cumulant_budget))
        print("Row %d (n_i = %d) done in %.3f s." % (row_index, n_i, time.time() - t_start))

    bound = sum(entries[j].bound for j in indices) + t * op_norm(shift)
    nu = CumulantSequence(dim, nu_tensors, bound=bound,
                          infinitely_divisible=all(entries[j].infinitely_divisible for j in indices),
                          certified=all(entries[j].certified for j in indices))
    line = {"row": row_index, "n_i": n_i, "subset": [int(j) for j in indices], "subset_size": len(indices),
            "row_cap": selection.details.get("eps", 0.), "steinitz_bound": selection.certified_bound,
            "selection_deviation": selection.deviation,
            "phi_deviation": phi_deviation, "phi_drift": phi_drift, "tail_term": tail_term, "phi_budget": phi_budget,
            "cumulant_distance": cumulant_distance, "cumulant_drift": cumulant_drift,
            "cumulant_budget": cumulant_budget, "verdict": verdict}
    return line, nu


class ExperimentReport(object):
    """
    The result of 'run_hinchin': one line per row with the selected subset, the deviations and their budgets, the last
    selected distribution nu and the check of the p-fold convolution of nu against the limit.
    """

    def __init__(self, rows, p, final_nu, reconvolution_error, reconvolution_budget):
        self.rows = rows
        self.p = int(p)
        self.t = 1. / self.p
        self.final_nu = final_nu
        self.reconvolution_error = float(reconvolution_error)
        self.reconvolution_budget = float(reconvolution_budget)
        all_pass = all(line["verdict"] == "PASS" for line in rows)
        reconvolution_ok = self.reconvolution_error <= self.reconvolution_budget + param.certificate_tol
        self.verdict = "PASS" if all_pass and reconvolution_ok else "INCONCLUSIVE"

    def to_dataframe(self):
        """Returns the summary table: row, n_i, size of the subset, deviations, budgets and verdict."""
        columns = ["row", "n_i", "subset_size", "phi_deviation", "phi_budget", "cumulant_distance",
                   "cumulant_budget", "verdict"]
        data_frame = pd.DataFrame([{key: line[key] for key in columns} for line in self.rows], columns=columns)
        return data_frame.rename(columns={"phi_deviation": "deviation", "phi_budget": "budget"})

    def to_json_lines(self):
        """Returns one JSON document per row (keys sorted, so that identical runs give identical text)."""
        return "\n".join(json.dumps(line, sort_keys=True) for line in self.rows) + "\n"

    def summary(self):
        return {"p": self.p, "t": self.t, "verdict": self.verdict, "reconvolution_error": self.reconvolution_error,
                "reconvolution_budget": self.reconvolution_budget, "n_rows": len(self.rows)}

    def budget_sound(self, tol=None):
        """Returns True if every PASS row has its deviations below their budgets."""
        if tol is None:
            tol = param.certificate_tol
        return all(line["phi_deviation"] <= line["phi_budget"] + tol
                   and line["cumulant_distance"] <= line["cumulant_budget"] + tol
                   for line in self.rows if line["verdict"] == "PASS")

    def __repr__(self):
        return "ExperimentReport(p=%d, rows=%d, verdict=%s)" % (self.p, len(self.rows), self.verdict)


def run_hinchin(array, p=None, probes=None, tail_order=None, jobs=None, printing_warnings=False):
    """
    This function runs the divisibility experiment on a triangular array whose rows converge to mu = array.target.
    With t = 1/p, the array is first centered; then, in each row, the embedding vectors of the entries are computed
    and a subset sigma_i is selected whose vectors add up to t times the row sum, within the Steinitz bound. The
    selected distribution is nu_i = (convolution of the selected entries) [+] delta_(t b_i). We report, against their
    budgets, the deviation of the embedding of nu_i from t times the embedding of mu and the distance of the cumulants
    of nu_i to t kappa_mu. Finally, the p-fold convolution of the last nu_i is compared with mu.
    :param array: a TriangularArray
    :param p: the order of the convolution root (default: divisibility_order in parameters.py)
    :param probes: a ProbeSet valid for the bound of the target (default: probe_count probes built for it)
    :param tail_order: the order of the Voiculescu series (default: tail_order in parameters.py)
    :param jobs: the number of processes used for the rows (default: jobs in parameters.py)
    :param printing_warnings: if True, progress and anomalies are printed
    :return: an ExperimentReport
    """
    if p is None:
        p = param.divisibility_order
    if jobs is None:
        jobs = param.jobs
    if int(p) != p or p < 1:
        raise ValueError("The divisibility order p must be a positive integer, got %s." % p)
    p = int(p)
    t = 1. / p
    mu = array.target
    if probes is None:
        probes = build_probes(param.probe_count, mu.bound, dim=mu.dim)
    t_start = time.time()
    if printing_warnings:
        print("Running the divisibility experiment with p = %d on rows of sizes %s..." % (p, array.row_sizes))

    centered = center_array(array)
    mu_phi, mu_tails = _phi_values(mu, probes, tail_order)
    run_row = partial(_run_row, array=centered, mu=mu, probes=probes, t=t, tail_order=tail_order,
                      mu_phi=mu_phi, mu_tails=mu_tails, printing_warnings=printing_warnings)
    row_indices = list(range(len(centered)))
    if jobs > 1 and mp.current_process().daemon:
        # Daemonic workers (e.g. of a pool of scenarios) cannot start a pool of their own:
        if printing_warnings:
            print("WARNING: the rows are run sequentially, as the experiment already runs in a worker process.")
        jobs = 1
    if jobs > 1 and len(row_indices) > 1:
        with mp.Pool(min(jobs, len(row_indices))) as pool:
            outputs = pool.map(run_row, row_indices)
    else:
        outputs = [run_row(i) for i in row_indices]
    lines = [line for line, nu in outputs]
    final_nu = outputs[-1][1]

    reconvolved = final_nu
    for i in range(p - 1):
        reconvolved = free_convolve(reconvolved, final_nu)
    reconvolution_error = _tensors_norm([np.asarray(nu) - np.asarray(kappa)
                                         for nu, kappa in zip(reconvolved.tensors, mu.tensors)], mu.dim)
    reconvolution_budget = p * lines[-1]["cumulant_budget"]
    report = ExperimentReport(lines, p, final_nu, reconvolution_error, reconvolution_budget)
    if printing_warnings:
        print("The experiment is done (verdict: %s), it took %.3f s." % (report.verdict, time.time() - t_start))
    return report


def verify_level_two(report, array, probes, tail_order=None):
    """
    This function checks the selected subsets at level 2: at matricial probes C of M_2(B), the truncated transform of
    the selected nu_i (computed entry by entry) is compared with t times the one of the limit. As the series are linear
    in the cumulants, the difference is bounded by sum_n Delta_n (2 d^(3/2) ||C^-1||)^(n-1), where Delta_n is the
    largest norm on matrix units of the difference of the cumulants of order n.
    :param report: the ExperimentReport of the array
    :param array: the TriangularArray given to 'run_hinchin'
    :param probes: the ProbeSet used for the run
    :param tail_order: the series order
    :return: a pandas DataFrame with one line per row: largest deviation over the probes, its bound and a 'passed' flag
    """
    centered = center_array(array)
    mu = array.target
    t = report.t
    dim = array.dim
    level_two_probes = probes.level_two()
    targets = [t * voiculescu_series(mu, c, tail_order)[0] for c in level_two_probes]
    order = min(param.tail_order, mu.order) if tail_order is None else tail_order

    lines = []
    for line in report.rows:
        i = line["row"]
        entries, shift = centered.rows[i], centered.shifts[i]
        cache = {}
        nu_tensors = _selected_cumulants(entries, line["subset"], shift, t, dim, mu.order)
        deltas = [float(np.max(np.linalg.norm((nu - t * np.asarray(k)).reshape(-1, dim, dim), ord=2, axis=(1, 2))))
                  for nu, k in zip(nu_tensors, mu.tensors)]
        deviation, bound = 0., 0.
        for c, target in zip(level_two_probes, targets):
            value = np.asarray(diagonal_amplification(t * np.asarray(shift), 2))
            for j in line["subset"]:
                key = (id(entries[j]), id(c))
                if key not in cache:
                    cache[key] = voiculescu_series(entries[j], c, tail_order)[0]
                value = value + cache[key]
            ratio = 2. * dim ** 1.5 * op_norm(invert(c))
            deviation = max(deviation, op_norm(value - target))
            bound = max(bound, sum(delta * ratio ** n for n, delta in enumerate(deltas[:order])))
        lines.append({"row": i, "deviation": deviation, "bound": bound,
                      "passed": deviation <= bound + param.certificate_tol})
    return pd.DataFrame(lines, columns=["row", "deviation", "bound", "passed"])


########################################################################################################################
# CONDITION CHECKERS
########################################################################################################################

def _moments_for_checks(mu):
    if isinstance(mu, TruncatedMoments):
        return mu
    if isinstance(mu, CumulantSequence):
        return moments_from_cumulants(mu)
    if isinstance(mu, RealizedModel):
        return moments_from_realized(mu)
    raise TypeError("Cannot check an object of type %s." % type(mu).__name__)


def monomial_family(dim, degree):
    """
    Returns all the monomials c_0 X c_1 ... X c_j of degree j <= degree whose coefficients are matrix units, each one as
    the tuple of its j+1 coefficients. They form a basis of the polynomials of degree <= degree.
    """
    units = matrix_units(dim)
    family = []
    for j in range(degree + 1):
        words = [()]
        for position in range(j + 1):
            words = [word + (unit,) for word in words for unit in units]
        family += words
    return family


def word_adjoint(word):
    """Returns the coefficients of P* for P = c_0 X ... X c_j, i.e. c_j* X ... X c_0*."""
    return tuple(np.asarray(c).conj().T for c in reversed(word))


def word_product(first, second):
    """Returns the coefficients of the product PQ: the last coefficient of P and the first of Q are merged."""
    return first[:-1] + (np.asarray(first[-1]) @ np.asarray(second[0]),) + second[1:]


def _normalized_trace(x):
    return np.trace(x) / x.shape[0]


def check_tracial_conditions(mu, M=None, degree_cutoff=None, tol=None):
    """
    This function checks, on the polynomials of degree <= degree_cutoff with matrix-unit coefficients, the conditions
    characterizing the distributions of self-adjoint elements of norm <= M in a tracial probability space, tau being
    the normalized trace of B:
        (1) tau(mu(P* X P)) <= M tau(mu(P* P)): largest eigenvalue of the Gram form of P* X Q minus M times the Gram
            form of P* Q;
        (2) Cauchy-Schwarz for tau(mu(P* Q)): positivity of the Gram matrix;
        (3) traciality tau(mu(PQ)) = tau(mu(QP)).
    :param mu: a TruncatedMoments (or a CumulantSequence or a RealizedModel), of order >= 2 degree_cutoff + 1
    :param M: the norm bound (default: the bound of mu)
    :param degree_cutoff: the largest degree of the monomials (default: degree_cutoff in parameters.py)
    :param tol: the relative tolerance (default: positivity_tol in parameters.py)
    :return: a dictionary with, for each condition, its worst violation and a 'passed' flag, and a global 'passed'
    """
    moments = _moments_for_checks(mu)
    if M is None:
        M = moments.bound
    if degree_cutoff is None:
        degree_cutoff = param.degree_cutoff
    if tol is None:
        tol = param.positivity_tol
    if moments.order < 2 * degree_cutoff + 1:
        raise ValueError("Checking monomials of degree %d needs moments of order %d, got %d."
                         % (degree_cutoff, 2 * degree_cutoff + 1, moments.order))

    family = monomial_family(moments.dim, degree_cutoff)
    adjoints = [word_adjoint(word) for word in family]
    size = len(family)
    gram = np.zeros((size, size), dtype=complex)
    gram_x = np.zeros((size, size), dtype=complex)
    asymmetry = 0.
    for a in range(size):
        for b in range(size):
            gram[a, b] = _normalized_trace(moments.evaluate_word(word_product(adjoints[a], family[b])))
            # Concatenation inserts one more letter X between P* and Q:
            gram_x[a, b] = _normalized_trace(moments.evaluate_word(adjoints[a] + family[b]))
            direct = _normalized_trace(moments.evaluate_word(word_product(family[a], family[b])))
            commuted = _normalized_trace(moments.evaluate_word(word_product(family[b], family[a])))
            asymmetry = max(asymmetry, abs(direct - commuted))

    scale = max(1., op_norm(gram), op_norm(gram_x))
    norm_violation = float(hermitian_eigenvalues(gram_x - M * gram)[-1])
    positivity_violation = max(0., -float(hermitian_eigenvalues(gram)[0]))
    report = {"norm_bound": {"worst": max(0., norm_violation), "passed": norm_violation <= tol * scale},
              "positivity": {"worst": positivity_violation, "passed": positivity_violation <= tol * scale},
              "traciality": {"worst": float(asymmetry), "passed": asymmetry <= tol * scale},
              "family_size": size}
    report["passed"] = all(report[key]["passed"] for key in ["norm_bound", "positivity", "traciality"])
    return report


def check_complete_positivity(mu, family_degree=None, tol=None):
    """
    This function assembles the block matrix [mu(P_i* P_j)]_(i,j) over the monomials P_i of degree <= family_degree with
    matrix-unit coefficients, and checks that it is a positive element of M_n(B).
    :param mu: a TruncatedMoments (or a CumulantSequence or a RealizedModel), of order >= 2 family_degree
    :param family_degree: the largest degree of the monomials (default: degree_cutoff in parameters.py)
    :param tol: the relative tolerance (default: positivity_tol in parameters.py)
    :return: a dictionary with the smallest eigenvalue, the defect of self-adjointness and the verdict
    """
    moments = _moments_for_checks(mu)
    if family_degree is None:
        family_degree = param.degree_cutoff
    if tol is None:
        tol = param.positivity_tol
    if moments.order < max(2 * family_degree, 1):
        raise ValueError("Checking monomials of degree %d needs moments of order %d, got %d."
                         % (family_degree, 2 * family_degree, moments.order))
    family = monomial_family(moments.dim, family_degree)
    blocks = [[moments.evaluate_word(word_product(word_adjoint(first), second)) for second in family]
              for first in family]
    block_matrix = np.asarray(amplify(blocks))
    scale = max(1., op_norm(block_matrix))
    min_eigenvalue = float(hermitian_eigenvalues(block_matrix)[0])
    return {"min_eigenvalue": min_eigenvalue,
            "hermitian_defect": op_norm(block_matrix - block_matrix.conj().T),
            "family_size": len(family),
            "passed": min_eigenvalue >= -tol * scale}
