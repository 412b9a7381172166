#  -*- coding: utf-8 -*-

"""
    The script 'steinitz' contains the constructive Steinitz rearrangement and the subset selections built on it:
        - rearrange_zero_sum orders a zero-sum family of vectors of norm <= 1 in R^n so that every prefix sum has norm
          <= n, by descending through extreme points of the polytopes
          P_t = {lambda in [0, 1]^(A_t) : sum lambda_i = t - n, sum lambda_i v_i = 0};
        - subset_select finds a subset whose sum approximates t times the total sum, within n times the largest norm;
        - array_select applies the selection to every row of a triangular array of vectors.
    Extreme points are computed with the simplex method of scipy.optimize.linprog.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.optimize import linprog

from . import parameters as param
from .balgebra import NumericalFailure


class InfeasibleInput(NumericalFailure):
    """Raised when a family of vectors does not satisfy the hypotheses of a rearrangement or selection."""
    pass


########################################################################################################################
# INSTANCES AND RESULTS
########################################################################################################################

class SteinitzInstance(object):
    """
    A finite family of real vectors v_1, ..., v_k of R^n, with its norm cap max ||v_i|| and its sum.
    """

    def __init__(self, vectors, n_dim=None):
        vectors = np.array(vectors, dtype=float)
        if vectors.ndim == 1:
            vectors = vectors.reshape(-1, 1) if n_dim == 1 else vectors.reshape(1, -1)
        if vectors.ndim != 2:
            raise ValueError("The vectors must be given as a k x n array.")
        if n_dim is not None and vectors.shape[1] != n_dim:
            raise ValueError("The vectors must have length %d, got %d." % (n_dim, vectors.shape[1]))
        if not np.all(np.isfinite(vectors)):
            raise ValueError("The vectors must have finite coordinates.")
        vectors.flags.writeable = False
        self.vectors = vectors
        self.n_dim = vectors.shape[1]
        self.norms = np.linalg.norm(vectors, axis=1) if len(vectors) else np.zeros(0)
        self.norm_cap = float(np.max(self.norms)) if len(vectors) else 0.
        self.total = vectors.sum(axis=0)

    def __len__(self):
        return self.vectors.shape[0]

    def effective_dim(self, tol=None):
        """Returns the dimension of the subspace spanned by the vectors."""
        return self.span_basis(tol).shape[1]

    def span_basis(self, tol=None):
        """Returns an orthonormal basis (as columns) of the subspace spanned by the vectors."""
        if len(self) == 0 or self.norm_cap == 0.:
            return np.zeros((self.n_dim, 0))
        if tol is None:
            tol = param.steinitz_tol
        return linalg.orth(self.vectors.T, rcond=tol)

    def to_json(self):
        return {"n_dim": self.n_dim, "vectors": self.vectors.tolist()}

    @classmethod
    def from_json(cls, document):
        return cls(document["vectors"], n_dim=document.get("n_dim"))

    def __repr__(self):
        return "SteinitzInstance(k=%d, n_dim=%d, norm_cap=%.6g)" % (len(self), self.n_dim, self.norm_cap)


class SelectionResult(object):
    """
    The output of a rearrangement (kind 'permutation': an ordering of all indices) or of a selection (kind 'subset'),
    with the certified bound and the deviation actually achieved. Indices are 0-based row numbers of the instance.
    """

    def __init__(self, kind, indices, certified_bound, deviation, **details):
        self.kind = kind
        self.indices = [int(i) for i in indices]
        self.certified_bound = float(certified_bound)
        self.deviation = float(deviation)
        self.details = details

    def is_certified(self, tol=None):
        """Returns True if the achieved deviation is below the certified bound."""
        if tol is None:
            tol = param.certificate_tol
        return self.deviation <= self.certified_bound + tol

    def to_json(self):
        document = {"kind": self.kind, "indices": self.indices, "certified_bound": self.certified_bound,
                    "deviation": self.deviation}
        for key, value in sorted(self.details.items()):
            document[key] = value.tolist() if isinstance(value, np.ndarray) else value
        return document

    def __repr__(self):
        return "SelectionResult(kind=%s, size=%d, deviation=%.6g, certified_bound=%.6g)" \
               % (self.kind, len(self.indices), self.deviation, self.certified_bound)


def prefix_norms(vectors, order):
    """Returns the norms of the prefix sums of the vectors taken in the given order (0-based indices)."""
    vectors = np.asarray(vectors, dtype=float)
    if len(order) == 0:
        return np.zeros(0)
    return np.linalg.norm(np.cumsum(vectors[list(order)], axis=0), axis=1)


def read_vectors_csv(path):
    """Reads a CSV file with one vector per line (no header; lines starting with '#' are ignored)."""
    data_frame = pd.read_csv(path, header=None, comment='#')
    return SteinitzInstance(data_frame.to_numpy(dtype=float))


########################################################################################################################
# REARRANGEMENT
########################################################################################################################

def _polytope_vertex(vectors, total, rng):
    """
    Returns a vertex of {lambda in [0, 1]^k : sum lambda_i = total, sum lambda_i v_i = 0}, as the solution of a linear
    program with a random objective solved by the dual simplex method, or None if the polytope is empty.
    """
    k, n_dim = vectors.shape
    equality_matrix = np.vstack([vectors.T, np.ones((1, k))])
    equality_vector = np.concatenate([np.zeros(n_dim), [total]])
    objective = rng.standard_normal(k)
    solution = linprog(objective, A_eq=equality_matrix, b_eq=equality_vector, bounds=(0., 1.), method="highs-ds")
    if solution.status == 2:
        return None
    if solution.status != 0:
        raise InfeasibleInput("The linear program of the rearrangement failed: %s" % solution.message)
    return np.clip(solution.x, 0., 1.)


def _zero_sum_order(vectors, n_dim, tol, seed):
    """
    Core of the rearrangement for vectors of norm <= 1 summing to 0 in R^n_dim. Starting from A_k = {1, ..., k} and the
    uniform weights, each step takes a vertex mu of {mu in [0, 1]^(A_t) : sum mu_i = t - 1 - n, sum mu_i v_i = 0}, which
    is not empty since it contains lambda (t - 1 - n) / (t - n). At most n + 1 coordinates of a vertex are fractional and
    their deficits 1 - mu_i add up to n + 1, so one coordinate vanishes: that element is placed at position t and
    removed.
    """
    k = len(vectors)
    rng = np.random.default_rng(param.random_seed if seed is None else seed)
    order = [None] * k
    active = list(range(k))
    for t in range(k, n_dim, -1):
        target = float(t - 1 - n_dim)
        vertex = _polytope_vertex(vectors[active], target, rng)
        if vertex is None:
            raise InfeasibleInput("The extreme-point polytope is empty at step %d: the vectors do not sum to zero." % t)
        removed = None
        for position in np.argsort(vertex, kind="stable"):
            if vertex[position] <= tol:
                removed = position
                break
            # Without a vanishing coordinate, we check directly that the remaining family admits weights:
            remaining = [active[i] for i in range(len(active)) if i != position]
            if _polytope_vertex(vectors[remaining], target, rng) is not None:
                removed = position
                break
        if removed is None:
            raise InfeasibleInput("No element could be removed at step %d of the rearrangement." % t)
        order[t - 1] = active[removed]
        del active[removed]
    order[:len(active)] = active
    return order


def rearrange_zero_sum(instance, tol=None, seed=None, reduce_to_span=True):
    """
    This function orders a family of vectors summing to zero so that every prefix sum has norm at most n times the
    largest norm of the vectors, n being the dimension of the space they span (or the ambient one).
    :param instance: a SteinitzInstance (or an array of vectors)
    :param tol: the tolerance on the zero sum (default: steinitz_tol in parameters.py)
    :param seed: the seed of the random objectives used to reach extreme points
    :param reduce_to_span: if True, the vectors are first expressed in an orthonormal basis of their span
    :return: a SelectionResult of kind 'permutation', whose deviation is the largest prefix norm
    """
    if not isinstance(instance, SteinitzInstance):
        instance = SteinitzInstance(instance)
    if tol is None:
        tol = param.steinitz_tol
    k = len(instance)
    cap = instance.norm_cap
    if np.linalg.norm(instance.total) > tol * max(1., k * cap):
        raise InfeasibleInput("The vectors must sum to zero, their sum has norm %.3e."
                              % np.linalg.norm(instance.total))

    if reduce_to_span:
        basis = instance.span_basis()
        coordinates = instance.vectors @ basis
    else:
        coordinates = np.array(instance.vectors)
    n_dim = coordinates.shape[1]

    if k == 0:
        order = []
    elif cap == 0. or k <= n_dim:
        order = list(range(k))
    else:
        order = _zero_sum_order(coordinates / cap, n_dim, tol, seed)

    norms = prefix_norms(instance.vectors, order)
    deviation = float(np.max(norms)) if k else 0.
    certified_bound = n_dim * cap
    if deviation > certified_bound + param.certificate_tol:
        raise NumericalFailure("The rearrangement certificate failed: prefix norm %.6g above the bound %.6g."
                               % (deviation, certified_bound))
    return SelectionResult("permutation", order, certified_bound, deviation, effective_dim=n_dim,
                           prefix_norms=norms)


########################################################################################################################
# SELECTIONS
########################################################################################################################

def _householder(u):
    """Returns the orthogonal symmetric matrix R with R u = e_1, for a unit vector u."""
    n_dim = len(u)
    w = np.array(u, dtype=float)
    w[0] -= 1.
    norm = np.linalg.norm(w)
    if norm < 1e-15:
        return np.eye(n_dim)
    w /= norm
    return np.eye(n_dim) - 2. * np.outer(w, w)


def subset_select(instance, t, eps=None, tol=None, seed=None, reduce_to_span=True):
    """
    This function finds a subset sigma with ||sum_(i in sigma) v_i - t v|| <= n eps, where v is the sum of the vectors,
    eps bounds their norms and n is the dimension of their span. A Householder rotation R sends v/||v|| to e_1; the
    components of R v_i orthogonal to e_1 sum to zero and are rearranged (prefix norms <= (n-1) eps); along this order,
    the first coordinates of the prefix sums go from 0 to ||v|| by steps <= eps, and we keep the smallest prefix whose
    first coordinate is closest to t ||v||.
    :param instance: a SteinitzInstance (or an array of vectors)
    :param t: a real in [0, 1]
    :param eps: a bound on the norms of the vectors (default: their largest norm)
    :param tol: the tolerance of the underlying rearrangement (default: steinitz_tol in parameters.py)
    :param seed: the seed of the rearrangement
    :param reduce_to_span: if True, the dimension n is the one of the span of the vectors
    :return: a SelectionResult of kind 'subset'
    """
    if not isinstance(instance, SteinitzInstance):
        instance = SteinitzInstance(instance)
    if tol is None:
        tol = param.steinitz_tol
    if not 0. <= t <= 1.:
        raise ValueError("The fraction t must lie in [0, 1], got %s." % t)
    if eps is None:
        eps = instance.norm_cap
    elif instance.norm_cap > eps * (1. + tol) + tol:
        raise InfeasibleInput("A vector has norm %.6g above the cap eps = %.6g." % (instance.norm_cap, eps))

    k = len(instance)
    if reduce_to_span:
        coordinates = instance.vectors @ instance.span_basis()
    else:
        coordinates = np.array(instance.vectors)
    n_dim = max(coordinates.shape[1], 1) if k else 1
    total = coordinates.sum(axis=0) if k else np.zeros(0)
    total_norm = float(np.linalg.norm(total)) if k else 0.

    if k == 0 or t == 0.:
        chosen = []
    elif t == 1.:
        chosen = list(range(k))
    elif total_norm <= tol * max(1., k * eps):
        # The target is the origin: any prefix of a zero-sum rearrangement is close to it.
        centered = coordinates - total / k
        order = rearrange_zero_sum(centered, tol=tol, seed=seed, reduce_to_span=False).indices
        chosen = order[:int(round(t * k))]
    else:
        rotated = coordinates @ _householder(total / total_norm).T
        if rotated.shape[1] > 1:
            orthogonal = rotated[:, 1:]
            # We remove the rounding residue of the orthogonal sum, which is zero in exact arithmetic:
            orthogonal = orthogonal - orthogonal.sum(axis=0) / k
            order = rearrange_zero_sum(orthogonal, tol=tol, seed=seed, reduce_to_span=False).indices
        else:
            order = list(range(k))
        first_coordinates = np.concatenate([[0.], np.cumsum(rotated[order, 0])])
        gaps = np.abs(first_coordinates - t * total_norm)
        m = int(np.argmin(gaps))
        chosen = order[:m]

    selected_sum = instance.vectors[chosen].sum(axis=0) if len(chosen) else np.zeros(instance.n_dim)
    deviation = float(np.linalg.norm(selected_sum - t * instance.total))
    return SelectionResult("subset", chosen, n_dim * eps, deviation, eps=float(eps), t=float(t), effective_dim=n_dim)


def array_select(rows, t, target=None, tol=None, seed=None):
    """
    This function runs subset_select on every row of a triangular array of vectors. Row i is compared with the limit v
    (the given target, or by default the sum of the last row): the distance of the selected sum to t v is bounded by
    n eps_i + t ||row sum_i - v||. Errors of a row are recorded in its result instead of being raised.
    :param rows: a list of SteinitzInstance
    :param t: a real in [0, 1]
    :param target: the limit v of the row sums
    :param tol: the tolerance of the selections
    :param seed: the seed of the selections
    :return: a list of SelectionResult, one per row; their details hold the row cap, the drift of the row sum, the
    distance to t v and its budget, or the error message
    """
    rows = [row if isinstance(row, SteinitzInstance) else SteinitzInstance(row) for row in rows]
    if target is None:
        target = rows[-1].total if rows else np.zeros(0)
    target = np.asarray(target, dtype=float)

    results = []
    for row in rows:
        drift = float(np.linalg.norm(row.total - target))
        try:
            result = subset_select(row, t, tol=tol, seed=seed)
        except (NumericalFailure, ValueError) as error:
            results.append(SelectionResult("subset", [], np.nan, np.nan, error=str(error), row_cap=row.norm_cap,
                                           sum_drift=drift))
            continue
        chosen = row.vectors[result.indices].sum(axis=0) if result.indices else np.zeros(row.n_dim)
        result.details.update(row_cap=row.norm_cap, sum_drift=drift,
                              target_deviation=float(np.linalg.norm(chosen - t * target)),
                              target_budget=result.certified_bound + t * drift)
        results.append(result)
    return results


def exhaustive_best_subset(instance, t, max_size=None):
    """
    Brute-force search of the subset whose sum is closest to t times the total sum, for small families only.
    :param instance: a SteinitzInstance (or an array of vectors)
    :param t: a real in [0, 1]
    :param max_size: the largest number of vectors accepted (default: exhaustive_search_limit in parameters.py)
    :return: a SelectionResult of kind 'subset' whose deviation is the optimal one (its bound is the deviation itself)
    """
    if not isinstance(instance, SteinitzInstance):
        instance = SteinitzInstance(instance)
    if max_size is None:
        max_size = param.exhaustive_search_limit
    k = len(instance)
    if k > max_size:
        raise ValueError("Exhaustive search is limited to %d vectors, got %d." % (max_size, k))
    target = t * instance.total
    # Each subset is encoded by the bits of an integer; all subset sums are obtained at once:
    masks = np.arange(2 ** k)
    membership = ((masks[:, None] >> np.arange(k)[None, :]) & 1).astype(float)
    deviations = np.linalg.norm(membership @ instance.vectors - target, axis=1)
    best = int(np.argmin(deviations))
    chosen = [i for i in range(k) if (best >> i) & 1]
    return SelectionResult("subset", chosen, deviations[best], deviations[best], t=float(t))
