#  -*- coding: utf-8 -*-

"""
    The script 'dist' contains the representations of B-valued distributions used by freediv:
        - TruncatedMoments: the moment maps m_n(b_1, ..., b_(n-1)) = mu(X b_1 X ... b_(n-1) X), n = 1, ..., N_max;
        - CumulantSequence: the free cumulant maps kappa_n, with the same storage;
        - RealizedModel: a self-adjoint matrix a in M_d(C) (x) M_N(C) together with the block expectation
          E_B = id (x) tr_N, which realizes a distribution exactly.
    It also contains the constructors (point masses, semicircular laws, random matrix models), the moment-cumulant
    conversion in both directions, the free additive convolution and the convolution powers.

    A multilinear map of arity r (r coefficient slots) is stored as a complex array of shape (d*d,)*(r+1): each of the
    first r axes indexes the matrix unit E_pq (flat index p*d+q) given in the corresponding slot, and the last axis is
    the row-major vectorization of the d x d output. Maps of order n have arity n-1.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import itertools

import numpy as np

from . import parameters as param
from .balgebra import (DimensionMismatch, as_belement, op_norm, is_self_adjoint, blocks_of, amplify, _frozen,
                       random_self_adjoint, matrix_to_json, matrix_from_json, hermitian_eigenvalues)


########################################################################################################################
# TENSOR HELPERS
########################################################################################################################

def check_tensor_size(dim, order, max_tensor_entries=None):
    """
    This function refuses the truncation orders whose largest tensor, with (d^2)^order entries, would exceed the
    allowed size.
    :param dim: the size d of B = M_d(C)
    :param order: the truncation order
    :param max_tensor_entries: the largest number of entries allowed (default in parameters.py)
    """
    if max_tensor_entries is None:
        max_tensor_entries = param.max_tensor_entries
    if order < 1:
        raise ValueError("The truncation order must be at least 1, got %s." % order)
    if (dim * dim) ** order > max_tensor_entries:
        raise ValueError("With d = %d, order %d needs tensors of %d entries, above the limit of %d."
                         % (dim, order, (dim * dim) ** order, max_tensor_entries))


def _complex_to_json(array):
    array = np.asarray(array, dtype=complex)
    return np.stack([array.real, array.imag], axis=-1).tolist()


def _complex_from_json(nested):
    array = np.array(nested, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def _contract(tensor, args, dim):
    # Each argument is contracted with the first remaining slot axis:
    result = tensor
    for b in args:
        result = np.tensordot(np.asarray(b, dtype=complex).reshape(-1), result, axes=(0, 0))
    return result.reshape(dim, dim)


def _multiply(left, right, dim):
    """
    Product of two tensor-represented multilinear maps: the result takes the slots of 'left' followed by those of
    'right', and its output is the matrix product of both outputs.
    """
    d2 = dim * dim
    left_matrices = left.reshape(-1, dim, dim)
    right_matrices = right.reshape(-1, dim, dim)
    product = np.einsum('aik,bkj->abij', left_matrices, right_matrices)
    return product.reshape(left.shape[:-1] + right.shape[:-1] + (d2,))


def _substitute(tensor, slot, argument):
    """
    Feeds the output of the map 'argument' into the slot number 'slot' of 'tensor'; the slots of 'argument' take the
    place of the replaced slot.
    """
    n_new = argument.ndim - 1
    result = np.tensordot(argument, tensor, axes=([argument.ndim - 1], [slot]))
    return np.moveaxis(result, list(range(n_new)), list(range(slot, slot + n_new)))


########################################################################################################################
# SEQUENCES OF MULTILINEAR MAPS
########################################################################################################################

class _MultilinearSequence(object):
    """
    Common storage of TruncatedMoments and CumulantSequence: maps of orders 1, ..., N stored as dense tensors over the
    matrix-unit basis, together with an exponential bound M of the underlying distribution.
    """

    kind = None

    def __init__(self, dim, tensors, bound=None):
        self.dim = int(dim)
        d2 = self.dim * self.dim
        if len(tensors) == 0:
            raise ValueError("At least one order must be given.")
        check_tensor_size(self.dim, len(tensors))
        stored = []
        for n, tensor in enumerate(tensors, start=1):
            array = np.array(tensor, dtype=complex)
            if array.shape != (d2,) * n:
                raise DimensionMismatch("The map of order %d must have shape %s, got %s."
                                        % (n, (d2,) * n, array.shape))
            stored.append(_frozen(array))
        self.tensors = tuple(stored)
        if bound is None:
            bound = self._estimated_bound()
        if bound < 0.:
            raise ValueError("The exponential bound must be nonnegative, got %s." % bound)
        self.bound = float(bound)

    @property
    def order(self):
        return len(self.tensors)

    def _estimated_bound(self):
        raise NotImplementedError

    def _check_order(self, n):
        if int(n) != n or n < 1 or n > self.order:
            raise ValueError("The order must be an integer between 1 and %d, got %s." % (self.order, n))

    def tensor(self, n):
        """Returns the tensor of the map of order n."""
        self._check_order(n)
        return self.tensors[n - 1]

    def evaluate(self, n, args):
        """
        Evaluates the map of order n on the n-1 coefficients args = (b_1, ..., b_(n-1)).
        :param n: the order
        :param args: a sequence of n-1 d x d matrices
        :return: a d x d matrix
        """
        self._check_order(n)
        if len(args) != n - 1:
            raise ValueError("The map of order %d takes %d arguments, got %d." % (n, n - 1, len(args)))
        return _contract(self.tensors[n - 1], args, self.dim)

    def evaluate_amplified(self, n, args, level=None):
        """
        This function evaluates the level-k extension (map (x) id_k) of the map of order n on n-1 elements of M_k(B).
        The block (i_0, i_r) of the result is the sum over i_1, ..., i_(r-1) of f(B_1[i_0, i_1], ..., B_r[i_(r-1), i_r]).
        :param n: the order
        :param args: a sequence of n-1 (kd) x (kd) matrices
        :param level: the level k (only needed when n = 1)
        :return: a (kd) x (kd) matrix
        """
        self._check_order(n)
        if len(args) != n - 1:
            raise ValueError("The map of order %d takes %d arguments, got %d." % (n, n - 1, len(args)))
        d, d2 = self.dim, self.dim * self.dim
        tensor = self.tensors[n - 1]
        if n == 1:
            if level is None:
                raise ValueError("The level must be given to amplify a map without argument.")
            return np.kron(np.eye(level), tensor.reshape(d, d))

        blocks = []
        for b in args:
            b_blocks = blocks_of(b, d)
            blocks.append(b_blocks.reshape(b_blocks.shape[0], b_blocks.shape[1], d2))
        k = blocks[0].shape[0]
        if level is not None and level != k or any(block.shape[0] != k for block in blocks):
            raise DimensionMismatch("All the arguments must belong to the same M_k(B).")

        # We contract the slots one by one, chaining the block indices:
        result = np.einsum('ijs,s...->ij...', blocks[0], tensor)
        for block in blocks[1:]:
            result = np.einsum('ajs...,jbs->ab...', result, block)
        return np.asarray(amplify(result.reshape(k, k, d, d)))

    def basis_norms(self, n):
        """Returns the operator norms of the map of order n evaluated on every tuple of matrix units."""
        self._check_order(n)
        matrices = self.tensors[n - 1].reshape(-1, self.dim, self.dim)
        return np.linalg.norm(matrices, ord=2, axis=(1, 2))

    def max_basis_norm(self, n=None):
        """Returns the largest basis norm of the map of order n, or over all orders when n is None."""
        if n is None:
            return max(float(np.max(self.basis_norms(k))) for k in range(1, self.order + 1))
        return float(np.max(self.basis_norms(n)))

    def distance(self, other):
        """
        Returns the largest operator norm of the difference of both sequences evaluated on matrix units, over all
        stored orders. Both sequences must have the same dimension and order.
        """
        if not isinstance(other, _MultilinearSequence) or other.dim != self.dim or other.order != self.order:
            raise DimensionMismatch("Only sequences of the same dimension and order can be compared.")
        worst = 0.
        for mine, theirs in zip(self.tensors, other.tensors):
            difference = (mine - theirs).reshape(-1, self.dim, self.dim)
            worst = max(worst, float(np.max(np.linalg.norm(difference, ord=2, axis=(1, 2)))))
        return worst

    def adjoint_defect(self):
        """
        Returns the largest deviation from the identity f(b_1, ..., b_r)* = f(b_r*, ..., b_1*) on matrix units, which
        holds for the moments and cumulants of every self-adjoint variable.
        """
        d = self.dim
        # Flat index of the adjoint of each matrix unit (E_pq* = E_qp):
        swap = np.arange(d * d).reshape(d, d).T.reshape(-1)
        worst = 0.
        for n, tensor in enumerate(self.tensors, start=1):
            r = n - 1
            adjointed = np.take(tensor, swap, axis=r).conj()
            reversed_args = tensor.transpose(list(reversed(range(r))) + [r])
            for axis in range(r):
                reversed_args = np.take(reversed_args, swap, axis=axis)
            worst = max(worst, float(np.max(np.abs(adjointed - reversed_args))))
        return worst

    def truncated(self, order):
        """Returns the same sequence restricted to the orders 1, ..., order."""
        self._check_order(order)
        return self._rebuild(self.tensors[:order])

    def _rebuild(self, tensors, bound=None):
        return self.__class__(self.dim, tensors, bound=self.bound if bound is None else bound)

    def to_json(self):
        return {"dim": self.dim,
                "order": self.order,
                "bound": self.bound,
                self.kind: [_complex_to_json(tensor) for tensor in self.tensors]}

    def __repr__(self):
        return "%s(dim=%d, order=%d, bound=%.6g)" % (self.__class__.__name__, self.dim, self.order, self.bound)


class TruncatedMoments(_MultilinearSequence):
    """
    The moments m_1, ..., m_N of a B-valued distribution, m_n(b_1, ..., b_(n-1)) = mu(X b_1 X ... b_(n-1) X), and an
    exponential bound M such that ||m_n(b_1, ..., b_(n-1))|| <= M^n ||b_1|| ... ||b_(n-1)||.
    """

    kind = "moments"

    def _estimated_bound(self):
        return max(self.max_basis_norm(n) ** (1. / n) for n in range(1, self.order + 1))

    def evaluate_word(self, coeffs):
        """
        This function evaluates the distribution on the monomial c_0 X c_1 X ... X c_n, using bimodularity:
        mu(c_0 X c_1 ... X c_n) = c_0 m_n(c_1, ..., c_(n-1)) c_n, and mu(c_0) = c_0.
        :param coeffs: the n+1 coefficients c_0, ..., c_n (d x d matrices)
        :return: the d x d matrix value
        """
        if len(coeffs) == 0:
            raise ValueError("A word has at least one coefficient.")
        n = len(coeffs) - 1
        first = np.asarray(coeffs[0], dtype=complex)
        if n == 0:
            return first
        last = np.asarray(coeffs[-1], dtype=complex)
        return first @ self.evaluate(n, coeffs[1:-1]) @ last

    @classmethod
    def from_json(cls, document):
        return cls(int(document["dim"]), [_complex_from_json(t) for t in document["moments"]],
                   bound=document.get("bound"))


class CumulantSequence(_MultilinearSequence):
    """
    The free cumulants kappa_1, ..., kappa_N of a B-valued distribution, and its exponential bound M.
    The flag 'infinitely_divisible' records that the sequence was built from infinitely divisible pieces (point masses,
    semicircular laws and their convolutions or powers), and 'certified' is False when a convolution power of order
    t < 1 has been taken from a sequence that is not known to be infinitely divisible.
    """

    kind = "cumulants"

    def __init__(self, dim, tensors, bound=None, infinitely_divisible=False, certified=True):
        super(CumulantSequence, self).__init__(dim, tensors, bound=bound)
        self.infinitely_divisible = bool(infinitely_divisible)
        self.certified = bool(certified)

    def _estimated_bound(self):
        # Lower estimate obtained by inverting ||kappa_n|| <= M (4M)^(n-1):
        estimate = self.max_basis_norm(1)
        for n in range(2, self.order + 1):
            estimate = max(estimate, (self.max_basis_norm(n) / 4. ** (n - 1)) ** (1. / n))
        return estimate

    def _rebuild(self, tensors, bound=None):
        return CumulantSequence(self.dim, tensors, bound=self.bound if bound is None else bound,
                                infinitely_divisible=self.infinitely_divisible, certified=self.certified)

    def first(self):
        """Returns kappa_1 = mu(X) as a d x d matrix."""
        return self.tensors[0].reshape(self.dim, self.dim)

    def to_json(self):
        document = super(CumulantSequence, self).to_json()
        document["infinitely_divisible"] = self.infinitely_divisible
        document["certified"] = self.certified
        return document

    @classmethod
    def from_json(cls, document):
        return cls(int(document["dim"]), [_complex_from_json(t) for t in document["cumulants"]],
                   bound=document.get("bound"),
                   infinitely_divisible=document.get("infinitely_divisible", False),
                   certified=document.get("certified", True))


def random_cumulants(dim, order, seed=None, scale=1.):
    """
    Draws a CumulantSequence with independent complex Gaussian entries (scaled by 'scale'). Such sequences are not
    distributions in general; they are used to test the algebra of the moment-cumulant relation.
    """
    rng = np.random.default_rng(param.random_seed if seed is None else seed)
    d2 = dim * dim
    tensors = []
    for n in range(1, order + 1):
        shape = (d2,) * n
        tensors.append(scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))
    return CumulantSequence(dim, tensors)


########################################################################################################################
# REALIZED MATRIX MODELS
########################################################################################################################

class RealizedModel(object):
    """
    A self-adjoint element a of M_d(C) (x) M_N(C), whose rows and columns are indexed by (p, i) -> p*N + i, with the
    block expectation E_B = id (x) tr_N onto B = M_d(C) (x) 1 and the normalized trace tau of M_dN(C).
    """

    def __init__(self, matrix, dim, multiplicity=None):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] % dim != 0:
            raise DimensionMismatch("A model of dimension %d needs a square matrix of size divisible by %d."
                                    % (dim, dim))
        if multiplicity is None:
            multiplicity = matrix.shape[0] // dim
        if dim * multiplicity != matrix.shape[0]:
            raise DimensionMismatch("The matrix size %d differs from d*N = %d." % (matrix.shape[0], dim * multiplicity))
        if not is_self_adjoint(matrix):
            raise ValueError("The matrix of a realized model must be self-adjoint.")
        # We remove the rounding noise of the anti-self-adjoint part:
        matrix = (matrix + matrix.conj().T) / 2.
        self.matrix = _frozen(matrix)
        self.dim = int(dim)
        self.multiplicity = int(multiplicity)
        self.bound = op_norm(matrix)

    def embed(self, b):
        """Returns b (x) I_N."""
        return np.kron(as_belement(b, dim=self.dim), np.eye(self.multiplicity))

    def expectation(self, x):
        """Returns E_B(x) = (id (x) tr_N)(x), a d x d matrix."""
        d, n = self.dim, self.multiplicity
        x = np.asarray(x, dtype=complex).reshape(d, n, d, n)
        return np.einsum('piqi->pq', x) / n

    def trace(self, x):
        """Returns the normalized trace of x."""
        x = np.asarray(x, dtype=complex)
        return np.trace(x) / x.shape[0]

    def to_json(self):
        return {"dim": self.dim, "multiplicity": self.multiplicity, "matrix": matrix_to_json(self.matrix)}

    @classmethod
    def from_json(cls, document):
        matrix = matrix_from_json(document["matrix"])
        return cls(matrix, int(document["dim"]), int(document["multiplicity"]))

    def __repr__(self):
        return "RealizedModel(dim=%d, multiplicity=%d, norm=%.6g)" % (self.dim, self.multiplicity, self.bound)


def random_realized_model(dim, multiplicity, seed=None, scale=1.):
    """
    Draws a GUE-type self-adjoint element of M_d(C) (x) M_N(C), rescaled so that its operator norm equals 'scale'.
    :param dim: the size d of B
    :param multiplicity: the size N of the ambient matrix algebra
    :param seed: the seed of the random generator (default: random_seed in parameters.py)
    :param scale: the operator norm of the model, which is also its exponential bound M
    :return: a RealizedModel
    """
    rng = np.random.default_rng(param.random_seed if seed is None else seed)
    matrix = random_self_adjoint(dim * multiplicity, rng, norm=scale)
    return RealizedModel(matrix, dim, multiplicity)


def check_expectation_properties(model, seed=None, n_samples=5, tol=None):
    """
    This function checks numerically the properties of the block expectation E_B of a realized model:
    unit preservation, contraction, B-bimodularity, compatibility with the trace, i.e. tau(E_B(x) y) = tau(x E_B(y)),
    trace preservation and complete positivity (through the Choi matrix of E_B).
    :param model: a RealizedModel
    :param seed: the seed used to draw the random test elements
    :param n_samples: the number of random samples per property
    :param tol: the tolerance (default: identity_tolerance in parameters.py)
    :return: a dictionary with the worst defect of each property and a global 'passed' flag
    """
    if tol is None:
        tol = param.identity_tolerance
    rng = np.random.default_rng(param.random_seed if seed is None else seed)
    d, n = model.dim, model.multiplicity
    size = d * n

    def random_matrix(k):
        return rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))

    report = {}
    report["unit"] = op_norm(model.expectation(np.eye(size)) - np.eye(d))

    contraction, bimodularity, trace_compatibility, trace_preservation = 0., 0., 0., 0.
    for sample in range(n_samples):
        x, y = random_matrix(size), random_matrix(size)
        b, c = random_matrix(d), random_matrix(d)
        e_x = model.expectation(x)
        contraction = max(contraction, op_norm(e_x) - op_norm(x))
        bimodularity = max(bimodularity,
                           op_norm(model.expectation(model.embed(b) @ x @ model.embed(c)) - b @ e_x @ c))
        left = model.trace(np.kron(e_x, np.eye(n)) @ y)
        right = model.trace(x @ np.kron(model.expectation(y), np.eye(n)))
        trace_compatibility = max(trace_compatibility, abs(left - right))
        trace_preservation = max(trace_preservation, abs(np.trace(e_x) / d - model.trace(x)))
    report["contraction"] = max(contraction, 0.)
    report["bimodularity"] = bimodularity
    report["trace_compatibility"] = trace_compatibility
    report["trace_preservation"] = trace_preservation

    # Choi matrix of E_B: the block (P, Q) is E_B(E_PQ) for the matrix units E_PQ of M_dN(C):
    choi = np.zeros((size * d, size * d), dtype=complex)
    for row in range(size):
        for col in range(size):
            unit = np.zeros((size, size), dtype=complex)
            unit[row, col] = 1.
            choi[row * d:(row + 1) * d, col * d:(col + 1) * d] = model.expectation(unit)
    report["choi_min_eigenvalue"] = float(hermitian_eigenvalues(choi)[0])

    report["passed"] = bool(report["unit"] <= tol and report["contraction"] <= tol and report["bimodularity"] <= tol
                            and report["trace_compatibility"] <= tol and report["trace_preservation"] <= tol
                            and report["choi_min_eigenvalue"] >= -tol)
    return report


def moments_from_realized(model, order=None):
    """
    This function computes the moments m_n(b_1, ..., b_(n-1)) = E_B(a (b_1 (x) I_N) a ... (b_(n-1) (x) I_N) a) of a
    realized model on every tuple of matrix units. The words W = a (E_1 (x) I) a ... a are built for all basis tuples
    at once: appending (E_pq (x) I) a to W amounts to W[x, (p, i)] a[(q, i), y] summed over i.
    :param model: a RealizedModel
    :param order: the truncation order (default: N_max in parameters.py)
    :return: the TruncatedMoments of the model, with bound M = ||a||
    """
    if order is None:
        order = param.N_max
    d, n_mult = model.dim, model.multiplicity
    d2, size = d * d, d * n_mult
    check_tensor_size(d, order)

    a = np.asarray(model.matrix)
    a_rows = a.reshape(d, n_mult, size)
    words = a.reshape(1, size, size)
    tensors = []
    for n in range(1, order + 1):
        n_tuples = words.shape[0]
        expectations = np.einsum('spiqi->spq', words.reshape(n_tuples, d, n_mult, d, n_mult)) / n_mult
        tensors.append(expectations.reshape((d2,) * n))
        if n < order:
            extended = np.einsum('sxpi,qiy->spqxy', words.reshape(n_tuples, size, d, n_mult), a_rows)
            words = extended.reshape(n_tuples * d2, size, size)

    return TruncatedMoments(d, tensors, bound=model.bound)


########################################################################################################################
# CONSTRUCTORS
########################################################################################################################

def point_mass(b, order=None):
    """
    Returns the cumulants of the point mass delta_b: kappa_1 = b and kappa_n = 0 for n >= 2.
    :param b: a self-adjoint d x d matrix
    :param order: the truncation order (default: N_max in parameters.py)
    :return: a CumulantSequence with bound M = ||b||
    """
    if order is None:
        order = param.N_max
    b = as_belement(b)
    if not is_self_adjoint(b):
        raise ValueError("A point mass needs a self-adjoint element.")
    d = b.shape[0]
    check_tensor_size(d, order)
    tensors = [b.reshape(-1)] + [np.zeros((d * d,) * n, dtype=complex) for n in range(2, order + 1)]
    return CumulantSequence(d, tensors, bound=op_norm(b), infinitely_divisible=True)


def kraus_map(operators):
    """
    Returns the d^2 x d^2 matrix, acting on row-major vectorized matrices, of the completely positive map
    b -> sum_K K b K*.
    """
    operators = [np.asarray(K, dtype=complex) for K in operators]
    if len(operators) == 0:
        raise ValueError("At least one Kraus operator is needed.")
    d = operators[0].shape[0]
    eta = np.zeros((d * d, d * d), dtype=complex)
    for K in operators:
        if K.shape != (d, d):
            raise DimensionMismatch("All Kraus operators must be %dx%d matrices." % (d, d))
        eta += np.kron(K, K.conj())
    return eta


def map_matrix(eta, dim=None):
    """
    Returns the d^2 x d^2 matrix of a linear map on M_d(C), given either as such a matrix or as a function.
    """
    if callable(eta):
        if dim is None:
            raise ValueError("The dimension must be given when the map is a function.")
        columns = []
        for p in range(dim):
            for q in range(dim):
                unit = np.zeros((dim, dim), dtype=complex)
                unit[p, q] = 1.
                columns.append(np.asarray(eta(unit), dtype=complex).reshape(-1))
        return np.stack(columns, axis=1)
    matrix = np.array(eta, dtype=complex)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    side = int(round(np.sqrt(matrix.shape[0])))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or side * side != matrix.shape[0]:
        raise DimensionMismatch("A linear map on M_d(C) is a d^2 x d^2 matrix, got shape %s." % (matrix.shape,))
    if dim is not None and side != dim:
        raise DimensionMismatch("Expected a map on M_%d(C), got one on M_%d(C)." % (dim, side))
    return matrix


def choi_matrix(eta):
    """Returns the Choi matrix sum_pq E_pq (x) eta(E_pq) of a map given by its d^2 x d^2 matrix."""
    eta = map_matrix(eta)
    d = int(round(np.sqrt(eta.shape[0])))
    # eta[i*d+j, p*d+q] is the entry (i, j) of eta(E_pq), which sits at the place ((p, i), (q, j)):
    return eta.reshape(d, d, d, d).transpose(2, 0, 3, 1).reshape(d * d, d * d)


def is_completely_positive(eta, tol=None):
    """Returns True if the Choi matrix of eta is positive semidefinite (up to tol times its norm)."""
    if tol is None:
        tol = param.positivity_tol
    choi = choi_matrix(eta)
    choi = (choi + choi.conj().T) / 2.
    return bool(hermitian_eigenvalues(choi)[0] >= -tol * max(1., op_norm(choi)))


def semicircular(eta, dim=None, order=None):
    """
    Returns the cumulants of the B-valued semicircular law of variance eta: kappa_2 = eta and all other cumulants zero.
    :param eta: the completely positive map B -> B, as a d^2 x d^2 matrix acting on row-major vectorized matrices or
    as a function of a d x d matrix
    :param dim: the size d (only needed when eta is a function)
    :param order: the truncation order (default: N_max in parameters.py)
    :return: a CumulantSequence with bound M = 2 ||eta(1)||^(1/2)
    """
    if order is None:
        order = param.N_max
    eta = map_matrix(eta, dim)
    d = int(round(np.sqrt(eta.shape[0])))
    if not is_completely_positive(eta):
        raise ValueError("The variance of a semicircular law must be a completely positive map.")
    check_tensor_size(d, max(order, 2))
    d2 = d * d
    tensors = [np.zeros(d2, dtype=complex)]
    if order >= 2:
        # The slot axis takes E_e and the output axis reads eta(E_e):
        tensors.append(eta.T.copy())
        tensors += [np.zeros((d2,) * n, dtype=complex) for n in range(3, order + 1)]
    eta_of_unit = (eta @ np.eye(d).reshape(-1)).reshape(d, d)
    return CumulantSequence(d, tensors, bound=2. * np.sqrt(op_norm(eta_of_unit)), infinitely_divisible=True)


########################################################################################################################
# MOMENT-CUMULANT RELATION
########################################################################################################################

def _first_block_sum(n, kappa_tensors, moment_tensors, dim, include_full):
    """
    This function sums kappa_p over the non-crossing partitions p of {1, ..., n}, grouped by the block V containing 1.
    If V = {1 = j_1 < ... < j_s}, the letters strictly between j_r and j_(r+1) form an arbitrary non-crossing partition
    of the gap, so that their sum is a lower moment: the r-th argument of kappa_s is b_(j_r) when the gap is empty, and
    b_(j_r) m_g(...) b_(j_(r+1)-1) for a gap of g letters. The letters after j_s give the right factor
    b_(j_s) m_(n-j_s)(...).
    Only kappa_s with s < n is used when include_full is False (the one-block partition is skipped).
    """
    d2 = dim * dim
    slot_identity = np.eye(d2, dtype=complex)
    wrapped = {}
    total = np.zeros((d2,) * n, dtype=complex)

    for size in range(0, n):
        for others in itertools.combinations(range(2, n + 1), size):
            block = (1,) + others
            s = len(block)
            if s == n and not include_full:
                continue
            term = kappa_tensors[s - 1]
            # We replace the arguments from the last slot to the first one, so that slot numbers stay valid:
            for r in reversed(range(s - 1)):
                gap = block[r + 1] - block[r] - 1
                if gap == 0:
                    argument = slot_identity
                else:
                    if gap not in wrapped:
                        wrapped[gap] = _multiply(_multiply(slot_identity, moment_tensors[gap - 1], dim),
                                                 slot_identity, dim)
                    argument = wrapped[gap]
                term = _substitute(term, r, argument)
            if block[-1] < n:
                tail = _multiply(slot_identity, moment_tensors[n - block[-1] - 1], dim)
                term = _multiply(term, tail, dim)
            total += term
    return total


def moments_from_cumulants(kappa):
    """
    This function computes the moments m_n = sum over NC(n) of kappa_p, for n = 1, ..., N, order after order.
    :param kappa: a CumulantSequence
    :return: the TruncatedMoments; the bound is the largest of kappa's bound and of the bound read on matrix units
    """
    moment_tensors = []
    for n in range(1, kappa.order + 1):
        moment_tensors.append(_first_block_sum(n, kappa.tensors, moment_tensors, kappa.dim, include_full=True))
    moments = TruncatedMoments(kappa.dim, moment_tensors)
    return TruncatedMoments(kappa.dim, moments.tensors, bound=max(kappa.bound, moments.bound))


def cumulants_from_moments(mu):
    """
    This function inverts the moment-cumulant relation, which is unitriangular: kappa_n = m_n - sum over the partitions
    p != 1_n of kappa_p, where only cumulants of order < n appear.
    :param mu: a TruncatedMoments
    :return: the CumulantSequence, with the same bound as mu
    """
    cumulant_tensors = []
    for n in range(1, mu.order + 1):
        lower = _first_block_sum(n, cumulant_tensors + [None], mu.tensors, mu.dim, include_full=False)
        cumulant_tensors.append(np.asarray(mu.tensors[n - 1]) - lower)
    return CumulantSequence(mu.dim, cumulant_tensors, bound=mu.bound)


########################################################################################################################
# CONVOLUTIONS
########################################################################################################################

def free_convolve(mu, nu):
    """
    Returns the free additive convolution of two distributions, whose cumulants are the sums of the cumulants.
    :param mu: a CumulantSequence
    :param nu: a CumulantSequence of the same dimension and order
    :return: the CumulantSequence of mu [+] nu, with bound M_mu + M_nu
    """
    if mu.dim != nu.dim or mu.order != nu.order:
        raise DimensionMismatch("Cannot convolve distributions of dimensions/orders (%d, %d) and (%d, %d)."
                                % (mu.dim, mu.order, nu.dim, nu.order))
    tensors = [first + second for first, second in zip(mu.tensors, nu.tensors)]
    return CumulantSequence(mu.dim, tensors, bound=mu.bound + nu.bound,
                            infinitely_divisible=mu.infinitely_divisible and nu.infinitely_divisible,
                            certified=mu.certified and nu.certified)


def convolution_power(mu, t, printing_warnings=False):
    """
    This function returns the formal convolution power mu^[+]t, obtained by multiplying all cumulants by t.
    For t < 1 the result is a distribution only when mu is infinitely divisible: otherwise the result is flagged as not
    certified.
    The bound of the result depends on what is known of mu. When mu is infinitely divisible (a semicircular law
    convolved with a point mass), ||t b_0|| + 2 ||t eta||^(1/2) <= M max(t, t^(1/2)). When t is a positive integer,
    mu^[+]t is the law of a sum of t free copies, bounded by t M. Otherwise only the cumulant bound
    ||t kappa_n|| <= t M (4M)^(n-1) is used: summing it over the noncrossing partitions with k blocks gives
    ||m_n|| <= M^n sum_k N(n, k) t^k 4^(n-k) <= ((2 + t^(1/2))^2 M)^n, the Narayana sum being a free Poisson moment.
    :param mu: a CumulantSequence
    :param t: a positive real
    :param printing_warnings: if True, a warning is printed when the result is not certified
    :return: the CumulantSequence of mu^[+]t
    """
    if not t > 0.:
        raise ValueError("The convolution power must be positive, got %s." % t)
    certified = mu.certified
    if t < 1. and not mu.infinitely_divisible:
        certified = False
        if printing_warnings:
            print("WARNING: the convolution power of order %.4g of a distribution that is not known to be infinitely "
                  "divisible may not be a distribution!" % t)
    if mu.infinitely_divisible:
        bound = mu.bound * max(t, np.sqrt(t))
    elif float(t).is_integer():
        bound = mu.bound * t
    else:
        bound = mu.bound * (2. + np.sqrt(t)) ** 2
    tensors = [t * tensor for tensor in mu.tensors]
    return CumulantSequence(mu.dim, tensors, bound=bound, infinitely_divisible=mu.infinitely_divisible,
                            certified=certified)


def center(mu):
    """
    Returns the pair (mu [+] delta_(-kappa_1), kappa_1): the centered distribution and the removed shift.
    """
    shift = np.array(mu.first())
    tensors = [np.zeros_like(mu.tensors[0])] + list(mu.tensors[1:])
    centered = CumulantSequence(mu.dim, tensors, bound=mu.bound + op_norm(shift),
                                infinitely_divisible=mu.infinitely_divisible, certified=mu.certified)
    return centered, _frozen(shift)


########################################################################################################################
# BOUND CHECKS
########################################################################################################################

def _random_unit_arguments(rng, dim, count):
    arguments = []
    for i in range(count):
        b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        arguments.append(b / op_norm(b))
    return arguments


def exp_bound_check(mu, M=None, seed=None, n_random=None, tol=1e-9):
    """
    This function checks the exponential bound ||m_n(b_1, ..., b_(n-1))|| <= M^n ||b_1|| ... ||b_(n-1)|| on every tuple
    of matrix units and on random tuples of unit-norm arguments.
    :param mu: a TruncatedMoments
    :param M: the bound to be checked (default: mu.bound)
    :param seed: the seed of the random arguments
    :param n_random: the number of random tuples per order (default: n_random_bound_samples in parameters.py)
    :param tol: the absolute slack
    :return: a pair (passed, worst ratio ||m_n|| / M^n)
    """
    if M is None:
        M = mu.bound
    if n_random is None:
        n_random = param.n_random_bound_samples
    rng = np.random.default_rng(param.random_seed if seed is None else seed)

    passed, worst_ratio = True, 0.
    for n in range(1, mu.order + 1):
        norms = list(mu.basis_norms(n))
        for sample in range(n_random if n > 1 else 0):
            norms.append(op_norm(mu.evaluate(n, _random_unit_arguments(rng, mu.dim, n - 1))))
        largest = max(norms)
        limit = M ** n
        if largest > limit + tol:
            passed = False
        if limit > 0.:
            worst_ratio = max(worst_ratio, largest / limit)
        elif largest > tol:
            worst_ratio = np.inf
    return passed, worst_ratio


def cumulant_bound_check(kappa, M=None, tol=1e-9):
    """
    This function checks the cumulant bound ||kappa_n(b_1, ..., b_(n-1))|| <= M (4M)^n ||b_1|| ... ||b_(n-1)|| on every
    tuple of matrix units.
    :param kappa: a CumulantSequence
    :param M: the exponential bound of the distribution (default: kappa.bound)
    :param tol: the absolute slack
    :return: a pair (passed, worst ratio ||kappa_n|| / (M (4M)^n))
    """
    if M is None:
        M = kappa.bound
    passed, worst_ratio = True, 0.
    for n in range(1, kappa.order + 1):
        largest = kappa.max_basis_norm(n)
        limit = M * (4. * M) ** n
        if largest > limit + tol:
            passed = False
        if limit > 0.:
            worst_ratio = max(worst_ratio, largest / limit)
        elif largest > tol:
            worst_ratio = np.inf
    return passed, worst_ratio


########################################################################################################################
# SERIALIZATION
########################################################################################################################

def distribution_from_json(document):
    """Reads back a TruncatedMoments, a CumulantSequence or a RealizedModel from its JSON form."""
    if "moments" in document:
        return TruncatedMoments.from_json(document)
    if "cumulants" in document:
        return CumulantSequence.from_json(document)
    if "matrix" in document:
        return RealizedModel.from_json(document)
    raise ValueError("The document does not describe a distribution (no 'moments', 'cumulants' or 'matrix' field).")
