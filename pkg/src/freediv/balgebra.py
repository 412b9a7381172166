#  -*- coding: utf-8 -*-

"""
    The script 'balgebra' contains the arithmetic of the coefficient algebra B = M_d(C): adjoints, real and imaginary
    parts, membership in the noncommutative upper half-plane, guarded inversion, operator norms and the matricial
    amplification M_k(B) used to evaluate transforms at higher levels.

    Elements of B are represented by square complex numpy arrays. Every function below returns a new, read-only array
    and never modifies its arguments.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np
from scipy import linalg

from . import parameters as param


# EXCEPTIONS:
#############

class NumericalFailure(Exception):
    """Base class of the numerical failures raised by freediv (mapped to exit code 3 by the command line)."""
    pass


class Singular(NumericalFailure):
    """Raised when a matrix that must be inverted is singular or too badly conditioned."""
    pass


class DimensionMismatch(ValueError):
    """Raised when matrices or distributions of incompatible sizes are combined."""
    pass


# BASIC CONSTRUCTIONS:
######################

def _frozen(x):
    # All returned matrices are read-only values:
    x.flags.writeable = False
    return x


def as_belement(x, dim=None):
    """
    This function checks that x is a square matrix (of size dim, if dim is given) and returns a read-only complex copy.
    :param x: an array-like square matrix, or a scalar (then regarded as a 1x1 matrix)
    :param dim: the expected size d of the matrix
    :return: a read-only complex numpy array of shape (d, d)
    """
    array = np.array(x, dtype=complex)
    if array.ndim == 0:
        array = array.reshape(1, 1)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionMismatch("A B-element must be a square matrix, got an array of shape %s." % (array.shape,))
    if dim is not None and array.shape[0] != dim:
        raise DimensionMismatch("Expected a %dx%d matrix, got a %dx%d one." % (dim, dim, array.shape[0], array.shape[1]))
    return _frozen(array)


def identity(dim):
    """Returns the unit of M_d(C)."""
    return _frozen(np.eye(dim, dtype=complex))


def zero(dim):
    """Returns the zero element of M_d(C)."""
    return _frozen(np.zeros((dim, dim), dtype=complex))


def matrix_unit(dim, p, q):
    """Returns the matrix unit E_pq of M_d(C) (0-based indices)."""
    e = np.zeros((dim, dim), dtype=complex)
    e[p, q] = 1.
    return _frozen(e)


def matrix_units(dim):
    """Returns the list of the d^2 matrix units, in the row-major order E_00, E_01, ..., E_(d-1)(d-1)."""
    return [matrix_unit(dim, p, q) for p in range(dim) for q in range(dim)]


def hermitian_basis(dim):
    """
    This function returns a basis of the real vector space of self-adjoint d x d matrices, built from matrix units:
    the diagonal units E_pp, and for p < q the elements E_pq + E_qp and i(E_qp - E_pq). Every element has norm 1.
    :param dim: the size d of the matrices
    :return: a list of d^2 read-only self-adjoint matrices
    """
    basis = []
    for p in range(dim):
        basis.append(matrix_unit(dim, p, p))
    for p in range(dim):
        for q in range(p + 1, dim):
            symmetric = np.zeros((dim, dim), dtype=complex)
            symmetric[p, q] = 1.
            symmetric[q, p] = 1.
            antisymmetric = np.zeros((dim, dim), dtype=complex)
            antisymmetric[p, q] = -1j
            antisymmetric[q, p] = 1j
            basis.append(_frozen(symmetric))
            basis.append(_frozen(antisymmetric))
    return basis


def random_self_adjoint(dim, rng, norm=1.):
    """
    Draws a random self-adjoint matrix (GUE-like entries) rescaled to a given operator norm.
    :param dim: the size d of the matrix
    :param rng: a numpy random Generator
    :param norm: the operator norm of the returned matrix
    :return: a read-only self-adjoint matrix
    """
    h = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (h + h.conj().T) / 2.
    current_norm = op_norm(h)
    if current_norm > 0.:
        h = h * (norm / current_norm)
    return _frozen(h)


# ALGEBRAIC OPERATIONS:
#######################

def adjoint(x):
    """Returns the adjoint x* of a matrix."""
    return _frozen(np.array(x, dtype=complex).conj().T)


def real_part(x):
    """Returns the self-adjoint matrix (x + x*)/2."""
    x = np.asarray(x, dtype=complex)
    return _frozen((x + x.conj().T) / 2.)


def imag_part(x):
    """
    Returns the self-adjoint matrix Im x = (x - x*)/(2i), so that x = Re x + i Im x.
    :param x: a square matrix
    :return: the imaginary part of x
    """
    x = np.asarray(x, dtype=complex)
    return _frozen((x - x.conj().T) / 2j)


def is_self_adjoint(x, tol=None):
    """Returns True if ||x - x*|| is at most tol (default: identity_tolerance times max(1, ||x||))."""
    x = np.asarray(x, dtype=complex)
    if tol is None:
        tol = param.identity_tolerance * max(1., op_norm(x))
    return op_norm(x - x.conj().T) <= tol


def hermitian_eigenvalues(h):
    """Returns the eigenvalues, in increasing order, of the self-adjoint part of h."""
    h = np.asarray(h, dtype=complex)
    return linalg.eigvalsh((h + h.conj().T) / 2.)


def in_upper_half_plane(x, eps):
    """
    This function tests the membership of x in the noncommutative upper half-plane with margin eps, i.e. whether the
    smallest eigenvalue of Im x is at least eps.
    :param x: a square matrix (an element of B or of M_k(B))
    :param eps: the required margin (positive real)
    :return: True if Im x >= eps I
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch("Only square matrices can belong to the upper half-plane.")
    return bool(hermitian_eigenvalues(imag_part(x))[0] >= eps)


def imaginary_margin(x):
    """Returns the smallest eigenvalue of Im x (positive iff x lies in the upper half-plane)."""
    return float(hermitian_eigenvalues(imag_part(x))[0])


def op_norm(x):
    """
    Returns the operator norm (largest singular value) of a matrix.
    :param x: a matrix
    :return: a nonnegative real
    """
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.
    return float(linalg.svdvals(x)[0])


def invert(x, singular_tolerance=None, condition_number_cap=None):
    """
    This function inverts a square matrix, after checking that its smallest singular value is not negligible with
    respect to its norm.
    :param x: a square matrix
    :param singular_tolerance: relative threshold on the smallest singular value (default in parameters.py)
    :param condition_number_cap: largest accepted condition number (default in parameters.py)
    :return: the inverse of x
    """
    if singular_tolerance is None:
        singular_tolerance = param.singular_tolerance
    if condition_number_cap is None:
        condition_number_cap = param.condition_number_cap

    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionMismatch("Only square matrices can be inverted.")
    singular_values = linalg.svdvals(x)
    s_max, s_min = singular_values[0], singular_values[-1]
    if s_max == 0. or s_min < singular_tolerance * s_max:
        raise Singular("The matrix is singular (smallest singular value %.3e, norm %.3e)." % (s_min, s_max))
    if s_max / s_min > condition_number_cap:
        raise Singular("The condition number %.3e exceeds the cap %.3e." % (s_max / s_min, condition_number_cap))
    return _frozen(linalg.inv(x))


# MATRICIAL AMPLIFICATION:
##########################

def amplify(b_blocks):
    """
    This function assembles a k x k array of d x d matrices into one element of M_k(B), i.e. a (kd) x (kd) matrix whose
    block (i, j) is b_blocks[i][j].
    :param b_blocks: a k x k nested list (or array of shape (k, k, d, d)) of B-elements
    :return: the (kd) x (kd) block matrix
    """
    blocks = np.array(b_blocks, dtype=complex)
    if blocks.ndim != 4 or blocks.shape[0] != blocks.shape[1] or blocks.shape[2] != blocks.shape[3]:
        raise DimensionMismatch("Blocks must form a k x k array of square matrices of the same size, got shape %s."
                                % (blocks.shape,))
    k, d = blocks.shape[0], blocks.shape[2]
    return _frozen(blocks.transpose(0, 2, 1, 3).reshape(k * d, k * d))


def diagonal_amplification(x, k):
    """Returns the element of M_k(B) with x on every diagonal block and 0 elsewhere (i.e. I_k (x) x)."""
    x = as_belement(x)
    return _frozen(np.kron(np.eye(k), x))


def blocks_of(x, dim):
    """Splits an element of M_k(B) into its array of blocks, of shape (k, k, d, d)."""
    x = np.asarray(x, dtype=complex)
    k = x.shape[0] // dim
    if k * dim != x.shape[0]:
        raise DimensionMismatch("A %dx%d matrix is not an element of M_k(M_%d)." % (x.shape[0], x.shape[1], dim))
    return x.reshape(k, dim, k, dim).transpose(0, 2, 1, 3)


# PROBE POINTS:
###############

class ProbePoint(object):
    """
    A point of the noncommutative upper half-plane M_k^+(B): a (kd) x (kd) matrix whose imaginary part is bounded
    below by margin * I.
    """

    def __init__(self, value, level=1, margin=None):
        value = np.array(value, dtype=complex)
        if value.ndim == 0:
            value = value.reshape(1, 1)
        if value.ndim != 2 or value.shape[0] != value.shape[1] or value.shape[0] % level != 0:
            raise DimensionMismatch("A probe of level %d must be a square matrix of size divisible by %d."
                                    % (level, level))
        actual_margin = imaginary_margin(value)
        if margin is None:
            margin = actual_margin
        if margin <= 0. or actual_margin < margin * (1. - 1e-12):
            raise ValueError("The probe is not in the upper half-plane with margin %.3e (smallest eigenvalue of its "
                             "imaginary part: %.3e)." % (margin, actual_margin))
        self.value = _frozen(value)
        self.level = level
        self.margin = float(margin)
        self.dim = value.shape[0] // level

    @classmethod
    def from_belement(cls, b, level=1):
        """Builds a probe of level k from b in B, as the diagonal amplification I_k (x) b."""
        return cls(diagonal_amplification(b, level), level=level)

    def inverse_norm(self):
        """Returns ||b^-1||."""
        return op_norm(invert(self.value))

    def __repr__(self):
        return "ProbePoint(level=%d, dim=%d, margin=%.4g)" % (self.level, self.dim, self.margin)


# SERIALIZATION:
################

def matrix_to_json(x):
    """Returns the JSON form {"dim": d, "entries": [[[re, im], ...], ...]} (row-major) of a square matrix."""
    x = np.asarray(x, dtype=complex)
    return {"dim": int(x.shape[0]),
            "entries": np.stack([x.real, x.imag], axis=-1).tolist()}


def matrix_from_json(document):
    """Reads back a matrix written by 'matrix_to_json'."""
    entries = np.array(document["entries"], dtype=float)
    x = entries[..., 0] + 1j * entries[..., 1]
    return as_belement(x, dim=int(document["dim"]))
