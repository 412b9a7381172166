#  -*- coding: utf-8 -*-

"""
    The script 'nc' enumerates the non-crossing partitions of {1, ..., n} and evaluates a partition against cumulant
    data, following the nested bracketing of the word X b_1 X b_2 ... b_(n-1) X: innermost interval blocks are
    contracted first and the resulting coefficient is spliced between its neighbours.

    Cumulants of order m act on the m-1 coefficients lying strictly between the m letters of a block.

    :copyright: see AUTHORS.
    :license: see LICENSE for details.
"""

import numpy as np

from . import parameters as param


class MissingCumulant(Exception):
    """Raised when a partition needs a cumulant order that the provider does not hold."""
    pass


# NON-CROSSING PARTITIONS:
##########################

class NCPartition(object):
    """
    A non-crossing partition of {1, ..., n}, stored as a tuple of sorted blocks of 1-based indices. Blocks are ordered
    by their smallest element.
    """

    def __init__(self, n, blocks, check=True):
        blocks = tuple(sorted((tuple(sorted(int(i) for i in block)) for block in blocks), key=lambda b: b[0]))
        if check:
            _check_set_partition(n, blocks)
            if not is_noncrossing(blocks):
                raise ValueError("The partition %s is crossing." % (blocks,))
        self.n = n
        self.blocks = blocks

    @classmethod
    def from_json(cls, document):
        """Reads a partition written as a list of lists of 1-based indices."""
        n = sum(len(block) for block in document)
        return cls(n, document)

    def to_json(self):
        return [list(block) for block in self.blocks]

    def block_sizes(self):
        return [len(block) for block in self.blocks]

    def is_full(self):
        """Returns True for the one-block partition 1_n."""
        return len(self.blocks) == 1

    def __len__(self):
        return len(self.blocks)

    def __eq__(self, other):
        return isinstance(other, NCPartition) and self.n == other.n and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.n, self.blocks))

    def __repr__(self):
        return "NCPartition(%d, %s)" % (self.n, self.to_json())


def _check_set_partition(n, blocks):
    elements = [i for block in blocks for i in block]
    if any(len(block) == 0 for block in blocks):
        raise ValueError("A partition cannot contain an empty block.")
    if sorted(elements) != list(range(1, n + 1)):
        raise ValueError("The blocks %s do not partition {1, ..., %d}." % (blocks, n))


def is_noncrossing(blocks):
    """
    This function checks that no two blocks cross, i.e. that there is no a < b < c < d with a, c in one block and b, d
    in another one. For each pair of blocks, we read the block labels of their merged elements in increasing order and
    collapse runs of equal labels: the pair crosses iff the collapsed word has at least four letters (ABAB or BABA).
    :param blocks: an iterable of disjoint blocks (iterables of integers)
    :return: True if the partition is non-crossing
    """
    blocks = [sorted(block) for block in blocks]
    elements = [i for block in blocks for i in block]
    if len(elements) != len(set(elements)):
        raise ValueError("The blocks must be disjoint.")

    for first in range(len(blocks)):
        for second in range(first + 1, len(blocks)):
            labels = sorted([(i, 0) for i in blocks[first]] + [(i, 1) for i in blocks[second]])
            collapsed = 1
            for position in range(1, len(labels)):
                if labels[position][1] != labels[position - 1][1]:
                    collapsed += 1
                    if collapsed >= 4:
                        return False
    return True


def enumerate_nc(n, max_order=None):
    """
    This function lists all non-crossing partitions of {1, ..., n}. The partitions are generated as restricted growth
    words (the block label of each element, blocks being numbered by order of appearance), in lexicographic order, and
    a word is extended only when the new element does not create a crossing.
    :param n: the number of points (1 <= n <= max_order)
    :param max_order: the largest accepted n (default: N_enumeration_limit in parameters.py)
    :return: the list of NCPartition of {1, ..., n}, in lexicographic order of their restricted growth words
    """
    if max_order is None:
        max_order = param.N_enumeration_limit
    if int(n) != n or n < 1 or n > max_order:
        raise ValueError("The number of points must be an integer between 1 and %d, got %s." % (max_order, n))
    n = int(n)

    partitions = []
    blocks = []

    def extend(element):
        if element > n:
            partitions.append(NCPartition(n, [list(block) for block in blocks], check=False))
            return
        # We try to add the element to each existing block, in the order of appearance of the blocks:
        for block in blocks:
            # The new element is the largest one so far, so it creates a crossing iff another block has elements on
            # both sides of some element of the block it joins:
            crossing = False
            for other in blocks:
                if other is block:
                    continue
                if any(other[0] < i < other[-1] for i in block):
                    crossing = True
                    break
            if not crossing:
                block.append(element)
                extend(element + 1)
                block.pop()
        # Or we open a new block:
        blocks.append([element])
        extend(element + 1)
        blocks.pop()

    extend(1)
    return partitions


# CONTRACTION RULE:
###################

def _cumulant_value(kappa, order, args):
    available = getattr(kappa, "order", None)
    if available is not None and order > available:
        raise MissingCumulant("The partition needs a cumulant of order %d but only orders up to %d are available."
                              % (order, available))
    try:
        if hasattr(kappa, "evaluate"):
            return np.asarray(kappa.evaluate(order, args))
        return np.asarray(kappa(order, args))
    except (KeyError, IndexError):
        raise MissingCumulant("The cumulant of order %d could not be provided." % order)


def contract_evaluate(p, kappa, coeffs):
    """
    This function evaluates kappa_p(b_1, ..., b_(n-1)) for a non-crossing partition p.
    The word is written as B_0 X B_1 X ... X B_n with B_0 = B_n = I. We repeatedly look for an innermost block, i.e. a
    block whose letters are consecutive in the current word, at positions l, ..., l+m-1. It is replaced by the
    coefficient c = kappa_m(B_(l+1), ..., B_(l+m-1)) and the three coefficients B_l, c, B_(l+m) are merged into one
    product. When no letter remains, the single remaining coefficient is the result.
    :param p: a NCPartition of {1, ..., n}
    :param kappa: a cumulant provider, i.e. an object with a method evaluate(order, args) (such as CumulantSequence),
    or a function kappa(order, args), returning a d x d matrix
    :param coeffs: the n-1 coefficients b_1, ..., b_(n-1) (d x d matrices)
    :return: the d x d matrix kappa_p(b_1, ..., b_(n-1))
    """
    n = p.n
    if len(coeffs) != n - 1:
        raise ValueError("A partition of %d points needs %d coefficients, got %d." % (n, n - 1, len(coeffs)))

    dim = getattr(kappa, "dim", None)
    if dim is None:
        if len(coeffs) == 0:
            raise ValueError("The dimension cannot be inferred: the provider must have a 'dim' attribute.")
        dim = np.asarray(coeffs[0]).shape[0]

    identity = np.eye(dim, dtype=complex)
    current_coeffs = [identity] + [np.asarray(b, dtype=complex) for b in coeffs] + [identity]
    current_letters = list(range(1, n + 1))
    remaining_blocks = list(p.blocks)

    while remaining_blocks:
        position = {letter: index for index, letter in enumerate(current_letters)}
        for block_index, block in enumerate(remaining_blocks):
            first = position[block[0]]
            if position[block[-1]] - first == len(block) - 1:
                break
        else:
            raise ValueError("No interval block was found: the partition %s is crossing." % (p.blocks,))

        m = len(block)
        c = _cumulant_value(kappa, m, current_coeffs[first + 1:first + m])
        merged = current_coeffs[first] @ c @ current_coeffs[first + m]
        current_coeffs = current_coeffs[:first] + [merged] + current_coeffs[first + m + 1:]
        current_letters = current_letters[:first] + current_letters[first + m:]
        del remaining_blocks[block_index]

    return current_coeffs[0]


def moment_by_partition_sum(kappa, coeffs, n=None):
    """
    Straight-line evaluation of the moment m_n(b_1, ..., b_(n-1)) as the sum of contract_evaluate over NC(n).
    :param kappa: a cumulant provider
    :param coeffs: the n-1 coefficients
    :param n: the number of letters (default: len(coeffs) + 1)
    :return: the d x d moment value
    """
    if n is None:
        n = len(coeffs) + 1
    total = None
    for p in enumerate_nc(n):
        value = contract_evaluate(p, kappa, coeffs)
        total = value if total is None else total + value
    return total
