"""Quasi-free states: pair-partition (Wick) expansion and density-matrix oracle."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import car_rep
from .covariance import adapted_diagonalize, gamma_form
from .errors import ResourceError, ValidationError
from .numerics import kron_all

MAX_WICK_ARGS = 16


@dataclass(frozen=True)
class PairPartition:
    pairs: tuple
    sign: int


def permutation_sign(seq):
    inversions = sum(
        1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j]
    )
    return -1 if inversions % 2 else 1


def _matchings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for j, partner in enumerate(rest):
        for tail in _matchings(rest[:j] + rest[j + 1:]):
            yield ((first, partner),) + tail


@lru_cache(maxsize=None)
def pair_partitions(n):
    """All ``(2n-1)!!`` pair partitions of ``{0..2n-1}`` with their signs.

    The sign is that of the permutation ``(p_1..p_n, q_1..q_n)``.
    """
    out = []
    for pairs in _matchings(tuple(range(2 * n))):
        flat = [p for p, _ in pairs] + [q for _, q in pairs]
        out.append(PairPartition(pairs, permutation_sign(flat)))
    return tuple(out)


def two_point(cov, xi, eta):
    """``phi_S(b(xi) b(eta)) = (S eta, Gamma xi)``."""
    return gamma_form(cov, eta, xi)


def wick_from_table(table):
    """Signed pair-partition sum for a word whose pair values are ``table[i, j]`` (i < j)."""
    m = table.shape[0]
    if m % 2:
        return 0j
    if m > MAX_WICK_ARGS:
        raise ResourceError(f"{m} arguments exceed the Wick enumeration cap {MAX_WICK_ARGS}")
    n = m // 2
    if n == 0:
        return 1 + 0j
    total = 0j
    for part in pair_partitions(n):
        term = complex(part.sign)
        for p, q in part.pairs:
            term *= table[p, q]
        total += term
    prefactor = -1 if (n * (n - 1) // 2) % 2 else 1
    return prefactor * total


def two_point_table(cov, vectors):
    m = len(vectors)
    t = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(i + 1, m):
            t[i, j] = two_point(cov, vectors[i], vectors[j])
    return t


def wick_eval(cov, xis):
    """``phi_S(b(xi_1) ... b(xi_k))`` from the quasi-free pair-partition formula."""
    xis = [np.asarray(x, dtype=complex) for x in xis]
    for x in xis:
        if x.shape != (cov.k,):
            raise ValidationError(f"vector of shape {x.shape} does not match k = {cov.k}")
    if len(xis) > MAX_WICK_ARGS:
        raise ResourceError(f"{len(xis)} arguments exceed the Wick enumeration cap")
    if len(xis) % 2:
        return 0j
    return wick_from_table(two_point_table(cov, xis))


def density_matrix(basis=None, alphas=None, parity=None):
    """``(x)_i diag(a_i, 1 - a_i)``, tensored with ``diag(1/2, 1/2)`` for odd parity."""
    if basis is not None:
        alphas = basis.alphas if alphas is None else alphas
        parity = basis.parity
    factors = [np.diag([a, 1 - a]).astype(complex) for a in alphas]
    if parity == "odd":
        factors.append(0.5 * np.eye(2, dtype=complex))
    return kron_all(factors)


def majorana_vectors(rep, ref_basis):
    """Hilbert-space vectors of the Majorana generators, keyed by label."""
    return {j: ref_basis.vector(car_rep.majorana_vector(rep, j)) for j in rep.majorana_labels}


class MajoranaEvaluator:
    """Caches two-point values of all Majorana vectors for one ``(S, ref_basis)``."""

    def __init__(self, cov, ref_basis, rep=None):
        if ref_basis.gamma.k != cov.k:
            raise ValidationError("reference basis and operator live on different spaces")
        self.cov = cov
        self.rep = rep or car_rep.build_rep(ref_basis.n, ref_basis.parity)
        labels = self.rep.majorana_labels
        vecs = majorana_vectors(self.rep, ref_basis)
        self.pos = {j: i for i, j in enumerate(labels)}
        self.table = two_point_table(cov, [vecs[j] for j in labels])

    def monomial(self, index_set):
        idx = [self.pos[j] for j in index_set]
        return wick_from_table(self.table[np.ix_(idx, idx)])

    def all_monomials(self):
        return {idx: self.monomial(idx) for idx in car_rep.monomial_index_sets(self.rep)}


def _check_rep(rep, ref_basis):
    if rep.n != ref_basis.n or rep.parity != ref_basis.parity:
        raise ValidationError(
            f"element lives in rep (n={rep.n}, {rep.parity}) but reference basis is "
            f"(n={ref_basis.n}, {ref_basis.parity})"
        )


def evaluate(cov, ref_basis, a, basis=None):
    """``phi_S(A)`` by Majorana expansion of ``A`` and Wick evaluation of each monomial."""
    _check_rep(a.rep, ref_basis)
    coeffs = car_rep.expand(a, basis)
    ev = MajoranaEvaluator(cov, ref_basis, a.rep)
    total = 0j
    for idx in sorted(coeffs, key=lambda s: (len(s), s)):
        c = coeffs[idx]
        if c != 0:
            total += c * ev.monomial(idx)
    return total


def trace_value(ref_basis, a, alphas=None):
    """Density-matrix value ``Tr(rho A)`` for an operator diagonal in ``ref_basis``."""
    _check_rep(a.rep, ref_basis)
    return complex(np.trace(density_matrix(ref_basis, alphas) @ a.matrix))


class QuasiFreeState:
    def __init__(self, cov, ref_basis=None):
        self.cov = cov
        self._basis = ref_basis

    @property
    def basis(self):
        if self._basis is None:
            self._basis = adapted_diagonalize(self.cov)
        return self._basis

    def rep(self):
        return car_rep.build_rep(self.basis.n, self.basis.parity)

    def __call__(self, a):
        return evaluate(self.cov, self.basis, a)
