"""Jordan-Wigner matrix representation of a finite self-dual CAR algebra.

A representation is fixed by the number ``n`` of paired modes and the parity
of the underlying Hilbert space dimension ``k`` (``k = 2n`` or ``2n + 1``).
Vectors of the Hilbert space are given by coordinates in a Gamma-adapted
basis ``{eps_1..eps_n, Gamma eps_1..Gamma eps_n [, eps_0]}``, laid out as one
array ``[x_1..x_n, y_1..y_n (, x_0)]``.

Majorana labels: ``0`` is the zero-mode Majorana ``sqrt(2) b(eps_0)`` (odd
parity only), ``2i-1`` and ``2i`` are ``b(eps_i) + b(eps_i)^*`` and
``i (b(eps_i) - b(eps_i)^*)``.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ResourceError, ValidationError
from .numerics import adjoint, kron_all, max_abs

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
LOWER = np.array([[0, 0], [1, 0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

MAX_REP_DIM = 2 ** 13
MAX_BASIS_ENTRIES = 2 ** 22
MEMBERSHIP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class JordanWignerRep:
    n: int
    parity: str
    generators: tuple
    zero_mode: np.ndarray = None
    rep_dim: int = 1
    majoranas: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        """Dimension ``k`` of the underlying Hilbert space."""
        return 2 * self.n + (1 if self.parity == "odd" else 0)

    @property
    def majorana_labels(self):
        start = 0 if self.parity == "odd" else 1
        return list(range(start, 2 * self.n + 1))

    @property
    def parity_marker(self):
        """``I^{(x)n} (x) diag(1, -1)``; odd-parity elements commute with it."""
        if self.parity != "odd":
            return None
        return kron_all([ID2] * self.n + [SIGMA_Z])


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    rep: JordanWignerRep
    matrix: np.ndarray

    def __add__(self, other):
        _same_rep(self, other)
        return AlgebraElement(self.rep, self.matrix + other.matrix)

    def __sub__(self, other):
        _same_rep(self, other)
        return AlgebraElement(self.rep, self.matrix - other.matrix)

    def __matmul__(self, other):
        _same_rep(self, other)
        return AlgebraElement(self.rep, self.matrix @ other.matrix)

    def scale(self, c):
        return AlgebraElement(self.rep, c * self.matrix)

    def adjoint(self):
        return AlgebraElement(self.rep, adjoint(self.matrix))


def _same_rep(a, b):
    if a.rep is not b.rep:
        raise ValidationError("algebra elements belong to different representations")


@dataclass(frozen=True, eq=False)
class MajoranaMonomial:
    index_set: tuple
    matrix: np.ndarray
    vectors: tuple  # adapted coordinates of each factor's Gamma-fixed vector


def build_rep(n, parity="even", max_rep_dim=MAX_REP_DIM):
    if parity not in ("even", "odd"):
        raise ValidationError(f"parity must be 'even' or 'odd', got {parity!r}")
    n = int(n)
    if n < (1 if parity == "even" else 0):
        raise ValidationError(f"n = {n} too small for parity {parity}")
    rep_dim = 2 ** n * (2 if parity == "odd" else 1)
    if rep_dim > max_rep_dim:
        raise ResourceError(f"rep_dim {rep_dim} exceeds cap {max_rep_dim}")
    tail = [ID2] if parity == "odd" else []
    gens = []
    for i in range(n):
        factors = [SIGMA_Z] * i + [LOWER] + [ID2] * (n - i - 1) + tail
        gens.append(kron_all(factors))
    zero = None
    if parity == "odd":
        zero = kron_all([SIGMA_Z] * n + [SIGMA_Z]) / np.sqrt(2)
    majoranas = {}
    if zero is not None:
        majoranas[0] = np.sqrt(2) * zero
    for i, g in enumerate(gens, start=1):
        majoranas[2 * i - 1] = g + adjoint(g)
        majoranas[2 * i] = 1j * (g - adjoint(g))
    return JordanWignerRep(n, parity, tuple(gens), zero, rep_dim, majoranas)


def _coords_len(rep):
    return 2 * rep.n + (1 if rep.parity == "odd" else 0)


def split_coords(rep, coords):
    coords = np.asarray(coords, dtype=complex).reshape(-1)
    if coords.size != _coords_len(rep):
        raise ValidationError(
            f"expected {_coords_len(rep)} coordinates, got {coords.size}"
        )
    n = rep.n
    x0 = coords[2 * n] if rep.parity == "odd" else None
    return coords[:n], coords[n:2 * n], x0


def join_coords(rep, x, y, x0=None):
    parts = [np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)]
    if rep.parity == "odd":
        parts.append(np.array([x0], dtype=complex))
    return np.concatenate(parts)


def gamma_coords(rep, coords):
    """Coordinates of ``Gamma xi`` given those of ``xi``."""
    x, y, x0 = split_coords(rep, coords)
    return join_coords(rep, np.conj(y), np.conj(x), None if x0 is None else np.conj(x0))


def inner_coords(a, b):
    """``(xi, eta)``: linear in the first argument, orthonormal adapted basis."""
    return complex(np.vdot(b, a))


def generator(rep, x, y=None, x0=None):
    """``b(xi)`` for ``xi = sum x_i eps_i + sum y_i Gamma eps_i + x0 eps_0``.

    ``x`` may also be a full coordinate array when ``y`` is omitted.
    """
    if y is None:
        x, y, x0 = split_coords(rep, x)
    x = np.asarray(x, dtype=complex).reshape(-1)
    y = np.asarray(y, dtype=complex).reshape(-1)
    if x.size != rep.n or y.size != rep.n:
        raise ValidationError(
            f"coordinate counts ({x.size}, {y.size}) do not match n = {rep.n}"
        )
    if (x0 is not None) != (rep.parity == "odd"):
        raise ValidationError("x0 must be given exactly when parity is odd")
    m = np.zeros((rep.rep_dim, rep.rep_dim), dtype=complex)
    for xi, yi, g in zip(x, y, rep.generators):
        m += xi * g + yi * adjoint(g)
    if x0 is not None:
        m += x0 * rep.zero_mode
    return AlgebraElement(rep, m)


def element(rep, matrix):
    """Wrap ``matrix`` as an algebra element, checking odd-parity membership."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (rep.rep_dim, rep.rep_dim):
        raise ValidationError(
            f"matrix shape {matrix.shape} does not match rep_dim {rep.rep_dim}"
        )
    if rep.parity == "odd":
        z = rep.parity_marker
        res = max_abs(matrix @ z - z @ matrix)
        if res > MEMBERSHIP_TOL:
            raise ValidationError(
                f"matrix is not in M(2)^n (x) (C+C): commutator residual {res:.3e}",
                {"membership": res},
            )
    return AlgebraElement(rep, matrix)


def basis_coords(rep):
    """Coordinates of the orthonormal basis ``eps_1..eps_n, Gamma eps_1.., eps_0``."""
    return list(np.eye(_coords_len(rep), dtype=complex))


@dataclass
class CarReport:
    passed: bool
    anticommutator_residual: float
    involution_residual: float
    threshold: float
    pairs_checked: int


def verify_car(rep, trials=100, seed=0):
    rng = np.random.default_rng(seed)
    m = _coords_len(rep)
    vecs = basis_coords(rep)
    pairs = [(a, b) for a in vecs for b in vecs]
    for _ in range(trials):
        xi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        eta = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        pairs.append((xi, eta))
    ident = np.eye(rep.rep_dim)
    anti = invol = 0.0
    for xi, eta in pairs:
        bx = generator(rep, xi).matrix
        be = generator(rep, eta).matrix
        lhs = bx @ adjoint(be) + adjoint(be) @ bx
        anti = max(anti, max_abs(lhs - inner_coords(xi, eta) * ident))
        invol = max(invol, max_abs(generator(rep, gamma_coords(rep, xi)).matrix - adjoint(bx)))
    threshold = 1e-12 * rep.rep_dim
    return CarReport(anti <= threshold and invol <= threshold, anti, invol, threshold, len(pairs))


def majorana_vector(rep, label):
    """Adapted coordinates of the Gamma-fixed vector ``v`` with ``b(v) = c_label``."""
    n = rep.n
    v = np.zeros(_coords_len(rep), dtype=complex)
    if label == 0:
        if rep.parity != "odd":
            raise ValidationError("Majorana 0 exists only for odd parity")
        v[2 * n] = np.sqrt(2)
    else:
        i = (label - 1) // 2
        if label % 2:
            v[i], v[n + i] = 1, 1
        else:
            v[i], v[n + i] = 1j, -1j
    return v


def monomial_matrix(rep, index_set):
    m = np.eye(rep.rep_dim, dtype=complex)
    for j in index_set:
        m = m @ rep.majoranas[j]
    return m


def monomial_index_sets(rep):
    labels = rep.majorana_labels
    out = []
    for r in range(len(labels) + 1):
        out.extend(combinations(labels, r))
    return out


def majorana_basis(rep, max_entries=MAX_BASIS_ENTRIES):
    count = 2 ** len(rep.majorana_labels)
    if count * rep.rep_dim ** 2 > max_entries:
        raise ResourceError(
            f"Majorana basis of {count} monomials at rep_dim {rep.rep_dim} exceeds cap"
        )
    return [
        MajoranaMonomial(
            idx,
            monomial_matrix(rep, idx),
            tuple(majorana_vector(rep, j) for j in idx),
        )
        for idx in monomial_index_sets(rep)
    ]


def normalized_trace(m, rep_dim):
    return complex(np.trace(m)) / rep_dim


def expand(a, basis=None):
    """Coefficients ``tau(m_I^H A)`` of ``A`` over the Majorana monomials."""
    rep = a.rep
    element(rep, a.matrix)
    if basis is None:
        basis = majorana_basis(rep)
    # tau(m^H A) = sum(conj(m) * A) / rep_dim
    return {
        mono.index_set: complex(np.sum(np.conj(mono.matrix) * a.matrix)) / rep.rep_dim
        for mono in basis
    }


def reconstruct(rep, coeffs, basis=None):
    if basis is None:
        basis = majorana_basis(rep)
    m = np.zeros((rep.rep_dim, rep.rep_dim), dtype=complex)
    for mono in basis:
        m += coeffs.get(mono.index_set, 0) * mono.matrix
    return AlgebraElement(rep, m)
