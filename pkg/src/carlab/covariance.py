"""Anti-unitary involutions, covariance operators and Gamma-adapted bases.

An involution ``Gamma`` on C^k is stored as a unitary matrix ``G`` acting
after entrywise conjugation: ``Gamma xi = G conj(xi)``.  The inner product
``(xi, eta)`` is linear in ``xi`` and conjugate-linear in ``eta``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, PreconditionError, ValidationError
from .numerics import (
    adjoint,
    as_matrix,
    commutator_norm,
    fix_phase,
    herm_eig,
    hermitian_residual,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    random_hermitian,
    tol_for,
)

INVOLUTION_TOL = 1e-10
GAMMA_REL_TOL = 1e-10
PAIR_TOL = 1e-8
COMMUTE_TOL = 1e-10
BASIS_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Involution:
    G: np.ndarray

    def __post_init__(self):
        g = as_matrix(self.G)
        if g.shape[0] != g.shape[1]:
            raise ValidationError(f"involution matrix is not square: {g.shape}")
        k = g.shape[0]
        ident = np.eye(k)
        invol = max_abs(g @ np.conj(g) - ident)
        unit = max_abs(adjoint(g) @ g - ident)
        bad = {}
        if invol > INVOLUTION_TOL:
            bad["involutive"] = invol
        if unit > INVOLUTION_TOL:
            bad["unitary"] = unit
        if bad:
            raise ValidationError(
                "not an anti-unitary involution: "
                + ", ".join(f"{name} residual {r:.3e}" for name, r in bad.items()),
                bad,
            )
        object.__setattr__(self, "G", g)

    @property
    def k(self):
        return self.G.shape[0]

    def apply(self, xi):
        return self.G @ np.conj(np.asarray(xi, dtype=complex))

    def conjugate(self, m):
        """The operator ``Gamma M Gamma`` as a matrix."""
        return self.G @ np.conj(m) @ adjoint(self.G)

    def to_json(self):
        return {"k": self.k, "G": matrix_to_json(self.G)}

    @classmethod
    def from_json(cls, obj):
        try:
            k = int(obj["k"])
            g = matrix_from_json(obj["G"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed involution object: {exc}") from exc
        if g.shape != (k, k):
            raise ValidationError(f"involution declares k = {k} but G has shape {g.shape}")
        return cls(g)


def swap_involution(k):
    """``(x1, x2, x3, x4, ...) -> (conj x2, conj x1, conj x4, conj x3, ...)``.

    For odd ``k`` the last coordinate is only conjugated.
    """
    g = np.zeros((k, k), dtype=complex)
    for j in range(0, k - 1, 2):
        g[j, j + 1] = g[j + 1, j] = 1
    if k % 2:
        g[k - 1, k - 1] = 1
    return Involution(g)


def random_involution(k, seed):
    """``G = U U^T`` for a Haar-ish random unitary ``U``."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return Involution(q @ q.T)


def load_involution(path):
    with open(path) as fh:
        return Involution.from_json(json.load(fh))


@dataclass(frozen=True, eq=False)
class CovarianceOperator:
    S: np.ndarray
    gamma: Involution

    @property
    def k(self):
        return self.S.shape[0]


def residuals(S, gamma):
    """Residuals of Hermiticity, ``0 <= S <= 1`` and ``Gamma S Gamma = 1 - S``."""
    S = as_matrix(S)
    if S.shape != (gamma.k, gamma.k):
        raise ValidationError(
            f"operator shape {S.shape} does not match involution size {gamma.k}"
        )
    k = S.shape[0]
    herm = hermitian_residual(S)
    w = np.linalg.eigvalsh(0.5 * (S + adjoint(S)))
    spectral = float(max(0.0, -w[0], w[-1] - 1.0))
    rel = max_abs(gamma.conjugate(S) - (np.eye(k) - S))
    return {"hermitian": herm, "spectral_range": spectral, "gamma_relation": rel}


def validate(S, gamma, tol=None):
    """Return a CovarianceOperator or raise ValidationError naming each failure."""
    S = as_matrix(S)
    res = residuals(S, gamma)
    k = S.shape[0]
    limits = {
        "hermitian": tol_for(k) if tol is None else tol,
        "spectral_range": tol_for(k) if tol is None else tol,
        "gamma_relation": GAMMA_REL_TOL if tol is None else tol,
    }
    bad = {name: r for name, r in res.items() if r > limits[name]}
    if bad:
        raise ValidationError(
            "invalid covariance operator: "
            + ", ".join(f"{name} residual {r:.3e}" for name, r in bad.items()),
            bad,
        )
    return CovarianceOperator(S, gamma)


def load_covariance(path, gamma):
    from .numerics import load_matrix

    return validate(load_matrix(path), gamma)


@dataclass(frozen=True, eq=False)
class GammaAdaptedBasis:
    """Orthonormal ``eps_1..eps_n`` (columns) with ``Gamma eps_i`` and optional ``eps_0``.

    ``alphas2`` holds the joint eigenvalues of a second operator when the
    basis came from a simultaneous diagonalization.
    """

    epsilons: np.ndarray
    alphas: np.ndarray
    gamma: Involution
    zero_vector: np.ndarray = None
    alphas2: np.ndarray = None

    @property
    def n(self):
        return self.epsilons.shape[1]

    @property
    def parity(self):
        return "odd" if self.zero_vector is not None else "even"

    @property
    def gamma_epsilons(self):
        return self.gamma.G @ np.conj(self.epsilons)

    @property
    def frame(self):
        """Unitary whose columns are ``eps_1.., Gamma eps_1.. (, eps_0)``."""
        cols = [self.epsilons, self.gamma_epsilons]
        if self.zero_vector is not None:
            cols.append(self.zero_vector.reshape(-1, 1))
        return np.hstack(cols)

    def vector(self, coords):
        return self.frame @ np.asarray(coords, dtype=complex)

    def coords(self, xi):
        return adjoint(self.frame) @ np.asarray(xi, dtype=complex)

    def reconstruct(self, alphas=None):
        """``sum a eps eps^H + (1-a) Geps Geps^H (+ 1/2 eps0 eps0^H)``."""
        a = self.alphas if alphas is None else np.asarray(alphas)
        e, ge = self.epsilons, self.gamma_epsilons
        out = (e * a) @ adjoint(e) + (ge * (1 - a)) @ adjoint(ge)
        if self.zero_vector is not None:
            z = self.zero_vector.reshape(-1, 1)
            out = out + 0.5 * z @ adjoint(z)
        return out


def gamma_real_basis(V, gamma, tol=1e-6):
    """Orthonormal Gamma-fixed basis of the Gamma-invariant span of ``V``'s columns."""
    m = V.shape[1]
    us = []
    for j in range(m):
        v = V[:, j]
        gv = gamma.apply(v)
        for cand in (v + gv, 1j * (v - gv)):
            w = cand.copy()
            for u in us:
                w = w - np.vdot(u, w).real * u
            nrm = np.linalg.norm(w)
            if nrm > tol:
                w = w / nrm
                # enforce Gamma w = w exactly up to rounding
                w = 0.5 * (w + gamma.apply(w))
                w = w / np.linalg.norm(w)
                us.append(w)
            if len(us) == m:
                return np.column_stack(us)
    raise ConsistencyError(
        f"could not build a Gamma-real basis: found {len(us)} of {m} vectors"
    )


def _classify(key):
    """+1 when ``key`` exceeds its flip ``1 - key`` lexicographically, 0 if equal."""
    for a in key:
        if a > 0.5 + PAIR_TOL:
            return 1
        if a < 0.5 - PAIR_TOL:
            return -1
    return 0


def _adapt(blocks, gamma, k):
    """Assemble a GammaAdaptedBasis from joint eigenspace blocks ``[(key, V)]``."""
    eps, keys, zero = [], [], None
    for key, V in blocks:
        side = _classify(key)
        if side > 0:
            for j in range(V.shape[1]):
                eps.append(fix_phase(V[:, j]))
                keys.append(key)
        elif side == 0:
            U = gamma_real_basis(V, gamma)
            m = U.shape[1]
            for j in range(0, m - 1, 2):
                eps.append((U[:, j] + 1j * U[:, j + 1]) / np.sqrt(2))
                keys.append(tuple(0.5 for _ in key))
            if m % 2:
                if zero is not None:
                    raise ConsistencyError("more than one lone Gamma-fixed vector")
                zero = U[:, m - 1]
    n = k // 2
    if len(eps) != n or (zero is not None) != (k % 2 == 1):
        raise ConsistencyError(
            f"adapted basis has {len(eps)} pairs (expected {n}) and "
            f"{'a' if zero is not None else 'no'} zero vector for k = {k}"
        )
    epsilons = np.column_stack(eps) if eps else np.zeros((k, 0), dtype=complex)
    width = len(blocks[0][0]) if blocks else 1
    keys = np.array(keys, dtype=float).reshape(len(eps), width)
    alphas = keys[:, 0]
    alphas2 = keys[:, 1] if keys.shape[1] > 1 else None
    return GammaAdaptedBasis(epsilons, alphas, gamma, zero, alphas2)


def _order(basis):
    """Sort pairs by descending primary alpha (ties by descending secondary)."""
    if basis.n == 0:
        return basis
    sec = basis.alphas2 if basis.alphas2 is not None else np.zeros(basis.n)
    idx = np.lexsort((-sec, -basis.alphas))
    return GammaAdaptedBasis(
        basis.epsilons[:, idx],
        basis.alphas[idx],
        basis.gamma,
        basis.zero_vector,
        None if basis.alphas2 is None else basis.alphas2[idx],
    )


def check_basis(basis, S, alphas=None, tol=BASIS_TOL):
    """Max residual of the adapted-basis invariants for operator ``S``."""
    a = basis.alphas if alphas is None else alphas
    e, ge = basis.epsilons, basis.gamma_epsilons
    res = 0.0
    if basis.n:
        res = max(res, max_abs(S @ e - e * a), max_abs(S @ ge - ge * (1 - a)))
    if basis.zero_vector is not None:
        z = basis.zero_vector
        res = max(res, max_abs(S @ z - 0.5 * z), max_abs(basis.gamma.apply(z) - z))
    f = basis.frame
    res = max(res, max_abs(adjoint(f) @ f - np.eye(f.shape[1])))
    if res > tol:
        raise ConsistencyError(f"adapted basis residual {res:.3e} exceeds {tol:.1e}")
    return res


def adapted_diagonalize(cov):
    S, gamma, k = cov.S, cov.gamma, cov.k
    dec = herm_eig(S)
    blocks = []
    for grp in dec.groups(tol_for(k)):
        a = float(np.mean(dec.eigenvalues[grp]))
        blocks.append(((a,), dec.eigenvectors[:, grp]))
    basis = _order(_adapt(blocks, gamma, k))
    check_basis(basis, S)
    return basis


def simultaneous_adapted_diagonalize(cov, cov2, commute_tol=COMMUTE_TOL):
    """One adapted basis diagonalizing both operators, with joint alphas."""
    c = commutator_norm(cov.S, cov2.S)
    if c > commute_tol:
        raise PreconditionError(
            f"operators do not commute: commutator norm {c:.3e} > {commute_tol:.1e}", c
        )
    k = cov.k
    tol = tol_for(k)
    dec = herm_eig(cov.S)
    blocks = []
    for grp in dec.groups(tol):
        a = float(np.mean(dec.eigenvalues[grp]))
        V = dec.eigenvectors[:, grp]
        sub = herm_eig(adjoint(V) @ cov2.S @ V, herm_tol=1e-8)
        W = V @ sub.eigenvectors
        for g2 in sub.groups(tol):
            a2 = float(np.mean(sub.eigenvalues[g2]))
            blocks.append(((a, a2), W[:, g2]))
    basis = _order(_adapt(blocks, cov.gamma, k))
    check_basis(basis, cov.S)
    check_basis(basis, cov2.S, basis.alphas2)
    return basis


def random_covariance(k, gamma, scale=1.0, seed=0):
    """``S = (I + D)/2`` with ``Gamma D Gamma = -D`` and ``||D|| <= scale``."""
    if gamma.k != k:
        raise ValidationError(f"k = {k} does not match involution size {gamma.k}")
    rng = np.random.default_rng(seed)
    t = random_hermitian(k, rng)
    odd = 0.5 * (t - gamma.conjugate(t))
    odd = 0.5 * (odd + adjoint(odd))
    d = scale * odd / max(1.0, float(np.linalg.norm(odd, 2)))
    return validate(0.5 * (np.eye(k) + d), gamma)


def covariance_from_basis(basis, alphas):
    """Operator diagonal in ``basis`` with the given alphas (zero mode at 1/2)."""
    return validate(basis.reconstruct(alphas), basis.gamma)


def difference_rank(cov, cov2, tol=None):
    if cov.k != cov2.k:
        raise ValidationError("operators have different dimensions")
    k = cov.k
    tol = tol_for(k) if tol is None else tol
    d = cov.S - cov2.S
    w = np.linalg.eigvalsh(0.5 * (d + adjoint(d)))
    return int(np.sum(np.abs(w) > tol))


def gamma_form(cov, xi, eta):
    """Complex-bilinear form ``B(xi, eta) = (S xi, Gamma eta)``."""
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    return complex(np.vdot(cov.gamma.apply(eta), cov.S @ xi))


def gamma_form_matrix(cov):
    """Coefficients ``B[p, q] = B(e_p, e_q)`` on the standard basis."""
    k = cov.k
    e = np.eye(k, dtype=complex)
    return np.array([[gamma_form(cov, e[p], e[q]) for q in range(k)] for p in range(k)])
