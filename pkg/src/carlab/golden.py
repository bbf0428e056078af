"""Built-in three-dimensional non-commuting example.

``H = C^3`` with ``Gamma(x, y, z) = (conj y, conj x, conj z)`` and two
covariance operators given as integer matrices over 6.  The test element is
``diag(-1, 1) (x) 1`` in ``M(2) (x) (C + C)``.
"""

import math

import numpy as np

from . import car_rep
from .affine import decide, mixture, necessary_check
from .covariance import Involution, adapted_diagonalize, difference_rank, validate
from .numerics import commutator_norm
from .quasifree import evaluate

S_INT = [[2, 0, 1], [0, 4, -1], [1, -1, 3]]
S2_INT = [[3, 0, 1], [0, 3, -1], [1, -1, 3]]
GAMMA_G = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]

EXPECTED_EIGS_S = sorted([0.5, (3 + math.sqrt(3)) / 6, (3 - math.sqrt(3)) / 6])
EXPECTED_EIGS_S2 = sorted([0.5, (3 + math.sqrt(2)) / 6, (3 - math.sqrt(2)) / 6])
EXPECTED_PHI_S = -math.sqrt(3) / 3
EXPECTED_PHI_S2 = -math.sqrt(2) / 3
EXPECTED_PHI_MIX = -0.5
# 1/2 phi_S + 1/2 phi_S2 - phi_mix from the three values above
EXPECTED_DISCREPANCY = 0.5 - (math.sqrt(3) + math.sqrt(2)) / 6
GOLDEN_TOL = 1e-12


def operators():
    gamma = Involution(np.array(GAMMA_G, dtype=complex))
    s = validate(np.array(S_INT, dtype=complex) / 6, gamma)
    s2 = validate(np.array(S2_INT, dtype=complex) / 6, gamma)
    return s, s2, gamma


def witness_element(rep):
    return car_rep.element(rep, np.kron(np.diag([-1.0, 1.0]), np.eye(2)))


def own_basis_value(cov):
    """``phi_S(b)`` with ``b`` placed in the representation built from S's own adapted basis."""
    basis = adapted_diagonalize(cov)
    rep = car_rep.build_rep(basis.n, basis.parity)
    return evaluate(cov, basis, witness_element(rep)).real


def fixed_basis_values(s, s2, lam=0.5):
    """The three values with ``b`` fixed in the representation of S's adapted basis."""
    basis = adapted_diagonalize(s)
    rep = car_rep.build_rep(basis.n, basis.parity)
    b = witness_element(rep)
    mix = mixture(s, s2, lam)
    return tuple(evaluate(c, basis, b).real for c in (s, s2, mix))


def report():
    s, s2, _ = operators()
    mix = mixture(s, s2, 0.5)
    eig_s = np.linalg.eigvalsh(s.S).tolist()
    eig_s2 = np.linalg.eigvalsh(s2.S).tolist()
    phi = [own_basis_value(c) for c in (s, s2, mix)]
    own_disc = 0.5 * phi[0] + 0.5 * phi[1] - phi[2]
    fixed = fixed_basis_values(s, s2)
    aff = decide(s, s2)
    nec, nec_res = necessary_check(s, s2)
    checks = {
        "eigenvalues_S": max(abs(a - b) for a, b in zip(eig_s, EXPECTED_EIGS_S)),
        "eigenvalues_S2": max(abs(a - b) for a, b in zip(eig_s2, EXPECTED_EIGS_S2)),
        "phi_S": abs(phi[0] - EXPECTED_PHI_S),
        "phi_S2": abs(phi[1] - EXPECTED_PHI_S2),
        "phi_mixture": abs(phi[2] - EXPECTED_PHI_MIX),
    }
    values_match = all(v <= GOLDEN_TOL for v in checks.values())
    return {
        "schema": "1",
        "eigenvalues_S": eig_s,
        "eigenvalues_S2": eig_s2,
        "phi_own_basis": {"S": phi[0], "S2": phi[1], "mixture": phi[2]},
        "own_basis_discrepancy": own_disc,
        "phi_fixed_basis": {"S": fixed[0], "S2": fixed[1], "mixture": fixed[2]},
        "fixed_basis_discrepancy": 0.5 * fixed[0] + 0.5 * fixed[1] - fixed[2],
        "residuals": checks,
        "values_match": values_match,
        "commutator_norm": commutator_norm(s.S, s2.S),
        "diff_rank": difference_rank(s, s2),
        "necessary_check": nec,
        "necessary_residual": nec_res,
        "affine": aff.to_json(),
        "passed": values_match and aff.verdict == "not_affine",
    }

