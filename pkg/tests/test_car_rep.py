import numpy as np
import pytest

from carlab import car_rep as cr
from carlab.errors import ResourceError, ValidationError
from carlab.numerics import adjoint, max_abs

Z = np.diag([1.0, -1.0])
L = np.array([[0, 0], [1, 0]])
REPS = [(n, p) for n in range(1, 5) for p in ("even", "odd")] + [(0, "odd")]


def test_single_mode_generator():
    rep = cr.build_rep(1, "even")
    assert len(rep.generators) == 1
    assert np.array_equal(rep.generators[0], L)
    assert rep.zero_mode is None and rep.rep_dim == 2


def test_two_mode_generators():
    rep = cr.build_rep(2, "even")
    assert np.array_equal(rep.generators[0], np.kron(L, np.eye(2)))
    assert np.array_equal(rep.generators[1], np.kron(Z, L))


def test_odd_zero_mode_relations():
    rep = cr.build_rep(1, "odd")
    z0 = rep.zero_mode
    assert np.allclose(z0, np.kron(Z, Z) / np.sqrt(2))
    assert max_abs(z0 - adjoint(z0)) == 0
    assert max_abs(z0 @ z0 - 0.5 * np.eye(4)) < 1e-12
    b1 = rep.generators[0]
    assert max_abs(z0 @ b1 + b1 @ z0) < 1e-12
    assert max_abs(z0 @ adjoint(b1) + adjoint(b1) @ z0) < 1e-12


def test_odd_generators_carry_identity_tail():
    rep = cr.build_rep(2, "odd")
    assert np.array_equal(rep.generators[1], np.kron(np.kron(Z, L), np.eye(2)))
    assert rep.rep_dim == 8


def test_build_rep_errors():
    with pytest.raises(ValidationError):
        cr.build_rep(0, "even")
    with pytest.raises(ValidationError):
        cr.build_rep(1, "both")
    with pytest.raises(ResourceError):
        cr.build_rep(14, "even")
    with pytest.raises(ResourceError):
        cr.build_rep(3, "even", max_rep_dim=4)


@pytest.mark.parametrize(
    "x, y, expected",
    [
        ([1], [0], [[0, 0], [1, 0]]),
        ([0], [1], [[0, 1], [0, 0]]),
        ([1], [1], [[0, 1], [1, 0]]),
    ],
)
def test_generator_single_mode(x, y, expected):
    rep = cr.build_rep(1, "even")
    assert np.array_equal(cr.generator(rep, x, y).matrix, expected)


def test_generator_coordinate_errors():
    rep = cr.build_rep(2, "odd")
    with pytest.raises(ValidationError):
        cr.generator(rep, [1], [0], 0)
    with pytest.raises(ValidationError):
        cr.generator(rep, [1, 0], [0, 0])
    with pytest.raises(ValidationError):
        cr.generator(cr.build_rep(1, "even"), [1], [0], 1.0)


def test_car_basis_pairs():
    rep = cr.build_rep(2, "even")
    e1, e2 = cr.basis_coords(rep)[:2]
    b1, b2 = cr.generator(rep, e1).matrix, cr.generator(rep, e2).matrix
    assert max_abs(b1 @ adjoint(b2) + adjoint(b2) @ b1) == 0
    assert max_abs(b1 @ adjoint(b1) + adjoint(b1) @ b1 - np.eye(4)) == 0


@pytest.mark.parametrize("n, parity", REPS)
def test_verify_car(n, parity):
    rep = cr.build_rep(n, parity)
    report = cr.verify_car(rep, trials=100, seed=n)
    assert report.passed, report
    assert report.pairs_checked == len(cr.basis_coords(rep)) ** 2 + 100


def test_verify_car_detects_broken_rep():
    rep = cr.build_rep(2, "even")
    bad = cr.JordanWignerRep(2, "even", (rep.generators[0], np.kron(np.eye(2), L)), None, 4)
    assert not cr.verify_car(bad, trials=5, seed=0).passed


def test_majorana_basis_single_mode():
    rep = cr.build_rep(1, "even")
    basis = cr.majorana_basis(rep)
    assert [m.index_set for m in basis] == [(), (1,), (2,), (1, 2)]
    c1, c2 = basis[1].matrix, basis[2].matrix
    assert cr.normalized_trace(adjoint(c1) @ c2, 2) == 0
    c12 = basis[3].matrix
    assert max_abs(c12 @ c12 + np.eye(2)) < 1e-12


@pytest.mark.parametrize("n, parity", [(1, "even"), (2, "even"), (3, "even"), (1, "odd"), (2, "odd"), (3, "odd"), (0, "odd")])
def test_majorana_gram_is_identity(n, parity):
    rep = cr.build_rep(n, parity)
    basis = cr.majorana_basis(rep)
    assert len(basis) == 2 ** (2 * n + (parity == "odd"))
    M = np.array([m.matrix.reshape(-1) for m in basis])
    gram = np.conj(M) @ M.T / rep.rep_dim
    assert max_abs(gram - np.eye(len(basis))) < 1e-12


@pytest.mark.parametrize("n, parity", [(2, "even"), (2, "odd"), (3, "odd")])
def test_majoranas_self_adjoint_unitary_anticommuting(n, parity):
    rep = cr.build_rep(n, parity)
    I = np.eye(rep.rep_dim)
    for i in rep.majorana_labels:
        ci = rep.majoranas[i]
        assert max_abs(ci - adjoint(ci)) < 1e-12
        assert max_abs(ci @ ci - I) < 1e-12
        for j in rep.majorana_labels:
            if i != j:
                assert max_abs(ci @ rep.majoranas[j] + rep.majoranas[j] @ ci) < 1e-12


@pytest.mark.parametrize("n, parity", [(2, "even"), (1, "odd"), (2, "odd")])
def test_majorana_vectors_define_majoranas(n, parity):
    rep = cr.build_rep(n, parity)
    for j in rep.majorana_labels:
        v = cr.majorana_vector(rep, j)
        assert np.allclose(cr.gamma_coords(rep, v), v)
        assert abs(cr.inner_coords(v, v) - 2) < 1e-12
        assert max_abs(cr.generator(rep, v).matrix - rep.majoranas[j]) < 1e-12


def test_expand_identity():
    rep = cr.build_rep(2, "even")
    coeffs = cr.expand(cr.AlgebraElement(rep, np.eye(4, dtype=complex)))
    assert coeffs[()] == 1
    assert all(abs(c) < 1e-15 for idx, c in coeffs.items() if idx)


def test_expand_lowering_operator():
    rep = cr.build_rep(1, "even")
    coeffs = cr.expand(cr.generator(rep, [1], [0]))
    assert abs(coeffs[(1,)] - 0.5) < 1e-15
    assert abs(coeffs[(2,)] + 0.5j) < 1e-15
    assert abs(coeffs[()]) + abs(coeffs[(1, 2)]) < 1e-15


@pytest.mark.parametrize("n, parity", [(1, "even"), (2, "even"), (3, "even"), (1, "odd"), (2, "odd"), (3, "odd")])
def test_expand_round_trip(n, parity, rng):
    rep = cr.build_rep(n, parity)
    basis = cr.majorana_basis(rep)
    for _ in range(50):
        coeffs = {m.index_set: complex(*rng.standard_normal(2)) for m in basis}
        a = cr.reconstruct(rep, coeffs, basis)
        back = cr.reconstruct(rep, cr.expand(a, basis), basis)
        assert max_abs(back.matrix - a.matrix) <= 1e-10 * rep.rep_dim


def test_expand_rejects_odd_parity_violation():
    rep = cr.build_rep(1, "odd")
    off_block = np.kron(np.eye(2), np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValidationError, match="membership|not in"):
        cr.expand(cr.AlgebraElement(rep, off_block.astype(complex)))


def test_algebra_element_arithmetic():
    rep = cr.build_rep(1, "even")
    b = cr.generator(rep, [1], [0])
    n = b.adjoint() @ b
    assert np.array_equal(n.matrix, np.diag([1, 0]))
    assert np.array_equal((b + b.adjoint()).matrix, [[0, 1], [1, 0]])
    with pytest.raises(ValidationError):
        b + cr.generator(cr.build_rep(1, "even"), [1], [0])
